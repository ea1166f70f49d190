#include <cmath>

#include <doctest.h>

#include "pvdyn/longrun.hpp"
#include "test_support.hpp"

using namespace pvdyn;

namespace {

LongRunScenario toy_scenario(int years, double theta, double xi) {
    LongRunScenario scn;
    scn.years = years;
    scn.theta_path.assign(years, theta);
    scn.xi_path.assign(years, xi);
    scn.policy.kind = TariffPolicy::Kind::RamseyFlat;
    scn.initial_capacity_kw = 0.0;
    return scn;
}

}  // namespace

TEST_CASE("geometric_path compounds the growth rate") {
    const auto path = geometric_path(100.0, 0.02, 4);
    REQUIRE(path.size() == 4);
    CHECK(path[0] == 100.0);
    CHECK(path[3] == doctest::Approx(100.0 * 1.02 * 1.02 * 1.02).epsilon(1e-12));
    const auto falling = geometric_path(10.0, -0.05, 3);
    CHECK(falling[2] == doctest::Approx(10.0 * 0.95 * 0.95).epsilon(1e-12));
}

TEST_CASE("scenario validation rejects mismatched paths") {
    LongRunScenario scn = toy_scenario(5, 2.0, 5.0);
    scn.xi_path.pop_back();
    CHECK_THROWS_AS(scn.validate(), DimensionError);
    LongRunScenario neg = toy_scenario(3, 2.0, 5.0);
    neg.theta_path[1] = -0.5;
    CHECK_THROWS_AS(neg.validate(), DimensionError);
}

TEST_CASE("constant paths reproduce the plain simulation") {
    const MarketModel toy = testkit::toy_market();
    const AdoptionModel am = testkit::toy_adoption();
    const LongRunScenario scn = toy_scenario(12, 2.0, 5.0);
    const LongRunResult lr = run_longrun(toy, am, scn);
    SimulateOptions opt;
    opt.max_years = 12;
    opt.converge_streak = 1000;  // force the full horizon
    const Trajectory traj =
        simulate(toy, am, scn.policy, 2.0, 5.0, 0.0, opt);
    REQUIRE(lr.records.size() == 12);
    REQUIRE(traj.states.size() == 12);
    for (int k = 0; k < 12; ++k) {
        CHECK(lr.records[k].capacity_kw ==
              doctest::Approx(traj.states[k].capacity_kw).epsilon(1e-12));
    }
    CHECK(lr.final_capacity_kw == doctest::Approx(traj.final_capacity_kw).epsilon(1e-12));
}

TEST_CASE("year records recompute their own consumer surplus") {
    const MarketModel toy = testkit::toy_market();
    const AdoptionModel am = testkit::toy_adoption();
    const LongRunResult lr = run_longrun(toy, am, toy_scenario(10, 2.0, 5.0));
    for (const YearRecord& rec : lr.records) {
        CHECK(rec.consumer_surplus ==
              doctest::Approx(expected_consumer_surplus(toy, rec.tariff, rec.capacity_kw) *
                              toy.cycles_per_year)
                  .epsilon(1e-12));
        CHECK(rec.new_capacity_kw >= 0.0);
    }
}

TEST_CASE("installed increments add up to the final capacity") {
    const MarketModel toy = testkit::toy_market();
    const AdoptionModel am = testkit::toy_adoption();
    const LongRunResult lr = run_longrun(toy, am, toy_scenario(15, 2.0, 5.0));
    double total = 0.0;
    for (const YearRecord& rec : lr.records) total += rec.new_capacity_kw;
    CHECK(total == doctest::Approx(lr.final_capacity_kw).epsilon(1e-9));
}

TEST_CASE("social welfare arithmetic on a synthetic record") {
    YearRecord rec;
    rec.consumer_surplus = 10.0;
    rec.new_capacity_kw = 2.0;
    rec.installation_cost = 2.0 * 3.0;
    CHECK(cumulative_social_welfare({rec}) == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("social welfare two ways on a 20-year run") {
    const MarketModel toy = testkit::toy_market();
    const AdoptionModel am = testkit::toy_adoption();
    LongRunScenario scn = toy_scenario(20, 2.0, 12.0);
    scn.xi_path = geometric_path(12.0, -0.05, 20);
    const LongRunResult lr = run_longrun(toy, am, scn);
    REQUIRE(lr.records.size() == 20);
    const double sw = cumulative_social_welfare(lr.records);
    double cs_total = 0.0, spend = 0.0, installed = 0.0;
    for (const YearRecord& rec : lr.records) {
        cs_total += rec.consumer_surplus;
        spend += rec.new_capacity_kw * scn.xi_path[rec.year];
        installed += rec.new_capacity_kw;
    }
    // Incremental accounting equals final capacity priced at the
    // install-weighted average cost.
    const double avg_xi = installed > 0.0 ? spend / installed : 0.0;
    CHECK(sw == doctest::Approx(cs_total - installed * avg_xi).epsilon(1e-10));
}

TEST_CASE("zero adoption leaves social welfare equal to consumer surplus") {
    const MarketModel toy = testkit::toy_market();
    const AdoptionModel am = testkit::toy_adoption();
    const LongRunResult lr = run_longrun(toy, am, toy_scenario(6, 2.0, 1e6));
    double cs_total = 0.0;
    for (const YearRecord& rec : lr.records) {
        CHECK(rec.new_capacity_kw == 0.0);
        cs_total += rec.consumer_surplus;
    }
    CHECK(cumulative_social_welfare(lr.records) == doctest::Approx(cs_total).epsilon(1e-12));
}

TEST_CASE("death spiral truncates the records at the failing year") {
    const MarketModel toy = testkit::toy_market();
    const AdoptionModel am = testkit::toy_adoption();
    const LongRunResult lr = run_longrun(toy, am, toy_scenario(60, 2.0, 2.5));
    CHECK(lr.outcome == RunOutcome::DeathSpiral);
    CHECK(lr.death_year > 0);
    CHECK(static_cast<int>(lr.records.size()) == lr.death_year);
    CHECK(lr.final_capacity_kw >= 9.0 - 2.0 * std::sqrt(2.0) - 1e-9);
}

TEST_CASE("rising retailer cost brings the spiral forward") {
    const MarketModel toy = testkit::toy_market();
    const AdoptionModel am = testkit::toy_adoption();
    // Slightly above the tipping cost: both runs spiral, the growing one sooner.
    const double theta0 = 1.9;
    LongRunScenario flat_cost = toy_scenario(120, theta0, 2.5);
    LongRunScenario rising = flat_cost;
    rising.theta_path = geometric_path(theta0, 0.02, 120);
    const LongRunResult flat_lr = run_longrun(toy, am, flat_cost);
    const LongRunResult rising_lr = run_longrun(toy, am, rising);
    REQUIRE(flat_lr.outcome == RunOutcome::DeathSpiral);
    REQUIRE(rising_lr.outcome == RunOutcome::DeathSpiral);
    CHECK(rising_lr.death_year <= flat_lr.death_year);
}

TEST_CASE("falling install cost lifts the potential year by year") {
    const MarketModel toy = testkit::toy_market();
    const AdoptionModel am = testkit::toy_adoption();
    const auto xi_path = geometric_path(5.0, -0.05, 15);
    const PeriodVec prices = PeriodVec::Constant(1, 1.4);
    double prev = -1.0;
    for (double xi : xi_path) {
        const double pot = market_potential(am, toy, prices, xi);
        CHECK(pot >= prev);
        prev = pot;
    }
}

TEST_CASE("connection charge sweep is monotone among stable runs") {
    const MarketModel toy = testkit::toy_market();
    const AdoptionModel am = testkit::toy_adoption();
    const std::vector<double> charges = {0.0, 0.4, 0.8, 1.2, 1.6};
    const auto entries = sweep_connection_charge(toy, am, charges, 25, 2.0, 5.0);
    REQUIRE(entries.size() == charges.size());
    for (std::size_t k = 0; k < entries.size(); ++k) {
        CHECK(entries[k].charge == charges[k]);
        CHECK(entries[k].result.outcome != RunOutcome::DeathSpiral);
        if (k > 0) {
            CHECK(entries[k].result.final_capacity_kw <=
                  entries[k - 1].result.final_capacity_kw + 1e-9);
        }
    }
}

TEST_CASE("a choking charge stalls adoption into a static market") {
    const MarketModel toy = testkit::toy_market();
    const AdoptionModel am = testkit::toy_adoption();
    // Charge near theta/M at a high install cost: the volumetric price drops
    // to wholesale, paybacks stretch out, and the market sits still.
    const auto entries = sweep_connection_charge(toy, am, {1.95}, 10, 2.0, 15.0);
    const auto& records = entries[0].result.records;
    REQUIRE(records.size() == 10);
    CHECK(entries[0].result.final_capacity_kw < 0.02 * am.market_size_kw);
    for (std::size_t k = 1; k < records.size(); ++k) {
        CHECK(std::abs(records[k].consumer_surplus - records[k - 1].consumer_surplus) <=
              1e-3 * std::abs(records[0].consumer_surplus));
    }
}

TEST_CASE("sweep validates its charge grid") {
    const MarketModel toy = testkit::toy_market();
    const AdoptionModel am = testkit::toy_adoption();
    CHECK_THROWS_AS(sweep_connection_charge(toy, am, {}, 5, 2.0, 5.0), DimensionError);
    CHECK_THROWS_AS(sweep_connection_charge(toy, am, {0.5, 0.2}, 5, 2.0, 5.0),
                    DimensionError);
    CHECK_THROWS_AS(sweep_connection_charge(toy, am, {-0.1, 0.2}, 5, 2.0, 5.0),
                    DimensionError);
}
