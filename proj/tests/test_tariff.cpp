#include <cmath>

#include <doctest.h>

#include "pvdyn/tariff.hpp"
#include "test_support.hpp"

using namespace pvdyn;

TEST_CASE("ramsey_flat picks the smaller break-even root on the toy") {
    const MarketModel toy = testkit::toy_market();
    const auto t = ramsey_flat(toy, 2.0, 0.0);
    REQUIRE(t.has_value());
    const double expected = (11.0 - std::sqrt(73.0)) / 2.0;
    CHECK(std::abs(t->volumetric_price[0] - expected) <= 1e-9);
    CHECK(t->connection_charge == 0.0);
    CHECK(t->class_tag == TariffClass::Flat);
    CHECK(std::abs(expected_retail_surplus(toy, *t, 2.0, 0.0)) <= 1e-9 * 2.0);
}

TEST_CASE("ramsey_flat is infeasible beyond the margin vertex") {
    const MarketModel toy = testkit::toy_market();
    CHECK_FALSE(ramsey_flat(toy, 21.0, 0.0).has_value());
    CHECK(ramsey_flat(toy, 20.25, 0.0).has_value());  // exactly attainable
}

TEST_CASE("ramsey_flat with zero cost prices at wholesale") {
    const MarketModel toy = testkit::toy_market();
    const auto t = ramsey_flat(toy, 0.0, 0.0);
    REQUIRE(t.has_value());
    CHECK(t->volumetric_price[0] == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("ramsey_flat honors a fixed connection charge") {
    const MarketModel toy = testkit::toy_market();
    // Margin target theta - M*A = 1: smaller root of (pi-1)(10-pi) = 1.
    const auto t = ramsey_flat(toy, 2.0, 0.0, 1.0);
    REQUIRE(t.has_value());
    const double expected = (11.0 - std::sqrt(77.0)) / 2.0;
    CHECK(std::abs(t->volumetric_price[0] - expected) <= 1e-9);
}

TEST_CASE("ramsey_two_part posts wholesale prices and balances with the charge") {
    const MarketModel toy = testkit::toy_market();
    const Tariff t = ramsey_two_part(toy, 2.0, 0.0);
    CHECK(t.volumetric_price[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(t.connection_charge == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(t.class_tag == TariffClass::TwoPart);
    CHECK(std::abs(expected_retail_surplus(toy, t, 2.0, 0.0)) <= 1e-9 * 2.0);
}

TEST_CASE("ramsey_two_part volumetric price ignores installed capacity") {
    const MarketModel toy = testkit::toy_market();
    const Tariff a = ramsey_two_part(toy, 2.0, 0.0);
    const Tariff b = ramsey_two_part(toy, 2.0, 5.0);
    CHECK(a.volumetric_price[0] == b.volumetric_price[0]);
    // Single scenario: price equals wholesale exactly, so the energy margin
    // is zero at any capacity and the charge carries the whole cost.
    CHECK(b.connection_charge == doctest::Approx(a.connection_charge).epsilon(1e-12));
    CHECK(std::abs(expected_retail_surplus(toy, b, 2.0, 5.0)) <= 1e-9 * 2.0);

    // With wholesale risk the margin is capacity-dependent but the price is not.
    std::mt19937_64 rng(11);
    const auto cal = testkit::random_calibration(rng);
    const Tariff c0 = ramsey_two_part(cal.model, cal.theta, 0.0);
    const Tariff c1 = ramsey_two_part(cal.model, cal.theta,
                                      0.7 * cal.adoption.market_size_kw);
    for (int n = 0; n < cal.model.periods_per_cycle; ++n)
        CHECK(c0.volumetric_price[n] == c1.volumetric_price[n]);
    CHECK(std::abs(expected_retail_surplus(cal.model, c1, cal.theta,
                                           0.7 * cal.adoption.market_size_kw)) <=
          break_even_tolerance(cal.theta));
}

TEST_CASE("ramsey_linear equals ramsey_flat on a single period") {
    const MarketModel toy = testkit::toy_market();
    const auto lin = ramsey_linear(toy, 2.0, 0.0);
    const auto flat = ramsey_flat(toy, 2.0, 0.0);
    REQUIRE(lin.has_value());
    REQUIRE(flat.has_value());
    CHECK(std::abs(lin->volumetric_price[0] - flat->volumetric_price[0]) <= 1e-7);
    CHECK(std::abs(expected_retail_surplus(toy, *lin, 2.0, 0.0)) <= 1e-9 * 2.0);
}

TEST_CASE("ramsey_linear prices at expected wholesale when cost is zero") {
    std::mt19937_64 rng(5);
    const auto cal = testkit::random_calibration(rng);
    const auto t = ramsey_linear(cal.model, 0.0, 0.0);
    REQUIRE(t.has_value());
    PeriodVec lbar = PeriodVec::Zero(cal.model.periods_per_cycle);
    for (const auto& s : cal.model.scenarios) lbar += s.probability * s.wholesale_price;
    for (int n = 0; n < cal.model.periods_per_cycle; ++n)
        CHECK(t->volumetric_price[n] == doctest::Approx(lbar[n]).epsilon(1e-9));
}

TEST_CASE("ramsey_linear breaks even across random draws and capacities") {
    std::mt19937_64 rng(99);
    int feasible = 0;
    for (int i = 0; i < 40; ++i) {
        const auto cal = testkit::random_calibration(rng);
        for (double frac : {0.0, 0.35, 0.8}) {
            const double cap = frac * cal.adoption.market_size_kw;
            const auto t = ramsey_linear(cal.model, cal.theta, cap);
            if (!t) continue;
            ++feasible;
            CHECK(std::abs(expected_retail_surplus(cal.model, *t, cal.theta, cap)) <=
                  break_even_tolerance(cal.theta));
            CHECK((t->volumetric_price >= -1e-12).all());
        }
    }
    CHECK(feasible > 30);  // the draw keeps most cases solvable
}

TEST_CASE("ramsey_linear reports infeasibility beyond the per-period maximum") {
    std::mt19937_64 rng(123);
    const auto cal = testkit::random_calibration(rng);
    const double best = max_retail_margin(cal.model, 0.0, false).value;
    CHECK_FALSE(ramsey_linear(cal.model, best * 1.01 + 1.0, 0.0).has_value());
}

TEST_CASE("fixed-charge policy shifts cost like a lump-sum rebate") {
    const MarketModel toy = testkit::toy_market();
    TariffPolicy fixed;
    fixed.kind = TariffPolicy::Kind::FixedCharge;
    fixed.fixed_charge = 0.5;
    const auto with_charge = apply_policy(toy, fixed, 2.0, 0.0);
    TariffPolicy flat;  // RamseyFlat
    const auto shifted = apply_policy(toy, flat, 1.5, 0.0);
    REQUIRE(with_charge.has_value());
    REQUIRE(shifted.has_value());
    CHECK(std::abs(with_charge->volumetric_price[0] - shifted->volumetric_price[0]) <= 1e-12);
    CHECK(with_charge->connection_charge == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("apply_policy dispatches to every kind") {
    const MarketModel toy = testkit::toy_market();
    TariffPolicy p;
    p.kind = TariffPolicy::Kind::RamseyFlat;
    CHECK(apply_policy(toy, p, 2.0, 0.0)->class_tag == TariffClass::Flat);
    p.kind = TariffPolicy::Kind::RamseyLinear;
    CHECK(apply_policy(toy, p, 2.0, 0.0).has_value());
    p.kind = TariffPolicy::Kind::RamseyTwoPart;
    CHECK(apply_policy(toy, p, 2.0, 0.0)->class_tag == TariffClass::TwoPart);
    p.kind = TariffPolicy::Kind::FixedCharge;
    p.fixed_charge = 0.25;
    p.dynamic_prices = true;
    const auto t = apply_policy(toy, p, 2.0, 0.0);
    REQUIRE(t.has_value());
    CHECK(t->connection_charge == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(std::abs(expected_retail_surplus(toy, *t, 2.0, 0.0)) <= 1e-9 * 2.0);
}
