#include "pvdyn/longrun.hpp"

#include <cmath>

namespace pvdyn {

void LongRunScenario::validate() const {
    if (years < 1) throw DimensionError("longrun scenario needs years >= 1");
    if (static_cast<int>(theta_path.size()) != years ||
        static_cast<int>(xi_path.size()) != years)
        throw DimensionError("cost paths must have one entry per year");
    for (double v : theta_path)
        if (!(v >= 0.0)) throw DimensionError("theta path entries must be nonnegative");
    for (double v : xi_path)
        if (!(v >= 0.0)) throw DimensionError("xi path entries must be nonnegative");
    if (!(initial_capacity_kw >= 0.0))
        throw DimensionError("initial capacity must be nonnegative");
}

std::vector<double> geometric_path(double initial, double growth_per_year, int years) {
    std::vector<double> path(static_cast<std::size_t>(std::max(years, 0)));
    double v = initial;
    for (auto& entry : path) {
        entry = v;
        v *= 1.0 + growth_per_year;
    }
    return path;
}

LongRunResult run_longrun(const MarketModel& model, const AdoptionModel& adoption,
                          const LongRunScenario& scenario) {
    scenario.validate();
    LongRunResult out;
    double capacity = scenario.initial_capacity_kw;
    for (int year = 0; year < scenario.years; ++year) {
        const auto next = step(model, adoption, scenario.policy, scenario.theta_path[year],
                               scenario.xi_path[year], capacity);
        if (!next) {
            out.outcome = RunOutcome::DeathSpiral;
            out.death_year = year;
            out.final_capacity_kw = capacity;
            return out;
        }
        YearRecord rec;
        rec.year = year;
        rec.capacity_kw = capacity;
        rec.new_capacity_kw = next->next_capacity_kw - capacity;
        rec.tariff = next->tariff;
        rec.consumer_surplus =
            expected_consumer_surplus(model, next->tariff, capacity) * model.cycles_per_year;
        rec.installation_cost = rec.new_capacity_kw * scenario.xi_path[year];
        out.records.push_back(std::move(rec));
        capacity = next->next_capacity_kw;
    }
    out.outcome = RunOutcome::MaxYearsReached;
    out.final_capacity_kw = capacity;
    return out;
}

double cumulative_social_welfare(const std::vector<YearRecord>& records) {
    double sw = 0.0;
    for (const YearRecord& rec : records) sw += rec.consumer_surplus - rec.installation_cost;
    return sw;
}

std::vector<SweepEntry> sweep_connection_charge(const MarketModel& model,
                                                const AdoptionModel& adoption,
                                                const std::vector<double>& charges, int years,
                                                double theta, double xi) {
    if (charges.empty()) throw DimensionError("connection charge grid must be nonempty");
    for (std::size_t i = 0; i < charges.size(); ++i)
        if (charges[i] < 0.0 || (i > 0 && charges[i] < charges[i - 1]))
            throw DimensionError("connection charge grid must be ascending and nonnegative");
    std::vector<SweepEntry> entries;
    entries.reserve(charges.size());
    for (double charge : charges) {
        LongRunScenario scenario;
        scenario.years = years;
        scenario.theta_path.assign(static_cast<std::size_t>(years), theta);
        scenario.xi_path.assign(static_cast<std::size_t>(years), xi);
        scenario.policy.kind = TariffPolicy::Kind::FixedCharge;
        scenario.policy.fixed_charge = charge;
        scenario.policy.dynamic_prices = false;
        scenario.initial_capacity_kw = 0.0;
        entries.push_back({charge, run_longrun(model, adoption, scenario)});
    }
    return entries;
}

}  // namespace pvdyn
