#pragma once

#include <vector>

#include "pvdyn/dynamics.hpp"

namespace pvdyn {

/// Fixed-horizon run with exogenous year-by-year cost paths (retailer cost
/// drifting up, install cost drifting down, or any custom path).
struct LongRunScenario {
    int years = 0;
    std::vector<double> theta_path;  // $/cycle, one entry per year
    std::vector<double> xi_path;     // $/kW, one entry per year
    TariffPolicy policy;
    double initial_capacity_kw = 0.0;

    void validate() const;
};

/// Builds a geometric path value_0 * (1+growth)^k, k = 0..years-1.
std::vector<double> geometric_path(double initial, double growth_per_year, int years);

struct YearRecord {
    int year = 0;
    double capacity_kw = 0.0;       // installed base at the start of the year
    double new_capacity_kw = 0.0;   // added during the year
    Tariff tariff;
    double consumer_surplus = 0.0;    // $/year: cycle surplus x cycles_per_year
    double installation_cost = 0.0;   // $/year: new capacity x that year's xi
};

struct LongRunResult {
    std::vector<YearRecord> records;  // truncated at the death-spiral year
    RunOutcome outcome = RunOutcome::MaxYearsReached;
    int death_year = -1;
    double final_capacity_kw = 0.0;
};

LongRunResult run_longrun(const MarketModel& model, const AdoptionModel& adoption,
                          const LongRunScenario& scenario);

/// Sum of yearly consumer surplus minus PV spending, each install increment
/// charged at its purchase-year price.
double cumulative_social_welfare(const std::vector<YearRecord>& records);

struct SweepEntry {
    double charge = 0.0;  // fixed connection charge for this run
    LongRunResult result;
};

/// Runs the fixed-charge policy (flat volumetric prices) over the same
/// horizon for every connection charge in the ascending grid, at constant
/// theta and xi.
std::vector<SweepEntry> sweep_connection_charge(const MarketModel& model,
                                                const AdoptionModel& adoption,
                                                const std::vector<double>& charges, int years,
                                                double theta, double xi);

}  // namespace pvdyn
