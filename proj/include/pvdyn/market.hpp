#pragma once

#include <optional>
#include <vector>

#include "pvdyn/common.hpp"

namespace pvdyn {

/// One realization of the stochastic market environment over a billing cycle.
/// demand_intercept is the aggregate choke quantity per period (kWh at price
/// zero, summed over all consumers); wholesale_price is $/kWh; and
/// solar_unit_output is the kWh produced per period per kW of installed
/// capacity.
struct Scenario {
    double probability = 1.0;
    PeriodVec demand_intercept;
    PeriodVec wholesale_price;
    PeriodVec solar_unit_output;
};

/// Aggregate market environment: a finite scenario set (so every expectation
/// is an exact weighted sum), a common linear demand slope, and the consumer
/// and period counts.
struct MarketModel {
    std::vector<Scenario> scenarios;
    double demand_slope = 1.0;      // aggregate kWh per ($/kWh), per period
    double num_consumers = 1.0;     // M
    int periods_per_cycle = 1;      // N
    double cycles_per_year = 365.0;

    /// Throws std::invalid_argument on any violated invariant
    /// (probabilities summing to 1 within 1e-12, matching vector lengths,
    /// nonnegative intercepts and solar output, positive slope).
    void validate() const;
};

enum class TariffClass { Flat, Linear, TwoPart };

/// A concrete tariff: daily connection charge per consumer plus a per-period
/// volumetric price vector. Flat tariffs carry the same price in every entry.
struct Tariff {
    double connection_charge = 0.0;  // A, $/day per consumer
    PeriodVec volumetric_price;      // pi, $/kWh
    TariffClass class_tag = TariffClass::Flat;

    bool has_prices() const { return volumetric_price.size() > 0; }
    double mean_price() const {
        return has_prices() ? volumetric_price.mean() : 0.0;
    }
    void validate(int periods_per_cycle) const;
};

/// Builds a flat tariff with the given scalar price replicated across periods.
Tariff make_flat_tariff(double price, double connection_charge, int periods_per_cycle);

/// Picks the narrowest class a (charge, price-vector) pair belongs to.
TariffClass classify_tariff(double connection_charge, const PeriodVec& prices);

// ---------------------------------------------------------------------------
// Surplus accounting
// ---------------------------------------------------------------------------

/// Aggregate linear demand under a tariff in one scenario, clamped at zero:
/// D_n = max(0, a_n - b * pi_n).
PeriodVec demand(const MarketModel& model, const Tariff& tariff, const Scenario& scenario);

/// Expected consumer surplus in $/cycle: quadratic-utility gross surplus
/// sum_n D_n^2 / (2b), plus the net-metering credit pi' * R * r0, minus the
/// total connection charge M*A.
double expected_consumer_surplus(const MarketModel& model, const Tariff& tariff,
                                 double capacity_kw);

/// Expected retail surplus in $/cycle: energy margin on net consumption plus
/// connection-charge revenue minus the retailer cost theta.
double expected_retail_surplus(const MarketModel& model, const Tariff& tariff,
                               double theta, double capacity_kw);

/// Expected energy margin at the given prices and capacity, i.e. the retail
/// surplus with A = 0 and theta = 0.
double expected_energy_margin(const MarketModel& model, const PeriodVec& prices,
                              double capacity_kw);

// ---------------------------------------------------------------------------
// Margin maximization
// ---------------------------------------------------------------------------

struct MarginResult {
    Tariff price;  // maximizing volumetric prices, connection charge 0
    double value = 0.0;
};

/// Maximizes the expected energy margin over volumetric prices in
/// [0, max choke price]. The margin is piecewise quadratic in each price
/// (the demand clamp introduces kinks), so the maximizer is found exactly by
/// enumerating piece vertices and breakpoints. With flat = true a single
/// scalar price is optimized; otherwise each period independently.
MarginResult max_retail_margin(const MarketModel& model, double capacity_kw, bool flat);

/// min over R in [0, capacity_max] of the maximal energy margin; the
/// objective is convex in R (pointwise max of affine functions), solved by
/// golden-section search.
double theta_sharp(const MarketModel& model, double capacity_max_kw, bool flat);

// ---------------------------------------------------------------------------
// Calibration from headline anchors
// ---------------------------------------------------------------------------

/// Shapes for one calibration scenario. demand_shape entries are relative
/// weights (normalized internally to mean 1 across the scenario set); an
/// empty shape means uniform.
struct AnchorScenario {
    double probability = 1.0;
    PeriodVec wholesale_price;
    PeriodVec solar_unit_output;
    PeriodVec demand_shape;
};

struct CalibrationAnchors {
    double connection_charge = 0.0;   // A, $/day
    double flat_price = 0.0;          // pi, $/kWh
    double theta = 0.0;               // retailer cost, $/day
    double consumer_surplus = 0.0;    // cs at zero capacity, $/day
    double num_consumers = 1.0;       // M
    int periods_per_cycle = 1;        // N
    double cycles_per_year = 365.0;
    std::vector<AnchorScenario> scenarios;  // empty => flat default profiles
};

/// Solves for the demand slope b and mean demand intercept so that the
/// anchor tariff exactly breaks even at the anchor cost and reproduces the
/// anchor consumer surplus at zero solar capacity. Residuals are verified
/// against the exact surplus evaluators to 1e-8 relative; throws
/// NoSolutionError when the residual system has no admissible root with
/// b > 0 (including the degenerate zero-margin case).
MarketModel calibrate_reference(const CalibrationAnchors& anchors);

}  // namespace pvdyn
