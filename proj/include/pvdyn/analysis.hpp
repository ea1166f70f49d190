#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "pvdyn/dynamics.hpp"

namespace pvdyn {

/// Sampled market potential function p(R): the long-run adopter pool the
/// policy's tariff would support at each installed capacity. Values are NaN
/// where no revenue-adequate tariff exists.
struct PotentialCurve {
    std::vector<double> grid;     // kW, strictly increasing
    std::vector<double> values;   // p(grid[i]), kW
    std::vector<bool> feasible;   // break-even tariff exists at grid[i]
};

std::vector<double> uniform_grid(double lo, double hi, int points);

PotentialCurve potential_curve(const MarketModel& model, const AdoptionModel& adoption,
                               const TariffPolicy& policy, double theta, double xi,
                               const std::vector<double>& grid);

struct Equilibrium {
    double capacity_kw = 0.0;
    bool stable = false;
    /// Left edge of the basin flowing into this equilibrium (the unstable
    /// crossing below it); empty when the basin extends to the grid start.
    std::optional<double> basin_left_edge_kw;
    /// Touching point without sign change; the stable side is undetermined.
    bool tangent = false;
};

/// Fixed-point structure of one sampled potential curve. Crossings of
/// p(R) = R located by linear interpolation between grid samples; a crossing
/// from above (p - R changes + to -) is stable, from below unstable.
struct EquilibriumReport {
    std::vector<Equilibrium> equilibria;
    double critical_level_kw = 0.0;  // last feasible point of the first feasible run
    /// Initial capacities from which a death spiral is predicted: the open
    /// slice above the last non-positive-gap point up to the critical level.
    /// Empty when the gap closes before the feasibility cliff or no cliff is
    /// visible in the grid.
    std::optional<std::pair<double, double>> death_spiral_predicted_from;
};

EquilibriumReport classify_equilibria(const PotentialCurve& curve);

/// Largest capacity in [0, capacity_max] at which some revenue-adequate
/// tariff exists: bisection on the feasibility residual
/// g(R) = max margin(R) + M A - theta, treated as one-crossing per the
/// monotone-margin regime. Returns capacity_max when feasible throughout;
/// throws NoFeasibleRegionError when even R = 0 cannot cover theta.
double critical_adoption_level(const MarketModel& model, double fixed_charge, double theta,
                               bool flat, double capacity_max_kw);

struct SpiralPrediction {
    bool spiral = false;
    bool monotone = false;  // sampled p nondecreasing over the feasible run
    bool exact = false;     // verdict is necessary-and-sufficient, not only sufficient
    bool infeasible_at_start = false;  // no tariff exists already at R0
    bool frozen_at_start = false;      // p(R0) <= R0, adoption parks immediately
    double critical_level_kw = 0.0;
};

/// Predicts whether the closed loop from R0 ends in a death spiral: marches
/// the sampled potential curve upward from R0 and asks whether the positive
/// headroom gap persists all the way into the feasibility cliff, with no
/// parking point in between. Exact for monotone sampled curves, otherwise a
/// sufficient check on the sampled grid.
SpiralPrediction predict_death_spiral(const MarketModel& model, const AdoptionModel& adoption,
                                      const TariffPolicy& policy, double theta, double xi,
                                      double initial_capacity_kw, int grid_points = 513);

/// Smallest retailer cost at which the policy (started from R0 = 0) tips
/// into a predicted death spiral, located by boolean bisection to 1e-6
/// relative. The range must bracket the transition: stable at theta_lo,
/// spiral at theta_hi, else NoBracketError.
double theta_dagger(const MarketModel& model, const AdoptionModel& adoption,
                    const TariffPolicy& policy, double xi, double theta_lo, double theta_hi);

/// Connection charge (theta - theta_sharp)/M that guarantees a stable
/// adoption under a fixed-charge tariff, floored at zero.
double critical_connection_charge(const MarketModel& model, double theta,
                                  double capacity_max_kw, bool flat);

struct LimitingCharge {
    double charge = 0.0;       // A-dagger, $/day
    double capacity_kw = 0.0;  // stable equilibrium reached just above it
};

/// Minimum fixed connection charge that keeps the fixed-charge policy out of
/// a death spiral from R0 = 0, plus the equilibrium capacity just above the
/// threshold. When the plain break-even policy (charge 0) is already stable
/// the charge is 0 and the capacity is its equilibrium. Throws
/// NoStabilizingChargeError if even the zero-markup charge theta/M fails.
LimitingCharge limiting_connection_charge(const MarketModel& model,
                                          const AdoptionModel& adoption, double theta,
                                          double xi, bool flat);

struct LimitingCapacity {
    double capacity_kw = 0.0;  // supremum of stably reachable capacities
    double theta = 0.0;        // cost level at which it is attained
    bool assumptions_ok = true;  // sampled monotonicity checks behind the fixed point
};

/// Supremum of capacities reachable by stable adoption across break-even
/// fixed-charge tariffs: the fixed point of p(R_critical(theta)) =
/// R_critical(theta) in theta, found by bisection over the given range.
/// Throws NoBracketError when the range does not straddle the fixed point.
LimitingCapacity limiting_capacity(const MarketModel& model, const AdoptionModel& adoption,
                                   double xi, bool flat, double theta_lo, double theta_hi);

}  // namespace pvdyn
