#pragma once

#include <optional>
#include <vector>

#include "pvdyn/adoption.hpp"
#include "pvdyn/market.hpp"
#include "pvdyn/tariff.hpp"

namespace pvdyn {

/// One year of the closed loop: the tariff in force and the installed
/// capacity at the start of that year. A state with no prices marks the year
/// the regulator found no revenue-adequate tariff.
struct SystemState {
    Tariff tariff;
    double capacity_kw = 0.0;
};

/// Tariff set at the current capacity plus the capacity one year later.
struct StepResult {
    Tariff tariff;
    double next_capacity_kw = 0.0;
};

/// Advances the loop one year: re-balance the tariff at the installed
/// capacity, then let adoption respond at install cost xi. nullopt when no
/// revenue-adequate tariff exists at this capacity (the death-spiral
/// terminal event).
std::optional<StepResult> step(const MarketModel& model, const AdoptionModel& adoption,
                               const TariffPolicy& policy, double theta, double xi,
                               double capacity_kw);

enum class RunOutcome { Converged, DeathSpiral, MaxYearsReached };

struct SimulateOptions {
    int max_years = 200;
    /// |R_{k+1} - R_k| threshold counted toward convergence; 0 means
    /// 1e-6 * max(market_size_kw, 1).
    double capacity_tol_kw = 0.0;
    int converge_streak = 3;  // consecutive sub-threshold steps required
};

struct Trajectory {
    std::vector<SystemState> states;  // states[k] = year k, never empty
    double final_capacity_kw = 0.0;   // capacity after the last completed step
    RunOutcome outcome = RunOutcome::MaxYearsReached;
    int death_year = -1;              // year of the terminal event, else -1
};

/// Runs the yearly loop from the given initial capacity until the capacity
/// settles, the tariff fails, or the year budget runs out.
Trajectory simulate(const MarketModel& model, const AdoptionModel& adoption,
                    const TariffPolicy& policy, double theta, double xi,
                    double initial_capacity_kw, const SimulateOptions& options = {});

}  // namespace pvdyn
