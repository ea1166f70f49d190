#include "pvdyn/dynamics.hpp"

#include <cmath>

namespace pvdyn {

std::optional<StepResult> step(const MarketModel& model, const AdoptionModel& adoption,
                               const TariffPolicy& policy, double theta, double xi,
                               double capacity_kw) {
    const auto tariff = apply_policy(model, policy, theta, capacity_kw);
    if (!tariff) return std::nullopt;
    const double potential = market_potential(adoption, model, tariff->volumetric_price, xi);
    StepResult out;
    out.tariff = *tariff;
    out.next_capacity_kw = bass_step(adoption.bass, potential, capacity_kw);
    return out;
}

Trajectory simulate(const MarketModel& model, const AdoptionModel& adoption,
                    const TariffPolicy& policy, double theta, double xi,
                    double initial_capacity_kw, const SimulateOptions& options) {
    const double tol = options.capacity_tol_kw > 0.0
                           ? options.capacity_tol_kw
                           : 1e-6 * std::max(adoption.market_size_kw, 1.0);
    Trajectory traj;
    double capacity = std::max(0.0, initial_capacity_kw);
    int streak = 0;
    for (int year = 0; year < options.max_years; ++year) {
        const auto next = step(model, adoption, policy, theta, xi, capacity);
        if (!next) {
            traj.states.push_back({Tariff{}, capacity});
            traj.final_capacity_kw = capacity;
            traj.outcome = RunOutcome::DeathSpiral;
            traj.death_year = year;
            return traj;
        }
        traj.states.push_back({next->tariff, capacity});
        streak = std::abs(next->next_capacity_kw - capacity) <= tol ? streak + 1 : 0;
        capacity = next->next_capacity_kw;
        if (streak >= options.converge_streak) {
            traj.final_capacity_kw = capacity;
            traj.outcome = RunOutcome::Converged;
            return traj;
        }
    }
    traj.final_capacity_kw = capacity;
    traj.outcome = RunOutcome::MaxYearsReached;
    if (traj.states.empty()) traj.states.push_back({Tariff{}, capacity});  // max_years == 0
    return traj;
}

}  // namespace pvdyn
