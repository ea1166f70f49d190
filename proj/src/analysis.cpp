#include "pvdyn/analysis.hpp"

#include <cmath>
#include <limits>

#include "pvdyn/numeric.hpp"

namespace pvdyn {

std::vector<double> uniform_grid(double lo, double hi, int points) {
    if (points < 2 || !(hi > lo)) throw DimensionError("grid needs points >= 2 and hi > lo");
    std::vector<double> g(points);
    for (int i = 0; i < points; ++i) g[i] = lo + (hi - lo) * i / (points - 1);
    g.back() = hi;
    return g;
}

PotentialCurve potential_curve(const MarketModel& model, const AdoptionModel& adoption,
                               const TariffPolicy& policy, double theta, double xi,
                               const std::vector<double>& grid) {
    if (grid.empty()) throw DimensionError("potential curve needs a nonempty grid");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid[i] < 0.0 || (i > 0 && grid[i] <= grid[i - 1]))
            throw DimensionError("grid must be nonnegative and strictly increasing");
    }
    PotentialCurve curve;
    curve.grid = grid;
    curve.values.resize(grid.size(), std::numeric_limits<double>::quiet_NaN());
    curve.feasible.resize(grid.size(), false);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto tariff = apply_policy(model, policy, theta, grid[i]);
        if (!tariff) continue;
        curve.feasible[i] = true;
        curve.values[i] = market_potential(adoption, model, tariff->volumetric_price, xi);
    }
    return curve;
}

namespace {

// First maximal run of consecutive feasible samples; the dynamics live there
// because adoption only moves upward and cannot jump an infeasible gap.
struct FeasibleRun {
    int begin = -1, end = -1;  // inclusive grid indices, begin <= end
};

FeasibleRun first_feasible_run(const PotentialCurve& curve) {
    FeasibleRun run;
    for (std::size_t i = 0; i < curve.grid.size(); ++i) {
        if (curve.feasible[i]) {
            run.begin = static_cast<int>(i);
            break;
        }
    }
    if (run.begin < 0) return run;
    run.end = run.begin;
    while (run.end + 1 < static_cast<int>(curve.grid.size()) && curve.feasible[run.end + 1])
        ++run.end;
    return run;
}

}  // namespace

EquilibriumReport classify_equilibria(const PotentialCurve& curve) {
    const FeasibleRun run = first_feasible_run(curve);
    if (run.begin < 0 || run.end - run.begin + 1 < 2)
        throw EmptyFeasibleRegionError("potential curve has fewer than 2 feasible samples");

    const double eps = 1e-9 * std::max(1.0, curve.grid[run.end]);
    auto gap = [&](int i) { return curve.values[i] - curve.grid[i]; };
    auto sgn = [&](int i) {
        const double d = gap(i);
        return d > eps ? +1 : (d < -eps ? -1 : 0);
    };

    EquilibriumReport report;
    report.critical_level_kw = curve.grid[run.end];

    for (int i = run.begin; i <= run.end; ++i) {
        if (sgn(i) == 0) {
            if (i > run.begin && sgn(i - 1) == 0) continue;  // plateau: report once
            Equilibrium eq;
            eq.capacity_kw = curve.grid[i];
            const int right = i < run.end ? sgn(i + 1) : 0;
            const int left = i > run.begin ? sgn(i - 1) : 0;
            eq.stable = right <= 0;  // headroom gone just above: adoption parks
            eq.tangent = left == right && left != 0;
            report.equilibria.push_back(eq);
        } else if (i < run.end && sgn(i) * sgn(i + 1) == -1) {
            const double d0 = gap(i), d1 = gap(i + 1);
            Equilibrium eq;
            eq.capacity_kw =
                curve.grid[i] + d0 * (curve.grid[i + 1] - curve.grid[i]) / (d0 - d1);
            eq.stable = sgn(i) == +1;
            report.equilibria.push_back(eq);
        }
    }

    for (std::size_t k = 0; k < report.equilibria.size(); ++k) {
        if (!report.equilibria[k].stable) continue;
        for (std::size_t j = k; j-- > 0;) {
            if (!report.equilibria[j].stable) {
                report.equilibria[k].basin_left_edge_kw = report.equilibria[j].capacity_kw;
                break;
            }
        }
    }

    const bool cliff_visible = run.end + 1 < static_cast<int>(curve.grid.size());
    if (cliff_visible && sgn(run.end) == +1) {
        double lo = curve.grid[run.begin];
        for (int i = run.end; i >= run.begin; --i) {
            if (sgn(i) <= 0) {
                lo = curve.grid[i];
                if (i < run.end && sgn(i) == -1 && sgn(i + 1) == +1) {
                    const double d0 = gap(i), d1 = gap(i + 1);
                    lo = curve.grid[i] + d0 * (curve.grid[i + 1] - curve.grid[i]) / (d0 - d1);
                }
                break;
            }
        }
        report.death_spiral_predicted_from = {lo, report.critical_level_kw};
    }
    return report;
}

double critical_adoption_level(const MarketModel& model, double fixed_charge, double theta,
                               bool flat, double capacity_max_kw) {
    if (capacity_max_kw <= 0.0) throw DimensionError("capacity_max must be positive");
    auto infeasible = [&](double r) {
        return max_retail_margin(model, r, flat).value +
                   model.num_consumers * fixed_charge - theta <
               0.0;
    };
    if (infeasible(0.0))
        throw NoFeasibleRegionError("cost exceeds the best margin even with no solar");
    if (!infeasible(capacity_max_kw)) return capacity_max_kw;
    const auto bracket =
        bisect_boolean(infeasible, 0.0, capacity_max_kw, 1e-9 * std::max(1.0, capacity_max_kw));
    return bracket.lo;
}

SpiralPrediction predict_death_spiral(const MarketModel& model, const AdoptionModel& adoption,
                                      const TariffPolicy& policy, double theta, double xi,
                                      double initial_capacity_kw, int grid_points) {
    const double market = adoption.market_size_kw;
    const double r0 = std::clamp(initial_capacity_kw, 0.0, market);
    const PotentialCurve curve = potential_curve(
        model, adoption, policy, theta, xi, uniform_grid(0.0, market, grid_points));
    const FeasibleRun run = first_feasible_run(curve);

    SpiralPrediction out;
    out.critical_level_kw = run.begin >= 0 ? curve.grid[run.end] : 0.0;
    out.monotone = true;
    if (run.begin >= 0) {
        const double slack = 1e-9 * std::max(1.0, market);
        for (int i = run.begin; i < run.end; ++i)
            if (curve.values[i + 1] < curve.values[i] - slack) out.monotone = false;
    }

    const auto tariff0 = apply_policy(model, policy, theta, r0);
    if (!tariff0) {
        out.spiral = true;
        out.infeasible_at_start = true;
        out.exact = true;
        return out;
    }
    const double p0 = market_potential(adoption, model, tariff0->volumetric_price, xi);
    if (p0 <= r0) {
        out.spiral = false;
        out.frozen_at_start = true;
        out.exact = true;
        return out;
    }

    out.spiral = false;
    for (std::size_t i = 0; i < curve.grid.size(); ++i) {
        if (curve.grid[i] <= r0) continue;
        if (!curve.feasible[i]) {
            out.spiral = true;  // positive gap held all the way into the cliff
            break;
        }
        if (curve.values[i] - curve.grid[i] <= 0.0) break;  // parking point blocks the climb
    }
    out.exact = out.monotone;
    return out;
}

double theta_dagger(const MarketModel& model, const AdoptionModel& adoption,
                    const TariffPolicy& policy, double xi, double theta_lo, double theta_hi) {
    if (!(theta_hi > theta_lo)) throw DimensionError("theta range must be increasing");
    auto spirals = [&](double theta) {
        return predict_death_spiral(model, adoption, policy, theta, xi, 0.0).spiral;
    };
    if (spirals(theta_lo))
        throw NoBracketError("death spiral already predicted at the low end of theta range");
    if (!spirals(theta_hi))
        throw NoBracketError("no death spiral predicted at the high end of theta range");
    const auto bracket =
        bisect_boolean(spirals, theta_lo, theta_hi, 1e-6 * std::max(1.0, theta_hi));
    return bracket.hi;
}

double critical_connection_charge(const MarketModel& model, double theta,
                                  double capacity_max_kw, bool flat) {
    const double min_margin = theta_sharp(model, capacity_max_kw, flat);
    return std::max(0.0, (theta - min_margin) / model.num_consumers);
}

LimitingCharge limiting_connection_charge(const MarketModel& model,
                                          const AdoptionModel& adoption, double theta,
                                          double xi, bool flat) {
    TariffPolicy base;
    base.kind = flat ? TariffPolicy::Kind::RamseyFlat : TariffPolicy::Kind::RamseyLinear;
    if (!predict_death_spiral(model, adoption, base, theta, xi, 0.0).spiral) {
        const Trajectory traj = simulate(model, adoption, base, theta, xi, 0.0);
        return {0.0, traj.final_capacity_kw};
    }

    auto fixed = [&](double charge) {
        TariffPolicy p;
        p.kind = TariffPolicy::Kind::FixedCharge;
        p.fixed_charge = charge;
        p.dynamic_prices = !flat;
        return p;
    };
    auto stabilizes = [&](double charge) {
        return !predict_death_spiral(model, adoption, fixed(charge), theta, xi, 0.0).spiral;
    };

    double hi = critical_connection_charge(model, theta, adoption.market_size_kw, flat);
    if (hi <= 0.0 || !stabilizes(hi)) {
        hi = theta / model.num_consumers;  // zero-markup charge covers theta outright
        if (!stabilizes(hi))
            throw NoStabilizingChargeError(
                "even the zero-markup connection charge fails to stabilize adoption");
    }
    const auto bracket = bisect_boolean(stabilizes, 0.0, hi, 1e-6 * hi);
    const double charge = bracket.hi;

    for (double nudge : {1e-6, 1e-4, 1e-2}) {
        const Trajectory traj =
            simulate(model, adoption, fixed(charge * (1.0 + nudge)), theta, xi, 0.0);
        if (traj.outcome != RunOutcome::DeathSpiral) return {charge, traj.final_capacity_kw};
    }
    throw NoStabilizingChargeError(
        "trajectory still spirals just above the predicted stabilizing charge");
}

LimitingCapacity limiting_capacity(const MarketModel& model, const AdoptionModel& adoption,
                                   double xi, bool flat, double theta_lo, double theta_hi) {
    if (!(theta_hi > theta_lo)) throw DimensionError("theta range must be increasing");
    TariffPolicy policy;
    policy.kind = flat ? TariffPolicy::Kind::RamseyFlat : TariffPolicy::Kind::RamseyLinear;
    const double market = adoption.market_size_kw;

    auto critical = [&](double theta) -> std::optional<double> {
        try {
            return critical_adoption_level(model, 0.0, theta, flat, market);
        } catch (const NoFeasibleRegionError&) {
            return std::nullopt;
        }
    };
    auto potential_at = [&](double theta, double r) {
        for (double back : {0.0, 1e-9, 1e-6}) {
            const auto tariff = apply_policy(model, policy, theta, r * (1.0 - back));
            if (tariff)
                return market_potential(adoption, model, tariff->volumetric_price, xi);
        }
        return 0.0;
    };
    // Headroom at the feasibility edge; +inf once theta kills the whole
    // region (the edge has collapsed to zero capacity with positive pool).
    auto h = [&](double theta) {
        const auto r = critical(theta);
        if (!r) return std::numeric_limits<double>::infinity();
        return potential_at(theta, *r) - *r;
    };

    if (!(h(theta_lo) < 0.0))
        throw NoBracketError("feasibility edge already below the adopter pool at theta_lo");
    if (!(h(theta_hi) > 0.0))
        throw NoBracketError("adopter pool still below the feasibility edge at theta_hi");
    const RootResult root =
        bisect_root(h, theta_lo, theta_hi, 1e-6 * std::max(1.0, theta_hi), 0.0);

    LimitingCapacity out;
    out.theta = root.x;
    std::optional<double> redge = critical(out.theta);
    for (int tries = 0; !redge && tries < 4; ++tries) {
        out.theta *= 1.0 - 1e-9;
        redge = critical(out.theta);
    }
    if (!redge) throw NoBracketError("feasibility edge undefined at the located fixed point");
    out.capacity_kw = *redge;

    // Sampled backing for the fixed-point argument: the edge headroom target
    // p(R_critical(theta)) should grow with theta, and the pool at the edge
    // should top every pool value below it.
    const double slack = 1e-6 * std::max(1.0, market);
    double prev = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < 9; ++i) {
        const double theta = theta_lo + (theta_hi - theta_lo) * i / 8.0;
        const auto r = critical(theta);
        if (!r) continue;
        const double q = potential_at(theta, *r);
        if (q < prev - slack) out.assumptions_ok = false;
        prev = q;
        if (i % 2 == 0) {
            for (int j = 1; j <= 8; ++j) {
                const double rj = *r * j / 8.0;
                const auto tariff = apply_policy(model, policy, theta, rj);
                if (!tariff) continue;
                if (market_potential(adoption, model, tariff->volumetric_price, xi) >
                    q + slack)
                    out.assumptions_ok = false;
            }
        }
    }
    return out;
}

}  // namespace pvdyn
