#include "pvdyn/tariff.hpp"

#include <cmath>

#include "margin_pieces.hpp"

namespace pvdyn {

double break_even_tolerance(double theta) { return 1e-9 * std::max(1.0, theta); }

std::optional<Tariff> ramsey_flat(const MarketModel& model, double theta, double capacity_kw,
                                  double fixed_charge) {
    const double target = theta - model.num_consumers * fixed_charge;
    detail::MarginPieces pieces(detail::margin_cells_flat(model), model.demand_slope,
                                capacity_kw);
    const auto root = pieces.smallest_root(target, break_even_tolerance(theta));
    if (!root) return std::nullopt;
    return make_flat_tariff(*root, fixed_charge, model.periods_per_cycle);
}

namespace {

Tariff priced_tariff(PeriodVec prices, double fixed_charge) {
    Tariff t;
    t.connection_charge = fixed_charge;
    t.class_tag = classify_tariff(fixed_charge, prices);
    t.volumetric_price = std::move(prices);
    return t;
}

}  // namespace

std::optional<Tariff> ramsey_linear(const MarketModel& model, double theta, double capacity_kw,
                                    double fixed_charge) {
    const int n = model.periods_per_cycle;
    const double b = model.demand_slope;
    const double target = theta - model.num_consumers * fixed_charge;
    const double ftol = break_even_tolerance(theta);

    PeriodVec abar = PeriodVec::Zero(n), lbar = PeriodVec::Zero(n), rbar = PeriodVec::Zero(n);
    PeriodVec xtop = PeriodVec::Zero(n);
    for (const Scenario& s : model.scenarios) {
        abar += s.probability * s.demand_intercept;
        lbar += s.probability * s.wholesale_price;
        rbar += s.probability * s.solar_unit_output;
        xtop = xtop.max(s.demand_intercept / b);
    }

    // Price path indexed by t. Prices are capped at the top choke price:
    // beyond it a period's margin is flat or falling, so the cap never hides
    // a break-even point.
    auto path = [&](double t) {
        PeriodVec pi(n);
        for (int i = 0; i < n; ++i) {
            const double raw = (t * (abar[i] - capacity_kw * rbar[i]) + b * lbar[i]) /
                               (b * (1.0 + t));
            pi[i] = std::clamp(raw, 0.0, xtop[i]);
        }
        return pi;
    };
    auto margin_of = [&](const PeriodVec& pi) {
        return expected_energy_margin(model, pi, capacity_kw);
    };
    auto found = [&](PeriodVec pi) { return priced_tariff(std::move(pi), fixed_charge); };

    const MarginResult best = max_retail_margin(model, capacity_kw, false);
    if (best.value < target - ftol) return std::nullopt;

    // Bisects margin(prices(u)) - target over u in [ulo, uhi]; the margin is
    // continuous in u, so a sign-bracketed interval always closes.
    auto bisect_map = [&](auto prices_at, double ulo, double uhi,
                          double mlo) -> std::optional<Tariff> {
        const bool lo_below = mlo < target;
        for (int it = 0; it < 200; ++it) {
            const double um = 0.5 * (ulo + uhi);
            const PeriodVec pi = prices_at(um);
            const double mm = margin_of(pi);
            if (std::abs(mm - target) <= ftol) return found(pi);
            if ((mm < target) == lo_below)
                ulo = um;
            else
                uhi = um;
        }
        return std::nullopt;
    };

    const double m0 = margin_of(path(0.0));
    if (std::abs(m0 - target) <= ftol) return found(path(0.0));

    const int max_march = 54;
    if (m0 < target) {
        double prev_t = 0.0, prev_m = m0;
        for (int k = 1; k <= max_march; ++k) {
            const double t = 1.0 - std::pow(2.0, -k);
            const double m = margin_of(path(t));
            if (std::abs(m - target) <= ftol) return found(path(t));
            if (m > target) return bisect_map(path, prev_t, t, prev_m);
            prev_t = t;
            prev_m = m;
        }
        // The clamped path saturates short of the target, but the exact
        // per-period maximizer covers it: blend the endpoint toward it.
        const PeriodVec end = path(prev_t);
        const PeriodVec& top = best.price.volumetric_price;
        if (std::abs(best.value - target) <= ftol) return found(top);
        auto blend = [&](double s) { return PeriodVec((1.0 - s) * end + s * top); };
        return bisect_map(blend, 0.0, 1.0, prev_m);
    }

    // Margin above target at marginal-cost prices: walk down the path.
    double prev_t = 0.0, prev_m = m0;
    for (int k = 1; k <= max_march; ++k) {
        const double t = -(1.0 - std::pow(2.0, -k));
        const double m = margin_of(path(t));
        if (std::abs(m - target) <= ftol) return found(path(t));
        if (m < target) return bisect_map(path, t, prev_t, m);
        prev_t = t;
        prev_m = m;
    }
    const PeriodVec end = path(prev_t);
    const PeriodVec floor = PeriodVec::Zero(n);
    const double m_floor = margin_of(floor);
    if (m_floor > target - ftol) return found(floor);  // surplus never binds above free energy
    auto blend = [&](double s) { return PeriodVec((1.0 - s) * end + s * floor); };
    return bisect_map(blend, 0.0, 1.0, prev_m);
}

Tariff ramsey_two_part(const MarketModel& model, double theta, double capacity_kw) {
    PeriodVec lbar = PeriodVec::Zero(model.periods_per_cycle);
    for (const Scenario& s : model.scenarios) lbar += s.probability * s.wholesale_price;
    const double margin = expected_energy_margin(model, lbar, capacity_kw);
    Tariff t;
    t.volumetric_price = std::move(lbar);
    t.connection_charge = (theta - margin) / model.num_consumers;
    t.class_tag = TariffClass::TwoPart;
    return t;
}

std::optional<Tariff> apply_policy(const MarketModel& model, const TariffPolicy& policy,
                                   double theta, double capacity_kw) {
    switch (policy.kind) {
        case TariffPolicy::Kind::RamseyFlat:
            return ramsey_flat(model, theta, capacity_kw, 0.0);
        case TariffPolicy::Kind::RamseyLinear:
            return ramsey_linear(model, theta, capacity_kw, 0.0);
        case TariffPolicy::Kind::RamseyTwoPart:
            return ramsey_two_part(model, theta, capacity_kw);
        case TariffPolicy::Kind::FixedCharge:
            return policy.dynamic_prices
                       ? ramsey_linear(model, theta, capacity_kw, policy.fixed_charge)
                       : ramsey_flat(model, theta, capacity_kw, policy.fixed_charge);
    }
    throw DomainError("unknown tariff policy kind");
}

}  // namespace pvdyn
