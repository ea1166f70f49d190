#pragma once

#include <optional>

#include "pvdyn/market.hpp"

namespace pvdyn {

/// Regulated tariff-setting rules, all enforcing the retailer break-even
/// constraint. The Ramsey rules maximize consumer surplus subject to it;
/// FixedCharge pins the connection charge and lets the volumetric price
/// balance the budget.
struct TariffPolicy {
    enum class Kind {
        RamseyFlat,     // single volumetric price, no connection charge
        RamseyLinear,   // per-period prices on the inverse-elasticity path
        RamseyTwoPart,  // pi = E[lambda], connection charge balances
        FixedCharge,    // connection charge pinned, volumetric price balances
    };
    Kind kind = Kind::RamseyFlat;
    double fixed_charge = 0.0;   // only read by FixedCharge
    bool dynamic_prices = false; // FixedCharge: per-period instead of flat
};

/// Break-even tolerance used by every solver: |retail surplus| per cycle.
double break_even_tolerance(double theta);

/// Smallest flat volumetric price whose retail surplus vanishes given the
/// fixed connection charge; smallest because consumer surplus falls with the
/// price, so the low root is the Ramsey-optimal one. nullopt when no price
/// covers the residual cost: the death-spiral outcome, not an error.
std::optional<Tariff> ramsey_flat(const MarketModel& model, double theta, double capacity_kw,
                                  double fixed_charge = 0.0);

/// Break-even per-period prices on the inverse-elasticity path
/// pi_n(t) = (t (abar_n - R rbar_n) + b lbar_n) / (b (1 + t)), t in (-1, 1),
/// taking the lowest-price branch. t = 0 is expected-marginal-cost pricing;
/// t -> 1 approaches the unconstrained margin maximizer. When the clamped
/// path saturates below the required margin but the true per-period maximum
/// still covers it, the path endpoint is blended toward the exact maximizer
/// to close the gap.
std::optional<Tariff> ramsey_linear(const MarketModel& model, double theta, double capacity_kw,
                                    double fixed_charge = 0.0);

/// Expected-marginal-cost prices with the connection charge absorbing the
/// entire residual (theta - energy margin) / M. Always succeeds; the charge
/// can come out negative (a rebate) when margins exceed cost. The volumetric
/// price never depends on capacity.
Tariff ramsey_two_part(const MarketModel& model, double theta, double capacity_kw);

/// Dispatches on the policy kind. nullopt = no revenue-adequate tariff.
std::optional<Tariff> apply_policy(const MarketModel& model, const TariffPolicy& policy,
                                   double theta, double capacity_kw);

}  // namespace pvdyn
