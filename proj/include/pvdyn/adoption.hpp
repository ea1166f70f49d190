#pragma once

#include "pvdyn/common.hpp"
#include "pvdyn/market.hpp"

namespace pvdyn {

/// Bass diffusion coefficients, per year. p is the innovation (external) rate
/// and q the imitation (word of mouth) rate.
struct BassParams {
    double innovation = 0.01;
    double imitation = 0.4;
};

/// Cumulative adoption fraction after t years from a zero start:
/// eta(t) = (1 - e^{-(p+q)t}) / (1 + (q/p) e^{-(p+q)t}). Exactly 0 at t <= 0
/// and approaches 1 from below.
double bass_eta(const BassParams& bass, double t_years);

/// Inverse of bass_eta on [0, 1). Values at or above 1 map to +infinity.
double bass_eta_inverse(const BassParams& bass, double fraction);

/// One year of diffusion toward a fixed potential: the current capacity is
/// located on the adoption curve scaled to the potential, advanced one year,
/// and rescaled. Capacity never shrinks; when the potential has fallen to or
/// below the installed base the base simply persists (panels stay on roofs).
double bass_step(const BassParams& bass, double potential_kw, double current_kw);

/// Adoption environment: diffusion speed, the saturation market size, and how
/// fast the adopter pool thins as the payback time grows. The install cost
/// xi is a per-call input because long-run scenarios move it year by year.
struct AdoptionModel {
    BassParams bass;
    double market_size_kw = 0.0;    // saturation capacity R^MS
    double potential_decay = 0.3;   // pool shrink rate per payback year

    void validate() const;
};

/// Expected bill savings per kW over one billing cycle, E[pi . r0].
double solar_value_per_cycle(const MarketModel& model, const PeriodVec& prices);

/// Years to recoup the install cost xi ($/kW) from bill savings; +infinity
/// when the tariff gives solar no value.
double payback_years(const MarketModel& model, const PeriodVec& prices, double xi);

/// Long-run adopter pool under the given prices:
/// market_size * exp(-decay * payback). Zero when payback is infinite; the
/// connection charge never enters.
double market_potential(const AdoptionModel& adoption, const MarketModel& model,
                        const PeriodVec& prices, double xi);

}  // namespace pvdyn
