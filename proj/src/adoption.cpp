#include "pvdyn/adoption.hpp"

#include <cmath>
#include <limits>

namespace pvdyn {

double bass_eta(const BassParams& bass, double t_years) {
    if (t_years <= 0.0) return 0.0;
    const double p = bass.innovation, q = bass.imitation;
    const double decay = std::exp(-(p + q) * t_years);
    return (1.0 - decay) / (1.0 + (q / p) * decay);
}

double bass_eta_inverse(const BassParams& bass, double fraction) {
    if (fraction <= 0.0) return 0.0;
    if (fraction >= 1.0) return std::numeric_limits<double>::infinity();
    const double p = bass.innovation, q = bass.imitation;
    return -std::log((1.0 - fraction) / (1.0 + (q / p) * fraction)) / (p + q);
}

double bass_step(const BassParams& bass, double potential_kw, double current_kw) {
    if (current_kw < 0.0) current_kw = 0.0;
    if (potential_kw <= current_kw) return current_kw;
    const double frac = std::min(current_kw / potential_kw, 1.0 - 1e-12);
    const double next = potential_kw * bass_eta(bass, bass_eta_inverse(bass, frac) + 1.0);
    return std::max(next, current_kw);  // the clamp above must never shrink the base
}

void AdoptionModel::validate() const {
    if (!(bass.innovation > 0.0) || !(bass.imitation >= 0.0))
        throw DimensionError("bass coefficients need innovation > 0, imitation >= 0");
    if (!(market_size_kw > 0.0)) throw DimensionError("market_size_kw must be positive");
    if (!(potential_decay > 0.0)) throw DimensionError("potential_decay must be positive");
}

double solar_value_per_cycle(const MarketModel& model, const PeriodVec& prices) {
    double value = 0.0;
    for (const Scenario& s : model.scenarios)
        value += s.probability * (prices * s.solar_unit_output).sum();
    return value;
}

double payback_years(const MarketModel& model, const PeriodVec& prices, double xi) {
    const double annual = model.cycles_per_year * solar_value_per_cycle(model, prices);
    if (annual <= 0.0) return std::numeric_limits<double>::infinity();
    return xi / annual;
}

double market_potential(const AdoptionModel& adoption, const MarketModel& model,
                        const PeriodVec& prices, double xi) {
    const double pb = payback_years(model, prices, xi);
    if (!std::isfinite(pb)) return 0.0;
    return adoption.market_size_kw * std::exp(-adoption.potential_decay * pb);
}

}  // namespace pvdyn
