#include "pvdyn/market.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "margin_pieces.hpp"
#include "pvdyn/numeric.hpp"

namespace pvdyn {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw DimensionError(what);
}

}  // namespace

void MarketModel::validate() const {
    require(!scenarios.empty(), "market model needs at least one scenario");
    require(periods_per_cycle >= 1, "periods_per_cycle must be >= 1");
    require(demand_slope > 0.0 && std::isfinite(demand_slope), "demand_slope must be positive");
    require(num_consumers > 0.0 && std::isfinite(num_consumers), "num_consumers must be positive");
    require(cycles_per_year > 0.0, "cycles_per_year must be positive");
    double prob_sum = 0.0;
    for (const Scenario& s : scenarios) {
        require(s.probability > 0.0, "scenario probabilities must be positive");
        prob_sum += s.probability;
        require(s.demand_intercept.size() == periods_per_cycle &&
                    s.wholesale_price.size() == periods_per_cycle &&
                    s.solar_unit_output.size() == periods_per_cycle,
                "scenario vectors must have periods_per_cycle entries");
        require((s.demand_intercept >= 0.0).all(), "demand intercepts must be nonnegative");
        require((s.solar_unit_output >= 0.0).all(), "solar output must be nonnegative");
    }
    require(std::abs(prob_sum - 1.0) <= 1e-9, "scenario probabilities must sum to 1");
}

void Tariff::validate(int periods_per_cycle) const {
    require(connection_charge >= 0.0 && std::isfinite(connection_charge),
            "connection charge must be nonnegative");
    require(volumetric_price.size() == periods_per_cycle,
            "tariff price vector must have periods_per_cycle entries");
    require((volumetric_price >= 0.0).all(), "volumetric prices must be nonnegative");
    if (class_tag == TariffClass::Flat) {
        const double p0 = volumetric_price[0];
        const double tol = 1e-12 * std::max(1.0, std::abs(p0));
        require((volumetric_price - p0).abs().maxCoeff() <= tol,
                "flat tariff must carry a single price");
    }
    if (class_tag == TariffClass::Linear)
        require(connection_charge == 0.0, "linear tariff cannot carry a connection charge");
}

Tariff make_flat_tariff(double price, double connection_charge, int periods_per_cycle) {
    Tariff t;
    t.connection_charge = connection_charge;
    t.volumetric_price = PeriodVec::Constant(periods_per_cycle, price);
    t.class_tag = connection_charge != 0.0 ? TariffClass::TwoPart : TariffClass::Flat;
    return t;
}

TariffClass classify_tariff(double connection_charge, const PeriodVec& prices) {
    if (connection_charge != 0.0) return TariffClass::TwoPart;
    if (prices.size() == 0) return TariffClass::Flat;
    const double p0 = prices[0];
    const double tol = 1e-12 * std::max(1.0, std::abs(p0));
    return (prices - p0).abs().maxCoeff() <= tol ? TariffClass::Flat : TariffClass::Linear;
}

PeriodVec demand(const MarketModel& model, const Tariff& tariff, const Scenario& scenario) {
    return (scenario.demand_intercept - model.demand_slope * tariff.volumetric_price).max(0.0);
}

double expected_consumer_surplus(const MarketModel& model, const Tariff& tariff,
                                 double capacity_kw) {
    double cs = 0.0;
    for (const Scenario& s : model.scenarios) {
        const PeriodVec d = demand(model, tariff, s);
        const double gross = (d.square() / (2.0 * model.demand_slope)).sum();
        const double credit = capacity_kw * (tariff.volumetric_price * s.solar_unit_output).sum();
        cs += s.probability * (gross + credit);
    }
    return cs - model.num_consumers * tariff.connection_charge;
}

double expected_energy_margin(const MarketModel& model, const PeriodVec& prices,
                              double capacity_kw) {
    double margin = 0.0;
    for (const Scenario& s : model.scenarios) {
        const PeriodVec d = (s.demand_intercept - model.demand_slope * prices).max(0.0);
        const PeriodVec net = d - capacity_kw * s.solar_unit_output;
        margin += s.probability * ((prices - s.wholesale_price) * net).sum();
    }
    return margin;
}

double expected_retail_surplus(const MarketModel& model, const Tariff& tariff, double theta,
                               double capacity_kw) {
    return expected_energy_margin(model, tariff.volumetric_price, capacity_kw) +
           model.num_consumers * tariff.connection_charge - theta;
}

namespace detail {

std::vector<MarginCell> margin_cells_period(const MarketModel& model, int period) {
    std::vector<MarginCell> cells;
    cells.reserve(model.scenarios.size());
    for (const Scenario& s : model.scenarios)
        cells.push_back({s.probability, s.demand_intercept[period], s.wholesale_price[period],
                         s.solar_unit_output[period]});
    return cells;
}

std::vector<MarginCell> margin_cells_flat(const MarketModel& model) {
    std::vector<MarginCell> cells;
    cells.reserve(model.scenarios.size() * model.periods_per_cycle);
    for (const Scenario& s : model.scenarios)
        for (int n = 0; n < model.periods_per_cycle; ++n)
            cells.push_back({s.probability, s.demand_intercept[n], s.wholesale_price[n],
                             s.solar_unit_output[n]});
    return cells;
}

}  // namespace detail

MarginResult max_retail_margin(const MarketModel& model, double capacity_kw, bool flat) {
    MarginResult out;
    if (flat) {
        detail::MarginPieces pieces(detail::margin_cells_flat(model), model.demand_slope,
                                    capacity_kw);
        const auto best = pieces.maximize();
        out.price = make_flat_tariff(best.x, 0.0, model.periods_per_cycle);
        out.value = best.value;
        return out;
    }
    PeriodVec prices(model.periods_per_cycle);
    double total = 0.0;
    for (int n = 0; n < model.periods_per_cycle; ++n) {
        detail::MarginPieces pieces(detail::margin_cells_period(model, n), model.demand_slope,
                                    capacity_kw);
        const auto best = pieces.maximize();
        prices[n] = best.x;
        total += best.value;
    }
    out.price.connection_charge = 0.0;
    out.price.volumetric_price = prices;
    out.price.class_tag = classify_tariff(0.0, prices);
    out.value = total;
    return out;
}

double theta_sharp(const MarketModel& model, double capacity_max_kw, bool flat) {
    auto best_margin = [&](double r) { return max_retail_margin(model, r, flat).value; };
    if (capacity_max_kw <= 0.0) return best_margin(0.0);
    const double xtol = 1e-8 * std::max(1.0, capacity_max_kw);
    return golden_section_min(best_margin, 0.0, capacity_max_kw, xtol).f;
}

// ---------------------------------------------------------------------------
// Calibration
// ---------------------------------------------------------------------------

namespace {

struct CalibrationWork {
    std::vector<Scenario> scenarios;      // intercepts filled in later
    std::vector<PeriodVec> demand_shape;  // normalized to mean 1
};

// Residual of the consumer-surplus anchor as a function of the slope b, with
// the mean intercept eliminated through the break-even anchor. Valid when the
// demand clamp is inactive at the anchor tariff; the exact evaluators verify
// that after the fact.
struct SurplusResidual {
    const CalibrationAnchors& anchors;
    const CalibrationWork& work;
    double s1, s2;  // sum p w (pi - lambda), sum p (pi - lambda)

    double mean_intercept(double b) const {
        const double k = anchors.theta - anchors.num_consumers * anchors.connection_charge;
        return (k + b * anchors.flat_price * s2) / s1;
    }

    double operator()(double b) const {
        const double abar = mean_intercept(b);
        double gross = 0.0;
        for (std::size_t s = 0; s < work.scenarios.size(); ++s) {
            const PeriodVec d = abar * work.demand_shape[s] - b * anchors.flat_price;
            gross += work.scenarios[s].probability * (d.square() / (2.0 * b)).sum();
        }
        return gross - (anchors.consumer_surplus +
                        anchors.num_consumers * anchors.connection_charge);
    }
};

}  // namespace

MarketModel calibrate_reference(const CalibrationAnchors& anchors) {
    const int n = anchors.periods_per_cycle;
    if (n < 1) throw DimensionError("periods_per_cycle must be >= 1");
    if (!(anchors.num_consumers > 0.0)) throw DomainError("num_consumers must be positive");
    if (!(anchors.flat_price > 0.0)) throw DomainError("anchor flat_price must be positive");
    if (!(anchors.consumer_surplus > 0.0))
        throw DomainError("anchor consumer_surplus must be positive");
    if (anchors.theta < 0.0) throw DomainError("anchor theta must be nonnegative");
    if (anchors.connection_charge < 0.0)
        throw DomainError("anchor connection_charge must be nonnegative");
    if (!(anchors.cycles_per_year > 0.0)) throw DomainError("cycles_per_year must be positive");

    // Fill defaults and check shapes.
    std::vector<AnchorScenario> raw = anchors.scenarios;
    if (raw.empty()) raw.push_back(AnchorScenario{});
    CalibrationWork work;
    double prob_sum = 0.0;
    for (AnchorScenario& s : raw) {
        if (!(s.probability > 0.0)) throw DomainError("scenario probabilities must be positive");
        prob_sum += s.probability;
        if (s.wholesale_price.size() == 0)
            s.wholesale_price = PeriodVec::Constant(n, 0.5 * anchors.flat_price);
        if (s.solar_unit_output.size() == 0) s.solar_unit_output = PeriodVec::Zero(n);
        if (s.demand_shape.size() == 0) s.demand_shape = PeriodVec::Ones(n);
        if (s.wholesale_price.size() != n || s.solar_unit_output.size() != n ||
            s.demand_shape.size() != n)
            throw DimensionError("anchor scenario vectors must have periods_per_cycle entries");
        if ((s.demand_shape < 0.0).any()) throw DomainError("demand shapes must be nonnegative");
        if ((s.solar_unit_output < 0.0).any()) throw DomainError("solar output must be nonnegative");
    }
    if (std::abs(prob_sum - 1.0) > 1e-9)
        throw DomainError("scenario probabilities must sum to 1");

    double shape_mass = 0.0;
    for (const AnchorScenario& s : raw)
        shape_mass += s.probability / prob_sum * s.demand_shape.sum();
    if (!(shape_mass > 0.0)) throw DomainError("demand shapes must have positive mass");
    for (const AnchorScenario& s : raw) {
        Scenario sc;
        sc.probability = s.probability / prob_sum;
        sc.wholesale_price = s.wholesale_price;
        sc.solar_unit_output = s.solar_unit_output;
        work.scenarios.push_back(std::move(sc));
        work.demand_shape.push_back(s.demand_shape * (n / shape_mass));
    }

    // Anchor system: break-even pins the mean intercept linearly in b, the
    // surplus anchor then becomes a one-dimensional root-find in b.
    double s1 = 0.0, s2 = 0.0;
    for (std::size_t s = 0; s < work.scenarios.size(); ++s) {
        const PeriodVec gap = anchors.flat_price - work.scenarios[s].wholesale_price;
        s1 += work.scenarios[s].probability * (work.demand_shape[s] * gap).sum();
        s2 += work.scenarios[s].probability * gap.sum();
    }
    const double margin_scale = n * std::max(1.0, anchors.flat_price);
    if (std::abs(s1) <= 1e-12 * margin_scale)
        throw NoSolutionError(
            "anchor tariff earns no margin per unit demand; intercept is unidentified");

    const SurplusResidual resid{anchors, work, s1, s2};
    const double k = anchors.theta - anchors.num_consumers * anchors.connection_charge;
    const double c = anchors.consumer_surplus + anchors.num_consumers * anchors.connection_charge;
    double b_center = n * k * k / (2.0 * c * s1 * s1);
    if (!(b_center > 0.0) || !std::isfinite(b_center))
        b_center = c / (n * anchors.flat_price * anchors.flat_price);

    // Scan 16 decades around the natural scale for sign changes, then bisect
    // each bracket. F can have two roots; admissibility is settled against
    // the exact evaluators and the smallest admissible slope wins.
    std::vector<double> roots;
    const int grid = 641;
    double prev_b = 0.0, prev_f = 0.0;
    for (int i = 0; i < grid; ++i) {
        const double b = b_center * std::pow(10.0, -8.0 + 16.0 * i / (grid - 1));
        const double f = resid(b);
        if (!std::isfinite(f)) continue;
        if (i > 0 && std::isfinite(prev_f) &&
            ((prev_f <= 0.0 && f >= 0.0) || (prev_f >= 0.0 && f <= 0.0))) {
            const auto r = bisect_root(resid, prev_b, b, 1e-15 * b, 0.0, 200);
            roots.push_back(r.x);
        }
        prev_b = b;
        prev_f = f;
    }

    std::string reject;
    for (double b : roots) {
        const double abar = resid.mean_intercept(b);
        if (!(b > 0.0) || !(abar >= 0.0) || !std::isfinite(abar)) continue;
        MarketModel model;
        model.demand_slope = b;
        model.num_consumers = anchors.num_consumers;
        model.periods_per_cycle = n;
        model.cycles_per_year = anchors.cycles_per_year;
        for (std::size_t s = 0; s < work.scenarios.size(); ++s) {
            Scenario sc = work.scenarios[s];
            sc.demand_intercept = abar * work.demand_shape[s];
            model.scenarios.push_back(std::move(sc));
        }
        const Tariff anchor_tariff =
            make_flat_tariff(anchors.flat_price, anchors.connection_charge, n);
        const double rs = expected_retail_surplus(model, anchor_tariff, anchors.theta, 0.0);
        const double cs = expected_consumer_surplus(model, anchor_tariff, 0.0);
        const double rs_tol = 1e-8 * std::max(1.0, anchors.theta);
        const double cs_tol = 1e-8 * std::max(1.0, anchors.consumer_surplus);
        if (std::abs(rs) > rs_tol || std::abs(cs - anchors.consumer_surplus) > cs_tol) {
            reject = "candidate slope fails exact anchor residuals (demand clamp binding)";
            continue;
        }
        model.validate();
        return model;
    }
    throw NoSolutionError(reject.empty()
                              ? "no slope reproduces the anchor surpluses"
                              : reject);
}

}  // namespace pvdyn
