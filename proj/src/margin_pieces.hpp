#pragma once

// Internal machinery for exact optimization of expected energy margins.
//
// For a scalar price x applied to a set of (scenario, period) cells, the
// expected margin
//
//   m(x) = sum_u w_u * (x - lambda_u) * (max(0, a_u - b x) - R * r0_u)
//
// is piecewise quadratic with breakpoints at the choke prices a_u / b. The
// pieces are concave individually but the kinks are convex, so the global
// maximum and the full root set have to be taken piece by piece.

#include <optional>
#include <vector>

namespace pvdyn {
struct MarketModel;
}

namespace pvdyn::detail {

struct MarginCell {
    double weight = 0.0;     // scenario probability
    double intercept = 0.0;  // a_u, kWh
    double lambda = 0.0;     // wholesale price, $/kWh
    double solar = 0.0;      // r0_u, kWh per kW
};

struct MarginPiece {
    double lo = 0.0, hi = 0.0;
    double q2 = 0.0, q1 = 0.0, q0 = 0.0;  // margin = q2 x^2 + q1 x + q0 on [lo, hi]
};

class MarginPieces {
public:
    MarginPieces(std::vector<MarginCell> cells, double slope, double capacity_kw);

    /// Exact margin at any price >= 0, evaluated cell by cell with the clamp.
    double eval(double x) const;

    /// Global maximum over x in [0, infinity); the maximizer always lies in
    /// [0, x_top]. Ties resolve to the smallest price.
    struct Max {
        double x = 0.0;
        double value = 0.0;
    };
    Max maximize() const;

    /// Smallest x >= 0 with |m(x) - target| <= ftol, or nullopt when the
    /// margin never reaches the target (within the same tolerance, so a
    /// tangency counts as a root).
    std::optional<double> smallest_root(double target, double ftol) const;

    double x_top() const { return x_top_; }
    const std::vector<MarginPiece>& pieces() const { return pieces_; }

private:
    std::vector<MarginCell> cells_;
    double slope_;
    double capacity_;
    std::vector<MarginPiece> pieces_;
    double x_top_ = 0.0;
    double tail_q1_ = 0.0, tail_q0_ = 0.0;  // affine margin for x >= x_top
};

/// Cell extraction from a market model: every (scenario, period) pair for a
/// flat price, or one period's scenarios for a per-period price.
std::vector<MarginCell> margin_cells_flat(const MarketModel& model);
std::vector<MarginCell> margin_cells_period(const MarketModel& model, int period);

}  // namespace pvdyn::detail
