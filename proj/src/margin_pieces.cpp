#include "margin_pieces.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pvdyn::detail {

MarginPieces::MarginPieces(std::vector<MarginCell> cells, double slope, double capacity_kw)
    : cells_(std::move(cells)), slope_(slope), capacity_(capacity_kw) {
    std::sort(cells_.begin(), cells_.end(), [](const MarginCell& u, const MarginCell& v) {
        return u.intercept < v.intercept;  // same order as choke a/b for fixed b
    });

    double solar_q1 = 0.0, solar_q0 = 0.0;
    for (const MarginCell& u : cells_) {
        solar_q1 -= capacity_ * u.weight * u.solar;
        solar_q0 += capacity_ * u.weight * u.lambda * u.solar;
    }
    tail_q1_ = solar_q1;
    tail_q0_ = solar_q0;

    // Suffix sums over cells sorted by choke price. suffix[i] aggregates
    // cells i..end, the active set of any piece whose right boundary is the
    // choke of cell i.
    const std::size_t n = cells_.size();
    std::vector<double> sw(n + 1, 0.0), swa(n + 1, 0.0), swla(n + 1, 0.0);
    for (std::size_t i = n; i-- > 0;) {
        const MarginCell& u = cells_[i];
        sw[i] = sw[i + 1] + u.weight;
        swa[i] = swa[i + 1] + u.weight * (u.intercept + slope_ * u.lambda);
        swla[i] = swla[i + 1] + u.weight * u.lambda * u.intercept;
    }

    double lo = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (cells_[i].intercept <= 0.0) continue;
        const double hi = cells_[i].intercept / slope_;
        if (hi <= lo) continue;  // duplicate or sub-zero choke
        MarginPiece piece;
        piece.lo = lo;
        piece.hi = hi;
        piece.q2 = -slope_ * sw[i];
        piece.q1 = swa[i] + solar_q1;
        piece.q0 = -swla[i] + solar_q0;
        pieces_.push_back(piece);
        lo = hi;
    }
    x_top_ = lo;
}

double MarginPieces::eval(double x) const {
    double m = 0.0;
    for (const MarginCell& u : cells_) {
        const double sales = std::max(0.0, u.intercept - slope_ * x) - capacity_ * u.solar;
        m += u.weight * (x - u.lambda) * sales;
    }
    return m;
}

MarginPieces::Max MarginPieces::maximize() const {
    Max best{0.0, eval(0.0)};
    auto consider = [&](double x) {
        const double v = eval(x);
        if (v > best.value) best = {x, v};
    };
    for (const MarginPiece& piece : pieces_) {
        consider(piece.hi);
        if (piece.q2 < 0.0) {
            const double xv = -piece.q1 / (2.0 * piece.q2);
            if (xv > piece.lo && xv < piece.hi) consider(xv);
        }
    }
    // The tail is nonincreasing (slope -R * E[w r0] <= 0), so x_top, already a
    // candidate, dominates everything beyond it.
    return best;
}

namespace {

// Numerically stable real roots of q2 x^2 + q1 x + c, ascending.
int quad_roots(double q2, double q1, double c, double out[2]) {
    if (q2 == 0.0) {
        if (q1 == 0.0) return 0;
        out[0] = -c / q1;
        return 1;
    }
    const double disc = q1 * q1 - 4.0 * q2 * c;
    if (disc < 0.0) return 0;
    const double sq = std::sqrt(disc);
    const double qq = -0.5 * (q1 + std::copysign(sq, q1));
    double r1 = qq / q2;
    double r2 = (qq == 0.0) ? r1 : c / qq;
    if (r1 > r2) std::swap(r1, r2);
    out[0] = r1;
    out[1] = r2;
    return 2;
}

}  // namespace

std::optional<double> MarginPieces::smallest_root(double target, double ftol) const {
    std::vector<double> candidates{0.0, x_top_};
    const double pad = 1e-9 * std::max(1.0, x_top_);
    for (const MarginPiece& piece : pieces_) {
        double roots[2];
        const int k = quad_roots(piece.q2, piece.q1, piece.q0 - target, roots);
        for (int i = 0; i < k; ++i) {
            if (roots[i] >= piece.lo - pad && roots[i] <= piece.hi + pad)
                candidates.push_back(std::clamp(roots[i], piece.lo, piece.hi));
        }
        if (k == 0 && piece.q2 < 0.0) {
            const double xv = -piece.q1 / (2.0 * piece.q2);  // possible tangency
            if (xv >= piece.lo && xv <= piece.hi) candidates.push_back(xv);
        }
    }
    if (tail_q1_ != 0.0) {
        const double xr = (target - tail_q0_) / tail_q1_;
        if (xr >= x_top_) candidates.push_back(xr);
    }
    std::sort(candidates.begin(), candidates.end());

    auto piece_deriv = [&](double x) {
        for (const MarginPiece& piece : pieces_)
            if (x <= piece.hi) return 2.0 * piece.q2 * x + piece.q1;
        return tail_q1_;
    };
    for (double x : candidates) {
        if (x < 0.0) continue;
        double resid = eval(x) - target;
        for (int it = 0; it < 3 && resid != 0.0; ++it) {
            const double d = piece_deriv(x);
            if (d == 0.0) break;
            const double x2 = x - resid / d;
            if (x2 < 0.0) break;
            const double r2 = eval(x2) - target;
            if (std::abs(r2) >= std::abs(resid)) break;
            x = x2;
            resid = r2;
        }
        if (std::abs(resid) <= ftol) return x;
    }

    const Max top = maximize();
    if (top.value < target - ftol) return std::nullopt;    // margin never reaches target
    if (std::abs(top.value - target) <= ftol) return top.x;  // tangency at the peak

    if (eval(0.0) > target + ftol && tail_q0_ > target) return 0.0;  // constraint slack everywhere

    // Rounding pushed every closed-form candidate outside the tolerance; hunt
    // a bracket on a fine grid and bisect. This path is not expected in
    // practice.
    double prev_x = 0.0, prev_f = eval(0.0) - target;
    const int grid = 64;
    for (const MarginPiece& piece : pieces_) {
        for (int i = 1; i <= grid; ++i) {
            const double x = piece.lo + (piece.hi - piece.lo) * i / grid;
            const double f = eval(x) - target;
            if ((prev_f <= 0.0 && f >= 0.0) || (prev_f >= 0.0 && f <= 0.0)) {
                double lo = prev_x, hi = x, flo = prev_f;
                for (int it = 0; it < 200; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    const double fm = eval(mid) - target;
                    if (std::abs(fm) <= ftol) return mid;
                    if ((flo <= 0.0) == (fm <= 0.0)) {
                        lo = mid;
                        flo = fm;
                    } else {
                        hi = mid;
                    }
                }
            }
            prev_x = x;
            prev_f = f;
        }
    }
    return std::nullopt;
}

}  // namespace pvdyn::detail
