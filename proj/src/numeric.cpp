#include "pvdyn/numeric.hpp"

#include <cmath>

namespace pvdyn {

RootResult bisect_root(const std::function<double(double)>& f, double lo, double hi,
                       double xtol, double ftol, int max_iter) {
    double flo = f(lo);
    RootResult best{lo, flo, std::abs(flo) <= ftol};
    if (best.converged) return best;
    const double fhi = f(hi);
    if (std::abs(fhi) < std::abs(flo)) best = {hi, fhi, false};
    if (std::abs(best.f) <= ftol) {
        best.converged = true;
        return best;
    }
    if ((flo > 0.0) == (fhi > 0.0)) return best;  // no sign change to bisect
    for (int it = 0; it < max_iter; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (std::abs(fm) < std::abs(best.f)) best = {mid, fm, false};
        if (std::abs(fm) <= ftol) {
            best.converged = true;
            return best;
        }
        if ((flo <= 0.0) == (fm <= 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
        if (hi - lo <= xtol) {
            best.converged = true;
            return best;
        }
    }
    return best;
}

MinResult golden_section_min(const std::function<double(double)>& f, double lo, double hi,
                             double xtol, int max_iter) {
    constexpr double inv_phi = 0.6180339887498949;
    MinResult best{lo, f(lo)};
    const double fhi = f(hi);
    if (fhi < best.f) best = {hi, fhi};
    double a = lo, b = hi;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    if (f1 < best.f) best = {x1, f1};
    if (f2 < best.f) best = {x2, f2};
    for (int it = 0; it < max_iter && b - a > xtol; ++it) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
            if (f1 < best.f) best = {x1, f1};
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
            if (f2 < best.f) best = {x2, f2};
        }
    }
    return best;
}

SwitchBracket bisect_boolean(const std::function<bool(double)>& pred, double lo, double hi,
                             double xtol, int max_iter) {
    for (int it = 0; it < max_iter && hi - lo > xtol; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (pred(mid))
            hi = mid;
        else
            lo = mid;
    }
    return {lo, hi};
}

}  // namespace pvdyn
