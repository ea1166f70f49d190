#pragma once

#include <functional>

namespace pvdyn {

struct RootResult {
    double x = 0.0;
    double f = 0.0;
    bool converged = false;
};

/// Bisection on a sign-changing bracket [lo, hi]. Stops when |f| <= ftol or
/// the bracket width drops below xtol. Requires f(lo) and f(hi) of opposite
/// sign (or zero); callers check the bracket.
RootResult bisect_root(const std::function<double(double)>& f, double lo, double hi,
                       double xtol, double ftol, int max_iter = 200);

struct MinResult {
    double x = 0.0;
    double f = 0.0;
};

/// Golden-section minimization on [lo, hi]. Returns the smallest evaluated
/// value (for a convex objective this overestimates the true minimum by at
/// most O(curvature * xtol^2)).
MinResult golden_section_min(const std::function<double(double)>& f, double lo, double hi,
                             double xtol, int max_iter = 400);

/// Final bracket around the switching point of a monotone boolean predicate:
/// pred(lo) == false, pred(hi) == true, hi - lo <= xtol.
struct SwitchBracket {
    double lo = 0.0;  // last point where the predicate is false
    double hi = 0.0;  // first point where the predicate is true
};

/// Locates the switching point of a monotone boolean predicate on [lo, hi],
/// where pred(lo) == false and pred(hi) == true (endpoints are trusted, not
/// re-evaluated).
SwitchBracket bisect_boolean(const std::function<bool(double)>& pred, double lo, double hi,
                             double xtol, int max_iter = 200);

}  // namespace pvdyn
