#include <cmath>

#include <doctest.h>

#include "pvdyn/numeric.hpp"

using namespace pvdyn;

TEST_CASE("bisect_root finds sqrt(2)") {
    const auto r = bisect_root([](double x) { return x * x - 2.0; }, 0.0, 2.0, 1e-13, 0.0);
    CHECK(r.converged);
    CHECK(std::abs(r.x - std::sqrt(2.0)) < 1e-12);
}

TEST_CASE("bisect_root accepts an endpoint root") {
    const auto r = bisect_root([](double x) { return x - 1.0; }, 1.0, 3.0, 1e-12, 1e-14);
    CHECK(r.converged);
    CHECK(r.x == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("bisect_root reports the best point when not bracketed") {
    const auto r = bisect_root([](double x) { return x * x + 1.0; }, -1.0, 2.0, 1e-12, 1e-9);
    CHECK_FALSE(r.converged);
    CHECK(r.f >= 1.0);
}

TEST_CASE("golden_section_min locates an interior minimum") {
    const auto m = golden_section_min([](double x) { return (x - 1.25) * (x - 1.25); },
                                      0.0, 3.0, 1e-10);
    CHECK(std::abs(m.x - 1.25) < 1e-7);
    CHECK(m.f < 1e-13);
}

TEST_CASE("golden_section_min handles boundary minima") {
    const auto lo = golden_section_min([](double x) { return x; }, 2.0, 5.0, 1e-10);
    CHECK(std::abs(lo.x - 2.0) < 1e-7);
    const auto hi = golden_section_min([](double x) { return -x; }, 2.0, 5.0, 1e-10);
    CHECK(std::abs(hi.x - 5.0) < 1e-7);
}

TEST_CASE("bisect_boolean brackets a monotone switch") {
    const double cutoff = 3.14159;
    const auto b = bisect_boolean([&](double x) { return x > cutoff; }, 0.0, 10.0, 1e-9);
    CHECK(b.lo <= cutoff);
    CHECK(b.hi >= cutoff);
    CHECK(b.hi - b.lo <= 2e-9);
}
