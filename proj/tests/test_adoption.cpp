#include <cmath>
#include <limits>

#include <doctest.h>

#include "pvdyn/adoption.hpp"
#include "test_support.hpp"

using namespace pvdyn;

TEST_CASE("bass curve starts at exactly zero and saturates below one") {
    const BassParams bass;  // defaults p=0.01, q=0.4
    CHECK(bass_eta(bass, 0.0) == 0.0);
    CHECK(bass_eta(bass, -3.0) == 0.0);
    double prev = 0.0;
    for (int k = 1; k <= 120; ++k) {
        const double v = bass_eta(bass, 0.5 * k);
        CHECK(v > prev);
        CHECK(v < 1.0);
        prev = v;
    }
    CHECK(bass_eta(bass, 60.0) > 0.999);
}

TEST_CASE("bass inverse roundtrips to 1e-12") {
    const BassParams bass;
    double worst = 0.0;
    for (int k = 1; k <= 999; ++k) {
        const double x = k / 1000.0;
        const double back = bass_eta(bass, bass_eta_inverse(bass, x));
        worst = std::max(worst, std::abs(back - x));
    }
    CHECK(worst <= 1e-12);
    CHECK(bass_eta_inverse(bass, 0.0) == 0.0);
    CHECK(std::isinf(bass_eta_inverse(bass, 1.0)));
}

TEST_CASE("bass_step freezes when the potential is at or below the base") {
    const BassParams bass;
    CHECK(bass_step(bass, 5.0, 7.0) == 7.0);
    CHECK(bass_step(bass, 7.0, 7.0) == 7.0);
    CHECK(bass_step(bass, 0.0, 0.0) == 0.0);
}

TEST_CASE("bass_step advances one year along the scaled curve") {
    const BassParams bass;
    const double p = 10.0;
    CHECK(bass_step(bass, p, 0.0) == doctest::Approx(p * bass_eta(bass, 1.0)).epsilon(1e-13));
    const double mid = p * bass_eta(bass, 4.0);
    CHECK(bass_step(bass, p, mid) == doctest::Approx(p * bass_eta(bass, 5.0)).epsilon(1e-10));
    // Nearly saturated bases stay put instead of inverting past the pole.
    const double sat = p * (1.0 - 1e-14);
    CHECK(bass_step(bass, p, sat) >= sat);
}

TEST_CASE("capacity never shrinks through a step") {
    const BassParams bass;
    for (double pot : {0.0, 2.0, 6.0, 12.0}) {
        for (double cur : {0.0, 1.0, 5.0, 11.0}) {
            CHECK(bass_step(bass, pot, cur) >= cur);
        }
    }
}

TEST_CASE("payback and potential on the toy market") {
    const MarketModel toy = testkit::toy_market();  // cycles_per_year = 1
    AdoptionModel am = testkit::toy_adoption();
    const PeriodVec prices = PeriodVec::Constant(1, 2.0);
    CHECK(solar_value_per_cycle(toy, prices) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(payback_years(toy, prices, 4.0) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(market_potential(am, toy, prices, 4.0) ==
          doctest::Approx(10.0 * std::exp(-0.6)).epsilon(1e-12));
}

TEST_CASE("worthless solar has infinite payback and zero potential") {
    MarketModel toy = testkit::toy_market();
    toy.scenarios[0].solar_unit_output[0] = 0.0;
    const AdoptionModel am = testkit::toy_adoption();
    const PeriodVec prices = PeriodVec::Constant(1, 2.0);
    CHECK(std::isinf(payback_years(toy, prices, 4.0)));
    CHECK(market_potential(am, toy, prices, 4.0) == 0.0);
}

TEST_CASE("potential falls with install cost and rises with prices") {
    const MarketModel toy = testkit::toy_market();
    const AdoptionModel am = testkit::toy_adoption();
    const PeriodVec prices = PeriodVec::Constant(1, 2.0);
    const PeriodVec higher = PeriodVec::Constant(1, 2.5);
    const double base = market_potential(am, toy, prices, 4.0);
    CHECK(market_potential(am, toy, prices, 5.0) < base);
    CHECK(market_potential(am, toy, higher, 4.0) > base);
}

TEST_CASE("adoption model validation") {
    AdoptionModel am = testkit::toy_adoption();
    am.market_size_kw = 0.0;
    CHECK_THROWS_AS(am.validate(), std::invalid_argument);
    AdoptionModel am2 = testkit::toy_adoption();
    am2.bass.innovation = 0.0;
    CHECK_THROWS_AS(am2.validate(), std::invalid_argument);
}
