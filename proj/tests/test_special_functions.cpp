#include <catch_amalgamated.hpp>

#include <boost/math/special_functions/bessel.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "memkernel/special_functions.hpp"

using namespace memkernel;
using Catch::Matchers::WithinAbs;
using big = boost::multiprecision::cpp_bin_float_50;

namespace {

double reference_j(int n, double z) { return static_cast<double>(boost::math::cyl_bessel_j(n, big(z))); }

}  // namespace

TEST_CASE("J0 and J1 agree with a 50-digit reference on [0, 50]") {
    double worst = 0.0;
    for (int k = 0; k <= 5000; ++k) {
        const double z = 0.01 * k;
        worst = std::max(worst, std::fabs(bessel_j0(z) - reference_j(0, z)));
        worst = std::max(worst, std::fabs(bessel_j1(z) - reference_j(1, z)));
    }
    CHECK(worst < 2e-14);
}

TEST_CASE("Both sides of the series/asymptotic seam are accurate") {
    for (double z : {kBesselSeriesCrossover - 1e-9, kBesselSeriesCrossover, kBesselSeriesCrossover + 1e-9}) {
        CHECK_THAT(bessel_j0(z), WithinAbs(reference_j(0, z), 1e-14));
        CHECK_THAT(bessel_j1(z), WithinAbs(reference_j(1, z), 1e-14));
    }
}

TEST_CASE("Large arguments") {
    for (double z : {75.0, 150.5, 1e3, 1e5}) {
        CHECK_THAT(bessel_j0(z), WithinAbs(reference_j(0, z), 1e-15));
        CHECK_THAT(bessel_j1(z), WithinAbs(reference_j(1, z), 1e-15));
    }
}

TEST_CASE("Values at the origin and parity") {
    CHECK(bessel_j0(0.0) == 1.0);
    CHECK(bessel_j1(0.0) == 0.0);
    for (double z : {0.3, 4.0, 17.0, 40.0}) {
        CHECK(bessel_j0(-z) == bessel_j0(z));
        CHECK(bessel_j1(-z) == -bessel_j1(z));
    }
}

TEST_CASE("First zero of J0 and maximum of J1") {
    CHECK(std::fabs(bessel_j0(2.404825557695773)) < 1e-15);
    // |J1| <= 0.5819 everywhere; the maximum sits near z = 1.8412.
    CHECK_THAT(bessel_j1(1.8411837813406593), WithinAbs(0.5818652242815963, 1e-15));
}

TEST_CASE("Contract errors") {
    CHECK_THROWS_AS(bessel_j(BesselOrder{2}, 1.0), UnsupportedOrder);
    CHECK_THROWS_AS(bessel_j0(std::nan("")), DomainError);
    CHECK_THROWS_AS(bessel_j1(INFINITY), DomainError);
}
