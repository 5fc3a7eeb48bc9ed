#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "memkernel/quadrature.hpp"

using namespace memkernel;
using Catch::Matchers::WithinAbs;

TEST_CASE("Gauss-Legendre rules integrate polynomials exactly") {
    for (int n : {1, 2, 5, 8, 24, 64, 128}) {
        const auto& r = quad::gauss_legendre(n);
        REQUIRE(r.nodes.size() == static_cast<std::size_t>(n));
        double wsum = 0.0;
        for (double w : r.weights) wsum += w;
        CHECK_THAT(wsum, WithinAbs(2.0, 1e-14));
        const int deg = 2 * n - 1;
        double s = 0.0;
        for (int q = 0; q < n; ++q) s += r.weights[q] * std::pow(r.nodes[q], deg - 1);
        CHECK_THAT(s, WithinAbs(2.0 / deg, 1e-13));
    }
    CHECK_THROWS(quad::gauss_legendre(0));
    CHECK_THROWS(quad::gauss_legendre(129));
}

TEST_CASE("Adaptive Gauss-Kronrod reaches its tolerance") {
    auto r = quad::adaptive_gk15([](double x) { return std::sqrt(x); }, 0.0, 1.0, 1e-12);
    CHECK(r.converged);
    CHECK_THAT(r.value, WithinAbs(2.0 / 3.0, 1e-12));
    const double osc = quad::integrate([](double x) { return std::cos(40.0 * x); }, 0.0, std::numbers::pi, 1e-13);
    CHECK_THAT(osc, WithinAbs(0.0, 1e-12));
    CHECK_THAT(quad::integrate([](double x) { return std::exp(-x * x); }, -8.0, 8.0, 1e-14),
               WithinAbs(std::sqrt(std::numbers::pi), 1e-13));
}

TEST_CASE("integrate throws when the error estimate stays above tolerance") {
    auto bad = [](double x) { return 1.0 / std::sqrt(std::fabs(x - 0.3)); };
    CHECK_THROWS_AS(quad::integrate(bad, 0.0, 1.0, 1e-15, "singular", 8), NumericalFailure);
}

TEST_CASE("Chebyshev fit reproduces smooth functions") {
    auto f = [](double x) { return std::exp(std::sin(3.0 * x)); };
    const auto s = quad::ChebyshevSeries::fit(f, -1.0, 2.0, 1e-13);
    double worst = 0.0;
    for (int k = 0; k <= 300; ++k) {
        const double x = -1.0 + 3.0 * k / 300.0;
        worst = std::max(worst, std::fabs(s(x) - f(x)));
    }
    CHECK(worst < 1e-12);
    CHECK(s.degree() < 128);
}
