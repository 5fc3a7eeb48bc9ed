#include <catch_amalgamated.hpp>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "memkernel/theta_green.hpp"

using namespace memkernel;
using Catch::Matchers::WithinAbs;

namespace {

const OperatorParams ref{1.0, 0.5, 0.5, 1.0};
const SeriesControl ctl{};
const StripDomain unit{1.0};

}  // namespace

TEST_CASE("theta is even, converged in the image count, and reduces to K with no images") {
    for (double x : {0.1, 0.4, 0.9, 1.7})
        CHECK_THAT(theta(x, 0.6, ref, unit, ctl), WithinAbs(theta(-x, 0.6, ref, unit, ctl), 1e-15));
    SeriesControl n8 = ctl, n16 = ctl;
    n8.n_images = 8;
    n16.n_images = 16;
    CHECK(std::fabs(theta(0.3, 0.5, ref, unit, n8) - theta(0.3, 0.5, ref, unit, n16)) < 1e-10);
    CHECK(theta_images(0.3, 0.01, ref, unit, ctl, 0) == eval_k(0.3, 0.01, ref, ctl));
}

TEST_CASE("Truncation errors report the image count that would suffice") {
    SeriesControl few = ctl;
    few.n_images = 1;
    try {
        theta(0.2, 3.0, ref, unit, few);
        FAIL("expected InsufficientTruncation");
    } catch (const InsufficientTruncation& e) {
        CHECK(e.needed() > 1);
        few.n_images = e.needed();
        CHECK_NOTHROW(theta(0.2, 3.0, ref, unit, few));
    }
    CHECK_THROWS_AS(theta(0.2, 1e-9, ref, unit, ctl), EvaluationWindowError);
    CHECK_THROWS_AS(theta(2.5, 1.0, ref, unit, ctl), DomainError);
}

TEST_CASE("theta_x is odd, tends to K_x at the origin, and vanishes for large t") {
    for (double x : {0.1, 0.45, 0.8})
        CHECK_THAT(theta_x(-x, 0.4, ref, unit, ctl), WithinAbs(-theta_x(x, 0.4, ref, unit, ctl), 1e-15));
    // The image remainder J(r, t) -> 0 as x -> 0.
    double prev = INFINITY;
    for (double x : {1e-1, 1e-2, 1e-3}) {
        const double gap = std::fabs(theta_x(x, 0.5, ref, unit, ctl) - eval_kx(x, 0.5, ref, ctl));
        CHECK(gap < prev);
        prev = gap;
    }
    CHECK(prev < 1e-3);
    CHECK(std::fabs(theta_x_retry(0.5, 50.0, ref, unit, ctl)) < 1e-8);
}

TEST_CASE("Green function: Dirichlet property and symmetry") {
    for (double t : {0.01, 0.2, 1.0, 5.0})
        for (double xi : {0.1, 0.5, 0.77}) {
            CHECK(std::fabs(green(0.0, xi, t, ref, unit, ctl)) < 1e-12);
            CHECK(std::fabs(green(1.0, xi, t, ref, unit, ctl)) < 1e-12);
            for (double x : {0.2, 0.6})
                CHECK_THAT(green(x, xi, t, ref, unit, ctl), WithinAbs(green(xi, x, t, ref, unit, ctl), 1e-10));
        }
}

TEST_CASE("Eigenfunction oracle") {
    const OperatorParams decoupled{0.7, 0.4, 1e-300, 2.0};
    const double mu = std::pow(std::numbers::pi, 2);
    CHECK_THAT(memory_mode(mu, 0.3, decoupled), WithinAbs(std::exp(-(0.7 * mu + 0.4) * 0.3), 1e-15));

    double worst = 0.0;
    for (double t : {0.05, 0.1, 0.5, 1.0, 5.0})
        for (int i = 0; i <= 8; ++i)
            for (int k = 0; k <= 8; ++k) {
                const double x = i / 8.0, xi = k / 8.0;
                worst = std::max(worst,
                                 std::fabs(green(x, xi, t, ref, unit, ctl) - eigen_green(x, xi, t, ref, unit, 200)));
            }
    CHECK(worst < 1e-8);
    CHECK_THROWS_AS(eigen_green(0.3, 0.4, 0.001, ref, unit, 10), InsufficientModes);

    // Orthogonality: projecting on sin(pi xi) isolates mode 1.
    boost::math::quadrature::gauss_kronrod<double, 61> gk;
    const double t = 0.4, x = 0.3;
    const double proj = gk.integrate(
        [&](double xi) { return eigen_green(x, xi, t, ref, unit, 200) * std::sin(std::numbers::pi * xi); }, 0.0, 1.0,
        15, 1e-13);
    CHECK_THAT(proj, WithinAbs(memory_mode(mu, t, ref) * std::sin(std::numbers::pi * x), 1e-9));
}

TEST_CASE("Scalar memory mode solves its ODE system") {
    // k' = -(eps mu + a) k - b w, w' = -beta w + k, checked by central differences.
    const double mu = 9.0, t = 0.7, h = 1e-4;
    const OperatorParams p{0.8, 0.3, 2.0, 1.5};
    auto k = [&](double s) { return memory_mode(mu, s, p); };
    boost::math::quadrature::gauss_kronrod<double, 61> gk;
    auto w = [&](double s) { return gk.integrate([&](double tau) { return std::exp(-p.beta * (s - tau)) * k(tau); }, 0.0, s); };
    const double dk = (k(t + h) - k(t - h)) / (2 * h);
    CHECK_THAT(dk, WithinAbs(-(p.eps * mu + p.a) * k(t) - p.b * w(t), 1e-7));
    CHECK_THAT(k(0.0), WithinAbs(1.0, 1e-15));
    const OperatorParams oscill{0.01, 0.01, 50.0, 0.01};
    CHECK(std::isfinite(memory_mode(1.0, 3.0, oscill)));
}

TEST_CASE("Steady boundary kernel") {
    CHECK(steady_boundary_kernel(1.0, ref, unit) == 0.0);
    CHECK_THAT(steady_boundary_kernel(0.0, ref, unit), WithinAbs(-0.5, 1e-15));
    CHECK_THAT(steady_boundary_kernel(0.5, ref, unit), WithinAbs(std::sinh(-0.5) / (2 * std::sinh(1.0)), 1e-15));
    CHECK_THAT(steady_boundary_kernel(0.5, ref, unit), WithinAbs(-0.2217047209925185, 1e-15));
    for (double x : {0.1, 0.5, 0.9})
        CHECK_THAT(theta_x_time_integral(x, 50.0, ref, unit, ctl), WithinAbs(steady_boundary_kernel(x, ref, unit), 1e-5));
}

TEST_CASE("L1 bound on theta and saturation of the theta_x time integral") {
    boost::math::quadrature::gauss_kronrod<double, 61> gk;
    for (double t : {0.1, 0.5, 1.0, 2.0}) {
        const double l1 = gk.integrate(
            [&](double xi) { return std::fabs(theta(std::fabs(0.5 - xi), t, ref, unit, ctl)); }, 0.0, 1.0, 15, 1e-12);
        CHECK(l1 <= (1 + std::sqrt(ref.b) * std::numbers::pi * t) * std::exp(-ref.omega() * t));
    }
    double prev = 0.0;
    for (double T : {5.0, 10.0, 25.0, 50.0}) {
        const double v = theta_x_time_integral(0.5, T, ref, unit, ctl, true);
        CHECK(v >= prev - 1e-12);
        prev = v;
    }
    const double a = theta_x_time_integral(0.5, 25.0, ref, unit, ctl, true);
    CHECK(std::fabs(prev - a) < 1e-6);
}

TEST_CASE("Convolution limits") {
    auto fn = [](std::function<double(double)> v, double lim, double init) {
        TimeFunction f;
        f.value = std::move(v);
        f.limit = lim;
        f.initial = init;
        return f;
    };
    const auto ramp = fn([](double t) { return -std::expm1(-t); }, 1.0, 0.0);
    auto c1 = convolution_limit(fn([](double) { return 1.0; }, 1.0, 1.0), ramp, 40.0);
    CHECK_THAT(c1.numeric, WithinAbs(1.0, 1e-9));
    CHECK(c1.predicted == 1.0);
    auto c2 = convolution_limit(fn([](double t) { return std::exp(-t); }, 0.0, 1.0), ramp, 40.0);
    CHECK_THAT(c2.numeric, WithinAbs(0.0, 1e-9));
    // Closed form: int_0^T (1 + e^{-2(T - s)}) e^{-s} ds = 1 - e^{-2T}.
    auto c4 = convolution_limit(fn([](double t) { return 1 + std::exp(-2 * t); }, 1.0, 2.0), ramp, 40.0);
    CHECK_THAT(c4.numeric, WithinAbs(1 - std::exp(-80.0), 1e-9));
    CHECK(std::fabs(c4.numeric - c4.predicted) < 1e-6);
    CHECK_THROWS_AS(convolution_limit(fn([](double t) { return 1.0 / (1.0 + t); }, 0.0, 1.0), ramp, 40.0),
                    NonConvergence);
    CHECK_THROWS_AS(convolution_limit(fn([](double) { return 1.0; }, 1.0, 1.0), fn(ramp.value, 1.0, 0.5), 40.0),
                    NonConvergence);
}
