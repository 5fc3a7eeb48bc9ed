#include <catch_amalgamated.hpp>

#include <random>

#include "memkernel/esjj.hpp"
#include "memkernel/fd_oracle.hpp"

using namespace memkernel;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const EsjjParams reference{1.0, 0.5, 2.0, 0.3, 1.0};
const SeriesControl ctl{};

// Sup norm over interior nodes of the ESJJ residual
//   eps u_xxt + u_xx - u_tt - eps lam u_xt - lam u_x - alpha u_t - sin u + gamma
// by centred differences on a solution grid, over rows whose stencil starts at t >= t_min.
double esjj_residual(const GridSolution& s, const EsjjParams& e, double t_min) {
    const std::size_t J = s.t_nodes.size(), n = s.x_nodes.size();
    const double h = s.x_nodes[1] - s.x_nodes[0], dt = s.t_nodes[1] - s.t_nodes[0];
    auto u = [&](std::size_t j, std::size_t i) { return s.values(j, i); };
    double worst = 0.0;
    for (std::size_t j = 1; j + 1 < J; ++j)
        for (std::size_t i = 1; i + 1 < n; ++i) {
            if (s.t_nodes[j - 1] < t_min) continue;
            auto uxx = [&](std::size_t jj) { return (u(jj, i + 1) - 2 * u(jj, i) + u(jj, i - 1)) / (h * h); };
            auto ux = [&](std::size_t jj) { return (u(jj, i + 1) - u(jj, i - 1)) / (2 * h); };
            const double ut = (u(j + 1, i) - u(j - 1, i)) / (2 * dt);
            const double utt = (u(j + 1, i) - 2 * u(j, i) + u(j - 1, i)) / (dt * dt);
            const double uxxt = (uxx(j + 1) - uxx(j - 1)) / (2 * dt);
            const double uxt = (ux(j + 1) - ux(j - 1)) / (2 * dt);
            const double r = e.eps * uxxt + uxx(j) - utt - e.eps * e.lam * uxt - e.lam * ux(j) - e.alpha * ut -
                             std::sin(u(j, i)) + e.gamma;
            worst = std::max(worst, std::fabs(r));
        }
    return worst;
}

}  // namespace

TEST_CASE("Parameter mapping") {
    const OperatorParams p = map_params(reference);
    CHECK_THAT(p.a, WithinAbs(0.5, 1e-15));
    CHECK_THAT(p.b, WithinAbs(0.5, 1e-15));
    CHECK_THAT(p.beta, WithinAbs(1.0, 1e-15));
    CHECK(p.eps == 1.0);
    CHECK_THAT(p.sigma0(), WithinAbs(1.0, 1e-15));

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int k = 0; k < 100; ++k) {
        EsjjParams e;
        e.eps = 0.05 + 3.0 * U(rng);
        e.alpha = U(rng) * 0.99 / e.eps;
        const double b = (1 - e.alpha * e.eps) / (e.eps * e.eps);
        e.lam = 2 * std::sqrt(b) * (1.0 + 1e-3 + 3.0 * U(rng));
        const OperatorParams q = map_params(e);
        CHECK(std::fabs(q.sigma0() - e.lam / 2) <= 1e-14 * std::max(1.0, e.lam));
        CHECK(q.a > 0);
        CHECK(q.b > 0);
    }
}

TEST_CASE("Infeasible mappings name the violated inequality") {
    EsjjParams e{0.5, 3.0, 2.0, 0.0, 1.0};
    CHECK_THROWS_WITH(map_params(e), ContainsSubstring("alpha*eps"));
    e = EsjjParams{1.0, 0.5, 1.0, 0.0, 1.0};
    CHECK_THROWS_WITH(map_params(e), ContainsSubstring("lam^2/4"));
    CHECK_THROWS_AS(map_params(e), MappingInfeasible);
    e = EsjjParams{-1.0, 0.5, 1.0, 0.0, 1.0};
    CHECK_THROWS_AS(map_params(e), DomainError);
}

TEST_CASE("Gauge transform") {
    GridSolution u;
    u.x_nodes = uniform_nodes(0.0, 1.0, 10);
    u.t_nodes = {0.5, 1.0};
    u.values = Matrix(2, 11, 1.0);
    const GridSolution same = gauge_forward(u, 0.0);
    CHECK(max_abs_diff(same.values, u.values) == 0.0);
    const GridSolution op = gauge_inverse(u, 3.0);
    for (std::size_t i = 0; i <= 10; ++i)
        CHECK_THAT(op.values(1, i), WithinRel(std::exp(-1.5 * u.x_nodes[i]), 1e-15));
    for (std::size_t i = 0; i <= 10; ++i) u.values(0, i) = std::sin(7.0 * i);
    CHECK(max_abs_diff(gauge_inverse(gauge_forward(u, 2.5), 2.5).values, u.values) < 1e-14);
}

TEST_CASE("f1 source") {
    EsjjParams e = reference;
    e.gamma = 0.0;
    CHECK(f1_source(0.3, 0.0, e) == 0.0);
    e.lam = 0.0;
    e.gamma = 0.4;
    CHECK_THAT(f1_source(0.3, 1.1, e), WithinAbs(std::sin(1.1) - 0.4, 1e-15));
    for (double x : {0.0, 0.5, 1.0})
        for (double u : {-5.0, 0.3, 9.0})
            CHECK(std::fabs(f1_source(x, u, reference)) <= std::exp(-reference.lam * x / 2) * (1 + reference.gamma));
}

TEST_CASE("Causal ESJJ source") {
    const std::vector<double> x = uniform_nodes(0.0, 1.0, 8);
    const std::size_t n = x.size();
    SECTION("vanishes for zero data, zero bias, zero state") {
        EsjjParams e = reference;
        e.gamma = 0.0;
        EsjjSource src(e, map_params(e), {}, {});
        src.reset(x, 0.1);
        std::vector<double> u(n, 0.0), F(n, 1.0);
        for (int j = 0; j <= 5; ++j) {
            src.advance(j, 0.1 * j, u.data(), F.data());
            for (double v : F) CHECK(v == 0.0);
        }
    }
    SECTION("frozen state reproduces the closed-form memory integral") {
        // F = -eps (1 - e^{-t/eps}) (sin u* - gamma) + v0 e^{-t/eps} for lam = 0.
        EsjjParams e{0.7, 0.5, 0.0, 0.25, 1.0};
        const OperatorParams p{0.7, 0.3, 0.5, 1 / 0.7};
        const double v0 = 0.4, us = 0.9;
        EsjjSource src(e, p, {}, [=](double) { return v0; });
        src.reset(x, 0.05);
        std::vector<double> u(n, us), F(n);
        for (int j = 0; j <= 40; ++j) {
            const double t = 0.05 * j;
            src.advance(j, t, u.data(), F.data());
            const double want =
                e.eps * std::expm1(-t / e.eps) * (std::sin(us) - e.gamma) + v0 * std::exp(-t / e.eps);
            CHECK_THAT(F[3], WithinAbs(want, 1e-14));
        }
    }
    SECTION("Lipschitz metadata bounds sampled difference quotients") {
        EsjjProblem pr;
        pr.params = reference;
        pr.horizon = 2.0;
        const SourceSpec spec = assemble_F(pr);
        CHECK(spec.lipschitz_const <= reference.eps);
        auto run = [&](double shift, std::vector<double>& last) {
            spec.causal->reset(x, 0.05);
            std::vector<double> u(n), F(n);
            for (int j = 0; j <= 40; ++j) {
                for (std::size_t i = 0; i < n; ++i) u[i] = std::sin(3.0 * x[i] + 0.1 * j) + shift;
                spec.causal->advance(j, 0.05 * j, u.data(), F.data());
            }
            last = F;
        };
        std::vector<double> a, b;
        run(0.0, a);
        run(1e-6, b);
        for (std::size_t i = 0; i < n; ++i) CHECK(std::fabs(b[i] - a[i]) / 1e-6 <= spec.lipschitz_const + 1e-6);
    }
}

TEST_CASE("ESJJ solve") {
    SECTION("zero data and zero bias stay at rest") {
        EsjjProblem pr;
        pr.params = reference;
        pr.params.gamma = 0.0;
        pr.horizon = 1.0;
        const auto s = solve_esjj(pr, GridSpec{16, 10}, ctl);
        for (double v : s.values.data()) CHECK(v == 0.0);
    }
    SECTION("reference problem against the direct PDE oracle") {
        EsjjProblem pr;
        pr.params = reference;
        pr.horizon = 2.0;
        const auto s = solve_esjj(pr, GridSpec{64, 100}, ctl);
        const auto fd = solve_pde_esjj(pr, FdGrid{64, 1e-3, FdGrid::Scheme::semi_implicit, 20});
        CHECK(max_abs_diff(s.values, fd.values) < 2e-3);
        CHECK(s.diagnostics.max_ratio() < 1.0);
    }
    SECTION("non-zero data: boundary phases are recovered and the PDE residual shrinks") {
        EsjjProblem pr;
        pr.params = EsjjParams{0.5, 0.8, 4.0, 0.2, 1.0};
        pr.horizon = 1.0;
        const double pi = std::numbers::pi;
        pr.u0 = [=](double x) { return 0.3 * x + 0.2 * std::sin(pi * x); };
        pr.v0 = [=](double x) { return 0.1 * (1 - x) + 0.4 * std::sin(pi * x); };
        pr.g1 = [](double t) { return 0.1 * std::sin(t); };
        pr.g2 = [](double t) { return 0.3 + 0.05 * (1 - std::cos(t)); };
        const auto coarse = solve_esjj(pr, GridSpec{16, 20}, ctl);
        const auto fine = solve_esjj(pr, GridSpec{32, 40}, ctl);
        CHECK(fine.diagnostics.boundary_error < 1e-9);
        // The data are compatible to first order only, so u_tt has a corner layer at t = 0;
        // the residual is measured after it.
        const double r1 = esjj_residual(coarse, pr.params, 0.25), r2 = esjj_residual(fine, pr.params, 0.25);
        INFO("residuals " << r1 << " " << r2);
        CHECK(r2 < 0.3 * r1);
        const auto fd = solve_pde_esjj(pr, FdGrid{32, 2.5e-4, FdGrid::Scheme::semi_implicit, 100});
        CHECK(max_abs_diff(fine.values, fd.values) < 2e-3);
    }
}

TEST_CASE("A-priori bound") {
    const OperatorParams p = map_params(reference);
    CHECK_THAT(apriori_bound(0.0, 0.7, 0.4, 0.2, p), WithinAbs(2 * (0.7 + p.beta1() * 0.2), 1e-15));
    CHECK_THAT(apriori_bound(200.0, 0.7, 0.4, 0.2, p), WithinAbs(2 * p.beta1() * 0.2, 1e-12));
    const double want =
        2 * ((1 + std::numbers::pi * std::sqrt(0.5)) * std::exp(-0.5) + (std::exp(-1.0) - std::exp(-0.5)) / -0.5 + 2);
    CHECK_THAT(apriori_bound(1.0, 1, 1, 1, p), WithinAbs(want, 1e-14));
    CHECK_THAT(apriori_bound(1.0, 1, 1, 1, p), WithinAbs(8.862410913097229, 1e-13));
    CHECK_THROWS_AS(apriori_bound(1.0, -1, 0, 0, p), DomainError);
    CHECK_THROWS_AS(apriori_bound(-1.0, 1, 0, 0, p), DomainError);
}

TEST_CASE("Boundary asymptote") {
    CHECK_THAT(boundary_asymptote(0.0, 0.7, -0.2, reference), WithinAbs(0.7, 1e-15));
    CHECK_THAT(boundary_asymptote(1.0, 0.7, -0.2, reference), WithinAbs(-0.2, 1e-15));
    CHECK_THAT(boundary_asymptote(0.5, 1.0, 0.0, reference), WithinAbs(std::sinh(0.5) / std::sinh(1.0), 1e-15));
    CHECK_THAT(boundary_asymptote(0.5, 1.0, 0.0, reference), WithinAbs(0.443409441985037, 1e-15));
    // Composition of the boundary terms with the steady kernel: -2 eps S(x) on the left and,
    // under the odd extension S(x - L) = -S(L - x), -2 eps S(L - x) on the right.
    const OperatorParams p = map_params(reference);
    const StripDomain d{reference.length};
    for (double x : {0.1, 0.3, 0.8}) {
        CHECK_THAT(boundary_asymptote(x, 1.0, 0.0, reference),
                   WithinAbs(-2 * p.eps * steady_boundary_kernel(x, p, d), 1e-15));
        CHECK_THAT(boundary_asymptote(x, 0.0, 1.0, reference),
                   WithinAbs(-2 * p.eps * steady_boundary_kernel(d.length - x, p, d), 1e-15));
    }
}
