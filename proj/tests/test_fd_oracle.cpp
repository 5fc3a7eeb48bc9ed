#include <catch_amalgamated.hpp>

#include "memkernel/fd_oracle.hpp"

using namespace memkernel;
using Catch::Matchers::WithinAbs;

namespace {

const double pi = std::numbers::pi;
const EsjjParams reference{1.0, 0.5, 2.0, 0.3, 1.0};

// Values of a fine solution at the nodes of a coarser one (nested grids).
double coarse_gap(const GridSolution& fine, const GridSolution& coarse) {
    const std::size_t r = (fine.x_nodes.size() - 1) / (coarse.x_nodes.size() - 1);
    double g = 0.0;
    for (std::size_t i = 0; i < coarse.x_nodes.size(); ++i)
        g = std::max(g, std::fabs(fine.values(fine.t_nodes.size() - 1, i * r) -
                                  coarse.values(coarse.t_nodes.size() - 1, i)));
    return g;
}

}  // namespace

TEST_CASE("ESJJ direct solver") {
    SECTION("equilibrium") {
        EsjjProblem pr;
        pr.params = reference;
        pr.params.gamma = 0.0;
        const auto s = solve_pde_esjj(pr, FdGrid{16, 0.01});
        for (double v : s.values.data()) CHECK(v == 0.0);
    }
    SECTION("second order in space") {
        EsjjProblem pr;
        pr.params = reference;
        pr.horizon = 0.5;
        pr.u0 = [](double x) { return 0.5 * std::sin(pi * x); };
        pr.v0 = [](double x) { return x * (1 - x); };
        std::vector<GridSolution> s;
        for (int nx : {8, 16, 32}) s.push_back(solve_pde_esjj(pr, FdGrid{nx, 1e-4}));
        const double e1 = coarse_gap(s[1], s[0]), e2 = coarse_gap(s[2], s[1]);
        INFO("successive differences " << e1 << " " << e2);
        CHECK(e1 / e2 > 3.5);
    }
    SECTION("small lam approaches the rectangular-junction equation") {
        EsjjProblem pr;
        pr.params = EsjjParams{1.0, 0.5, 1.0, 0.3, 1.0};
        pr.horizon = 1.0;
        pr.u0 = [](double x) { return std::sin(pi * x); };
        auto run = [&](double lam) {
            pr.params.lam = lam;
            return solve_pde_esjj(pr, FdGrid{32, 1e-3});
        };
        const auto base = run(1e-12);
        const double g1 = max_abs_diff(run(1e-2).values, base.values);
        const double g2 = max_abs_diff(run(1e-3).values, base.values);
        CHECK(g2 < 0.2 * g1);
        CHECK(g2 < 1e-3);
    }
    SECTION("refusals") {
        EsjjProblem pr;
        pr.params = reference;
        CHECK_THROWS_AS(solve_pde_esjj(pr, FdGrid{64, 0.05}), StabilityError);
        CHECK_THROWS_AS(solve_pde_esjj(pr, FdGrid{64, 1e-3, FdGrid::Scheme::explicit_euler}), StabilityError);
        CHECK_THROWS_AS(solve_pde_esjj(pr, FdGrid{2, 1e-3}), DomainError);
        pr.horizon = 1.00005;
        CHECK_THROWS_AS(solve_pde_esjj(pr, FdGrid{16, 1e-3}), DomainError);
    }
    SECTION("explicit and semi-implicit schemes agree when both are stable") {
        EsjjProblem pr;
        pr.params = reference;
        pr.horizon = 0.5;
        const auto a = solve_pde_esjj(pr, FdGrid{16, 1e-3, FdGrid::Scheme::explicit_euler});
        const auto b = solve_pde_esjj(pr, FdGrid{16, 1e-3});
        CHECK(max_abs_diff(a.values, b.values) < 1e-3);
    }
}

TEST_CASE("Integro-differential FD solver") {
    DirichletProblem d;
    d.params = OperatorParams{1.0, 0.5, 0.5, 1.0};
    d.horizon = 1.0;
    d.u0 = [](double x) { return std::sin(pi * x); };
    SECTION("decoupled mode") {
        DirichletProblem m = d;
        m.params.b = 1e-300;
        const auto s = solve_integrodiff_fd(m, FdGrid{64, 1e-4, FdGrid::Scheme::semi_implicit, 100});
        double err = 0.0;
        for (std::size_t j = 0; j < s.u.t_nodes.size(); ++j)
            for (std::size_t i = 0; i < s.u.x_nodes.size(); ++i)
                err = std::max(err, std::fabs(s.u.values(j, i) - std::exp(-(pi * pi + 0.5) * s.u.t_nodes[j]) *
                                                                     std::sin(pi * s.u.x_nodes[i])));
        CHECK(err < 1e-3);
    }
    SECTION("memory state equals the memory integral of the computed u") {
        const double dt = 1e-3;
        const auto s = solve_integrodiff_fd(d, FdGrid{32, dt});
        const std::size_t J = s.u.t_nodes.size();
        for (std::size_t i : {5u, 16u}) {
            // Composite Simpson over the stored rows including t = 0.
            auto f = [&](std::size_t j) {
                const double tau = j * dt;
                const double u = j == 0 ? d.u0(s.u.x_nodes[i]) : s.u.values(j - 1, i);
                return std::exp(-(1.0 - tau)) * u;
            };
            double q = f(0) + f(J);
            for (std::size_t j = 1; j < J; ++j) q += (j % 2 ? 4.0 : 2.0) * f(j);
            q *= dt / 3.0;
            CHECK_THAT(s.memory(J - 1, i), WithinAbs(q, 1e-6));
        }
    }
    SECTION("a single mode follows its memory system") {
        // The sine mode of the discrete Laplacian reduces the scheme to
        // k' = -(eps mu_h + a) k - b w, w' = -beta w + k, integrated here by RK4.
        const int nx = 32;
        const double h = 1.0 / nx, dt = 1e-4;
        const double mu = 4.0 / (h * h) * std::pow(std::sin(pi * h / 2), 2);
        const auto& p = d.params;
        const auto s = solve_integrodiff_fd(d, FdGrid{nx, dt, FdGrid::Scheme::semi_implicit, 500});
        double k = 1.0, w = 0.0, t = 0.0, err = 0.0;
        auto rhs = [&](double kk, double ww) {
            return std::pair{-(p.eps * mu + p.a) * kk - p.b * ww, -p.beta * ww + kk};
        };
        const double hs = 1e-3;
        for (std::size_t j = 0; j < s.u.t_nodes.size(); ++j) {
            while (t < s.u.t_nodes[j] - 1e-12) {
                auto [a1, b1] = rhs(k, w);
                auto [a2, b2] = rhs(k + 0.5 * hs * a1, w + 0.5 * hs * b1);
                auto [a3, b3] = rhs(k + 0.5 * hs * a2, w + 0.5 * hs * b2);
                auto [a4, b4] = rhs(k + hs * a3, w + hs * b3);
                k += hs / 6 * (a1 + 2 * a2 + 2 * a3 + a4);
                w += hs / 6 * (b1 + 2 * b2 + 2 * b3 + b4);
                t += hs;
            }
            for (std::size_t i = 0; i < s.u.x_nodes.size(); ++i)
                err = std::max(err, std::fabs(s.u.values(j, i) - k * std::sin(pi * s.u.x_nodes[i])));
        }
        CHECK(err < 5e-4);
    }
    SECTION("blow-up is detected") {
        DirichletProblem b = d;
        b.horizon = 5.0;
        b.u0 = [](double x) { return 20 * std::sin(pi * x); };
        b.source = SourceSpec::pointwise([](double, double, double u) { return u * u; }, 1e9, 1e9);
        CHECK_THROWS_AS(solve_integrodiff_fd(b, FdGrid{16, 1e-3}), BlowUp);
    }
    SECTION("explicit scheme refuses an unstable step") {
        CHECK_THROWS_AS(solve_integrodiff_fd(d, FdGrid{64, 1e-3, FdGrid::Scheme::explicit_euler}), StabilityError);
    }
}

TEST_CASE("Both FD paths of the ESJJ equivalence converge to each other") {
    EsjjProblem pr;
    pr.params = reference;
    pr.horizon = 1.0;
    pr.u0 = [](double x) { return 0.4 * std::sin(pi * x); };
    pr.v0 = [](double x) { return 0.2 * std::sin(2 * pi * x); };
    auto gap = [&](int nx, double dt) {
        const FdGrid g{nx, dt, FdGrid::Scheme::semi_implicit, static_cast<int>(std::lround(0.1 / dt))};
        const auto direct = solve_pde_esjj(pr, g);
        const auto mapped = gauge_forward(solve_integrodiff_fd(mapped_problem(pr), g).u, pr.params.lam);
        return max_abs_diff(direct.values, mapped.values);
    };
    const double coarse = gap(16, 4e-3), fine = gap(32, 1e-3);
    INFO("gaps " << coarse << " " << fine);
    CHECK(fine < 0.5 * coarse);
    CHECK(fine < 2e-3);
}

TEST_CASE("Steady two-point problem") {
    const OperatorParams p{1.0, 0.5, 0.5, 1.0};
    const StripDomain d{1.0};
    for (double v : steady_bvp(0.0, 0.0, p, d, 16)) CHECK(v == 0.0);
    auto err = [&](int nx) {
        const auto u = steady_bvp(1.0, 0.0, p, d, nx);
        double e = 0.0;
        for (int i = 0; i <= nx; ++i) {
            const double x = static_cast<double>(i) / nx;
            e = std::max(e, std::fabs(u[i] - std::sinh(1 - x) / std::sinh(1.0)));
        }
        return e;
    };
    CHECK(err(32) < 1e-4);
    CHECK(err(16) / err(32) > 3.9);
    const OperatorParams flat{1.0, 5e-9, 5e-9, 1.0};
    const auto u = steady_bvp(2.0, -1.0, flat, d, 20);
    for (int i = 0; i <= 20; ++i) CHECK_THAT(u[i], WithinAbs(2.0 - 3.0 * i / 20.0, 1e-7));
    CHECK_THROWS_AS(steady_bvp(1.0, 0.0, p, d, 2), DomainError);
}
