#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "memkernel/esjj.hpp"
#include "memkernel/grid.hpp"
#include "memkernel/ibvp_solver.hpp"

// Finite-difference reference solvers. They share no code with the representation
// formula and serve only as verification oracles.

namespace memkernel {

struct FdGrid {
    enum class Scheme { explicit_euler, semi_implicit };

    int nx = 64;  ///< cells
    double dt = 1e-3;
    Scheme scheme = Scheme::semi_implicit;
    int output_every = 1;  ///< store every k-th step
};

namespace detail {

inline constexpr double kBlowUp = 1e6;

// Solves (1 + 2c) x_i - c x_{i-1} - c x_{i+1} = rhs_i for interior nodes, Dirichlet ends given in x.
inline void solve_implicit_diffusion(double c, std::vector<double>& x, const std::vector<double>& rhs) {
    const std::size_t n = x.size();
    if (n < 3) return;
    const std::size_t m = n - 2;
    std::vector<double> cp(m), dp(m);
    const double diag = 1.0 + 2.0 * c;
    for (std::size_t k = 0; k < m; ++k) {
        double r = rhs[k + 1];
        if (k == 0) r += c * x[0];
        if (k == m - 1) r += c * x[n - 1];
        const double denom = diag - (k > 0 ? -c * cp[k - 1] : 0.0);
        cp[k] = -c / denom;
        dp[k] = (r - (k > 0 ? -c * dp[k - 1] : 0.0)) / denom;
    }
    for (std::size_t k = m; k-- > 0;) x[k + 1] = dp[k] - (k + 1 < m ? cp[k] * x[k + 2] : 0.0);
}

inline int step_count(double T, double dt) {
    const double n = T / dt;
    const int k = static_cast<int>(std::lround(n));
    if (k < 1 || std::fabs(n - k) > 1e-9 * std::max(1.0, n))
        throw DomainError("horizon must be an integer multiple of dt");
    return k;
}

inline void check_blowup(const std::vector<double>& u, double t) {
    for (double v : u)
        if (!std::isfinite(v) || std::fabs(v) > kBlowUp)
            throw BlowUp("sup norm exceeded 1e6 at t = " + std::to_string(t));
}

}  // namespace detail

/// Direct solver of the ESJJ equation as u_t = v,
///   v_t = eps v_xx - eps lam v_x - alpha v + u_xx - lam u_x - sin u + gamma,
/// implicit in eps v_xx (semi-implicit scheme), explicit elsewhere.
inline GridSolution solve_pde_esjj(const EsjjProblem& prob, const FdGrid& grid) {
    const auto& e = prob.params;
    e.validate();
    if (grid.nx < 3) throw DomainError("FD grid needs nx >= 3");
    if (!(grid.dt > 0) || grid.output_every < 1) throw DomainError("FD grid needs dt > 0 and output_every >= 1");
    const double L = e.length, h = L / grid.nx, dt = grid.dt;
    if (dt > h) throw StabilityError("dt must not exceed h (wave speed 1)");
    if (dt > 2.0 / (e.eps * e.lam * e.lam)) throw StabilityError("dt must not exceed 2/(eps lam^2)");
    if (dt > 2.0 / e.alpha) throw StabilityError("dt must not exceed 2/alpha");
    const bool implicit = grid.scheme == FdGrid::Scheme::semi_implicit;
    if (!implicit && dt > h * h / (2.0 * e.eps)) throw StabilityError("explicit scheme needs dt <= h^2/(2 eps)");
    const int steps = detail::step_count(prob.horizon, dt);

    const int n = grid.nx + 1;
    auto x = uniform_nodes(0.0, L, grid.nx);
    std::vector<double> u(n), v(n), rhs(n), vn(n);
    auto g1 = [&](double t) { return prob.g1 ? prob.g1(t) : 0.0; };
    auto g2 = [&](double t) { return prob.g2 ? prob.g2(t) : 0.0; };
    for (int i = 0; i < n; ++i) {
        u[i] = prob.u0 ? prob.u0(x[i]) : 0.0;
        v[i] = prob.v0 ? prob.v0(x[i]) : 0.0;
    }

    GridSolution out;
    out.x_nodes = x;
    const int stored = steps / grid.output_every;
    out.values = Matrix(stored, n);
    const double c = e.eps * dt / (h * h);
    int row = 0;
    for (int s = 1; s <= steps; ++s) {
        const double t0 = (s - 1) * dt, t1 = s == steps ? prob.horizon : s * dt;
        for (int i = 1; i < n - 1; ++i) {
            const double uxx = (u[i + 1] - 2 * u[i] + u[i - 1]) / (h * h);
            const double ux = (u[i + 1] - u[i - 1]) / (2 * h);
            const double vx = (v[i + 1] - v[i - 1]) / (2 * h);
            double acc = -e.eps * e.lam * vx - e.alpha * v[i] + uxx - e.lam * ux - std::sin(u[i]) + e.gamma;
            if (!implicit) acc += e.eps * (v[i + 1] - 2 * v[i] + v[i - 1]) / (h * h);
            rhs[i] = v[i] + dt * acc;
        }
        // Boundary velocities make u hit the Dirichlet data exactly.
        vn[0] = (g1(t1) - u[0]) / dt;
        vn[n - 1] = (g2(t1) - u[n - 1]) / dt;
        if (implicit) {
            detail::solve_implicit_diffusion(c, vn, rhs);
        } else {
            for (int i = 1; i < n - 1; ++i) vn[i] = rhs[i];
        }
        v = vn;
        for (int i = 0; i < n; ++i) u[i] += dt * v[i];
        u[0] = g1(t1);
        u[n - 1] = g2(t1);
        detail::check_blowup(u, t1);
        (void)t0;
        if (s % grid.output_every == 0) {
            out.t_nodes.push_back(t1);
            for (int i = 0; i < n; ++i) out.values(row, i) = u[i];
            ++row;
        }
    }
    return out;
}

struct IntegroFdResult {
    GridSolution u;
    Matrix memory;  ///< w(x, t) = int_0^t e^{-beta(t - tau)} u dtau on the stored rows
};

/// Integro-differential equation as the local system
///   u_t = eps u_xx - a u - b w + F,  w_t = -beta w + u,  w(., 0) = 0,
/// implicit in eps u_xx, trapezoidal exponential update of w.
inline IntegroFdResult solve_integrodiff_fd(const DirichletProblem& prob, const FdGrid& grid) {
    prob.validate();
    const auto& p = prob.params;
    if (grid.nx < 3) throw DomainError("FD grid needs nx >= 3");
    if (!(grid.dt > 0) || grid.output_every < 1) throw DomainError("FD grid needs dt > 0 and output_every >= 1");
    const double L = prob.domain.length, h = L / grid.nx, dt = grid.dt;
    const bool implicit = grid.scheme == FdGrid::Scheme::semi_implicit;
    if (dt > 2.0 / (p.a + std::sqrt(p.b))) throw StabilityError("dt must not exceed 2/(a + sqrt(b))");
    if (!implicit && dt > h * h / (2.0 * p.eps)) throw StabilityError("explicit scheme needs dt <= h^2/(2 eps)");
    const int steps = detail::step_count(prob.horizon, dt);

    const int n = grid.nx + 1;
    auto x = uniform_nodes(0.0, L, grid.nx);
    std::vector<double> u(n), w(n, 0.0), F(n, 0.0), rhs(n), un(n);
    for (int i = 0; i < n; ++i) u[i] = prob.u0 ? prob.u0(x[i]) : 0.0;
    auto g1 = [&](double t) { return prob.g1 ? prob.g1(t) : 0.0; };
    auto g2 = [&](double t) { return prob.g2 ? prob.g2(t) : 0.0; };
    const auto& src = prob.source;
    if (src.causal) src.causal->reset(x, dt);

    auto eval_F = [&](int s, double t) {
        if (src.kind == SourceSpec::Kind::linear_f) {
            for (int i = 0; i < n; ++i) F[i] = src.f ? src.f(x[i], t) : 0.0;
        } else if (src.causal) {
            src.causal->advance(s, t, u.data(), F.data());
        } else {
            for (int i = 0; i < n; ++i) F[i] = src.F(x[i], t, u[i]);
        }
        for (double v : F)
            if (!std::isfinite(v)) throw SourceEvaluationError("non-finite source value at t = " + std::to_string(t));
    };

    IntegroFdResult res;
    res.u.x_nodes = x;
    const int stored = steps / grid.output_every;
    res.u.values = Matrix(stored, n);
    res.memory = Matrix(stored, n);
    const double c = p.eps * dt / (h * h);
    const double E = std::exp(-p.beta * dt);
    int row = 0;
    for (int s = 1; s <= steps; ++s) {
        const double t0 = (s - 1) * dt, t1 = s == steps ? prob.horizon : s * dt;
        eval_F(s - 1, t0);
        for (int i = 1; i < n - 1; ++i) {
            double r = u[i] + dt * (-p.a * u[i] - p.b * w[i] + F[i]);
            if (!implicit) r += dt * p.eps * (u[i + 1] - 2 * u[i] + u[i - 1]) / (h * h);
            rhs[i] = r;
        }
        un[0] = g1(t1);
        un[n - 1] = g2(t1);
        if (implicit) {
            detail::solve_implicit_diffusion(c, un, rhs);
        } else {
            for (int i = 1; i < n - 1; ++i) un[i] = rhs[i];
        }
        for (int i = 0; i < n; ++i) w[i] = E * w[i] + 0.5 * dt * (E * u[i] + un[i]);
        u = un;
        detail::check_blowup(u, t1);
        if (s % grid.output_every == 0) {
            res.u.t_nodes.push_back(t1);
            for (int i = 0; i < n; ++i) {
                res.u.values(row, i) = u[i];
                res.memory(row, i) = w[i];
            }
            ++row;
        }
    }
    return res;
}

/// Nodal solution of -eps u'' + (a + b/beta) u = 0, u(0) = g1_inf, u(L) = g2_inf.
inline std::vector<double> steady_bvp(double g1_inf, double g2_inf, const OperatorParams& p, const StripDomain& d,
                                      int nx) {
    if (nx < 3) throw DomainError("steady_bvp needs nx >= 3");
    require_finite(g1_inf, "g1_inf");
    require_finite(g2_inf, "g2_inf");
    const double h = d.length / nx;
    const double k = (p.a + p.b / p.beta) * h * h / p.eps;
    const double diag = 2.0 + k;
    if (!(diag > 0) || !std::isfinite(diag)) throw NumericalFailure("singular steady system");
    std::vector<double> u(nx + 1, 0.0);
    u[0] = g1_inf;
    u[nx] = g2_inf;
    const int m = nx - 1;
    std::vector<double> cp(m), dp(m);
    for (int i = 0; i < m; ++i) {
        double r = 0.0;
        if (i == 0) r += g1_inf;
        if (i == m - 1) r += g2_inf;
        const double denom = diag + (i > 0 ? cp[i - 1] : 0.0);
        if (denom == 0.0) throw NumericalFailure("singular steady system");
        cp[i] = -1.0 / denom;
        dp[i] = (r + (i > 0 ? dp[i - 1] : 0.0)) / denom;
    }
    for (int i = m; i-- > 0;) u[i + 1] = dp[i] - (i + 1 < m ? cp[i] * u[i + 2] : 0.0);
    return u;
}

}  // namespace memkernel
