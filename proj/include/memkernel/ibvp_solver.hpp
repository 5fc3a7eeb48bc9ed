#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "memkernel/green_weights.hpp"
#include "memkernel/grid.hpp"
#include "memkernel/parallel.hpp"
#include "memkernel/theta_green.hpp"

namespace memkernel {

using SpaceFn = std::function<double(double)>;
using TimeFn = std::function<double(double)>;
using SpaceTimeFn = std::function<double(double, double)>;
using PointwiseSource = std::function<double(double, double, double)>;

/// Source whose value at t_j may depend on the whole history u(., t_0..t_j).
/// Rows are fed in time order after every reset().
class CausalSource {
public:
    virtual ~CausalSource() = default;
    virtual void reset(const std::vector<double>& x_nodes, double dt) = 0;
    virtual void advance(int j, double t, const double* u_row, double* f_row) = 0;
};

struct SourceSpec {
    enum class Kind { linear_f, nonlinear_F };

    Kind kind = Kind::linear_f;
    SpaceTimeFn f;                         ///< linear source; empty means zero
    PointwiseSource F;                     ///< nonlinear F(x, t, u)
    std::shared_ptr<CausalSource> causal;  ///< nonlinear source with memory
    double lipschitz_const = 0.0;          ///< beta_F
    double bound = 0.0;                    ///< sup |F|

    static SourceSpec linear(SpaceTimeFn f) {
        SourceSpec s;
        s.f = std::move(f);
        return s;
    }
    static SourceSpec pointwise(PointwiseSource F, double lipschitz, double bound) {
        SourceSpec s;
        s.kind = Kind::nonlinear_F;
        s.F = std::move(F);
        s.lipschitz_const = lipschitz;
        s.bound = bound;
        return s;
    }
    static SourceSpec history(std::shared_ptr<CausalSource> src, double lipschitz, double bound) {
        SourceSpec s;
        s.kind = Kind::nonlinear_F;
        s.causal = std::move(src);
        s.lipschitz_const = lipschitz;
        s.bound = bound;
        return s;
    }
};

/// Dirichlet problem for L u = F on (0, L) x (0, T]. Empty data functions mean zero.
struct DirichletProblem {
    OperatorParams params;
    StripDomain domain;
    double horizon = 1.0;
    SpaceFn u0;
    TimeFn g1, g2;
    SourceSpec source;

    void validate() const {
        params.validate();
        domain.validate();
        require_finite(horizon, "horizon");
        if (!(horizon > 0)) throw DomainError("horizon must be positive");
        if (source.kind == SourceSpec::Kind::nonlinear_F) {
            if (!source.F && !source.causal) throw DomainError("nonlinear source needs F or a causal source");
            if (!std::isfinite(source.lipschitz_const) || source.lipschitz_const < 0 || !std::isfinite(source.bound) ||
                source.bound < 0)
                throw DomainError("nonlinear source needs finite Lipschitz constant and bound");
        }
    }

    /// Compatibility u0(0) = g1(0), u0(L) = g2(0); reported, never enforced.
    std::vector<std::string> compatibility_warnings(double tol = 1e-12) const {
        std::vector<std::string> w;
        const double a = u0 ? u0(0.0) : 0.0, b = u0 ? u0(domain.length) : 0.0;
        const double c = g1 ? g1(0.0) : 0.0, d = g2 ? g2(0.0) : 0.0;
        if (std::fabs(a - c) > tol) w.push_back("u0(0) != g1(0): corner data incompatible");
        if (std::fabs(b - d) > tol) w.push_back("u0(L) != g2(0): corner data incompatible");
        return w;
    }
};

enum class BoundarySide { left, right };

namespace detail {

inline constexpr double kErfcWindow = 6.5;  // e^{-6.5^2} ~ 4e-19

// History function Psi of one boundary datum at a fixed output time t:
//     int_0^t K_x(z, t - tau) g(tau) dtau = int_0^t H_x(z, y) Psi(y) dy,
//     Psi(y) = e^{-a y} g(t - y) - 2 sqrt(b y) e^{-a y} int_0^{sqrt(t-y)} e^{-beta q^2} J1(2 sqrt(b y) q) g(t-y-q^2) dq,
// kept as a Chebyshev series in w = sqrt(y). With v = |z| / (2 sqrt(eps y)) the
// boundary term -2 eps int theta_x g becomes sum_n sign(z) (2/sqrt(pi)) int_{v0}^inf e^{-v^2} Psi dv.
class BoundaryHistory {
public:
    BoundaryHistory(const OperatorParams& p, const TimeFn& g, double t, double tol) : p_(p), t_(t), tol_(tol) {
        auto psi = [&](double w) {
            const double y = w * w;
            const double direct = std::exp(-p.a * y) * g(t - y);
            if (y <= 0.0) return direct;
            const double c = 2.0 * std::sqrt(p.b * y);
            auto inner = [&](double q) {
                return std::exp(-p.beta * q * q) * bessel_j1(c * q) * g(std::max(0.0, t - y - q * q));
            };
            const double I = quad::integrate(inner, 0.0, std::sqrt(std::max(0.0, t - y)), 1e-3 * tol, "boundary history");
            return direct - c * std::exp(-p.a * y) * I;
        };
        series_ = quad::ChebyshevSeries::fit(psi, 0.0, std::sqrt(t), 0.01 * tol);
    }

    double psi(double y) const { return series_(std::sqrt(std::clamp(y, 0.0, t_))); }

    /// (2/sqrt(pi)) int_{v0}^inf e^{-v^2} Psi(z^2/(4 eps v^2)) dv, without the sign of z.
    double layer(double z) const {
        const double az = std::fabs(z);
        const double v0 = az / (2.0 * std::sqrt(p_.eps * t_));
        if (v0 >= kErfcWindow) return 0.0;
        const double c = az / (2.0 * std::sqrt(p_.eps));
        auto f = [&](double v) {
            const double w = v > 0 ? std::min(c / v, std::sqrt(t_)) : std::sqrt(t_);
            return std::exp(-v * v) * series_(w);
        };
        return 2.0 / std::sqrt(std::numbers::pi) * quad::integrate(f, v0, kErfcWindow, 0.1 * tol_, "boundary layer");
    }

    /// Signed contribution at x; `which` selects -2 eps theta_x(x) or +2 eps theta_x(x - L).
    double contribution(double x, double L, BoundarySide which) const {
        const double shift = which == BoundarySide::left ? x : x - L;
        const double reach = 2.0 * kErfcWindow * std::sqrt(p_.eps * t_);
        const int lo = static_cast<int>(std::ceil((-reach - shift) / (2.0 * L)));
        const int hi = static_cast<int>(std::floor((reach - shift) / (2.0 * L)));
        double sum = 0.0;
        for (int n = lo; n <= hi; ++n) {
            const double z = shift + 2.0 * n * L;
            // z = 0 is the limit from inside the strip: 0+ on the left, 0- on the right.
            double sign = z > 0 ? 1.0 : (z < 0 ? -1.0 : (which == BoundarySide::left ? 1.0 : -1.0));
            sum += sign * layer(z);
        }
        return which == BoundarySide::left ? sum : -sum;
    }

    int degree() const { return series_.degree(); }

private:
    OperatorParams p_;
    double t_, tol_;
    quad::ChebyshevSeries series_;
};

struct PanelNode {
    double s;
    double w;
};

// Quadrature for s in [k dt, (k+1) dt]; panel 0 is graded towards s = 0 where the
// tables behave like smooth functions of sqrt(s).
inline std::vector<PanelNode> panel_rule(int k, double dt) {
    std::vector<PanelNode> out;
    auto add = [&](double a, double b, int n) {
        const auto& gl = quad::gauss_legendre(n);
        for (int q = 0; q < n; ++q)
            out.push_back({0.5 * (a + b) + 0.5 * (b - a) * gl.nodes[q], 0.5 * (b - a) * gl.weights[q]});
    };
    if (k == 0) {
        constexpr int levels = 36;
        add(0.0, dt * std::ldexp(1.0, -levels), 2);
        for (int i = levels; i >= 1; --i) add(dt * std::ldexp(1.0, -i), dt * std::ldexp(1.0, -i + 1), 8);
    } else {
        add(k * dt, (k + 1) * dt, k <= 2 ? 8 : (k <= 7 ? 6 : 4));
    }
    return out;
}

// Time product integration of int_0^{t_j} int_0^L G(x, xi, t_j - tau) F(xi, tau) dxi dtau,
// with F interpolated in tau by cubics through the grid values (one-sided at both ends).
class SourceConvolution {
public:
    SourceConvolution(const FoldedTables& tab, const OperatorParams& p, int J, double dt)
        : tab_(tab), J_(J), dt_(dt), nt_(std::min(4, J + 1)) {
        const int sz = tab.size();
        // Which (lag panel, stencil offset) pairs occur.
        needed_.assign(static_cast<std::size_t>(J) * 3, false);
        for (int p0 = 0; p0 < J; ++p0) {
            const int o = p0 - start(p0);
            for (int k = 0; k + p0 < J; ++k) needed_[k * 3 + o] = true;
        }
        W_.assign(static_cast<std::size_t>(J) * 3, {});
        for (int k = 0; k < J; ++k)
            for (int o = 0; o < 3; ++o)
                if (needed_[k * 3 + o]) W_[k * 3 + o].assign(static_cast<std::size_t>(nt_) * sz, 0.0);

        struct Job {
            int k;
            PanelNode node;
        };
        std::vector<Job> jobs;
        for (int k = 0; k < J; ++k)
            for (const auto& nd : panel_rule(k, dt)) jobs.push_back({k, nd});
        std::vector<std::vector<double>> tables(jobs.size());
        parallel_for(0, static_cast<int>(jobs.size()), [&](int n) {
            tables[n].assign(sz, 0.0);
            tab.add_kernel(jobs[n].node.s, 1.0, p, tables[n].data());
        });
        for (std::size_t n = 0; n < jobs.size(); ++n) {
            const int k = jobs[n].k;
            const double sigma = jobs[n].node.s / dt - k;
            for (int o = 0; o < 3; ++o) {
                if (!needed_[k * 3 + o]) continue;
                for (int l = 0; l < nt_; ++l) {
                    const double w = jobs[n].node.w * lagrange(o, l, sigma);
                    double* dst = W_[k * 3 + o].data() + static_cast<std::size_t>(l) * sz;
                    const double* src = tables[n].data();
                    for (int e = 0; e < sz; ++e) dst[e] += w * src[e];
                }
            }
        }
        // Interior lags use one fixed combination of centred panels.
        if (nt_ == 4) {
            interior_.resize(std::max(0, J - 3));
            parallel_for(4, J - 3, [&](int d) {
                std::vector<double> C(sz, 0.0);
                for (int l = 0; l < 4; ++l) {
                    const double* src = W_[(d - 2 + l) * 3 + 1].data() + static_cast<std::size_t>(l) * sz;
                    for (int e = 0; e < sz; ++e) C[e] += src[e];
                }
                interior_[d] = tab.nodal_matrix(C.data());
            });
        }
    }

    /// out(j, .) += source term at t_j for j = 1..J; F holds rows j = 0..J.
    void apply(const Matrix& F, Matrix& out) const {
        const int N = tab_.cells(), sz = tab_.size();
        std::vector<double> coef(static_cast<std::size_t>(J_ + 1) * 4 * N);
        for (int q = 0; q <= J_; ++q) tab_.cell_coefficients(F.row(q), coef.data() + static_cast<std::size_t>(q) * 4 * N);
        parallel_for(1, J_ + 1, [&](int j) {
            std::vector<double> acc(N + 1, 0.0), tmp(N + 1), T(sz);
            const int qmax = std::min(J_, std::max(j + 1, nt_ - 1));
            for (int q = 0; q <= qmax; ++q) {
                if (nt_ == 4 && q >= 4 && q <= j - 4) {
                    FoldedTables::apply_nodal(interior_[j - q], F.row(q), acc.data());
                    continue;
                }
                std::fill(T.begin(), T.end(), 0.0);
                bool any = false;
                for (int p0 = std::max(0, q - nt_); p0 <= std::min(j - 1, q + 2); ++p0) {
                    const int s0 = start(p0), l = q - s0;
                    if (l < 0 || l >= nt_) continue;
                    const double* src = W_[(j - 1 - p0) * 3 + (p0 - s0)].data() + static_cast<std::size_t>(l) * sz;
                    for (int e = 0; e < sz; ++e) T[e] += src[e];
                    any = true;
                }
                if (!any) continue;
                tab_.apply(T.data(), coef.data() + static_cast<std::size_t>(q) * 4 * N, tmp.data());
                for (int i = 0; i <= N; ++i) acc[i] += tmp[i];
            }
            double* row = out.row(j);
            for (int i = 0; i <= N; ++i) row[i] += acc[i];
        });
    }

private:
    int start(int p0) const { return std::clamp(p0 - 1, 0, J_ - nt_ + 1); }

    // Lagrange basis in sigma = s/dt - k for the tau-nodes of stencil offset o.
    double lagrange(int o, int l, double sigma) const {
        const double sl = o + 1 - l;
        double v = 1.0;
        for (int m = 0; m < nt_; ++m) {
            if (m == l) continue;
            const double sm = o + 1 - m;
            v *= (sigma - sm) / (sl - sm);
        }
        return v;
    }

    const FoldedTables& tab_;
    int J_;
    double dt_;
    int nt_;
    std::vector<bool> needed_;
    std::vector<std::vector<double>> W_;
    std::vector<Matrix> interior_;
};

inline void check_finite_rows(const Matrix& F, const char* what) {
    for (double v : F.data())
        if (!std::isfinite(v)) throw SourceEvaluationError(std::string(what) + " produced a non-finite value");
}

// Shared state of one grid discretisation of the representation formula.
class Representation {
public:
    Representation(const DirichletProblem& prob, const GridSpec& grid, const SeriesControl& c)
        : prob_(prob), grid_(grid), c_(c), tab_(grid.nx_cells, prob.domain.length, prob.params.eps) {
        prob.validate();
        c.validate();
        grid.validate();
        dt_ = prob.horizon / grid.nt_steps;
        x_ = uniform_nodes(0.0, prob.domain.length, grid.nx_cells);
    }

    const std::vector<double>& x() const { return x_; }
    double dt() const { return dt_; }
    int J() const { return grid_.nt_steps; }
    int N() const { return grid_.nx_cells; }
    double t(int j) const { return j == J() ? prob_.horizon : j * dt_; }

    /// Initial and boundary contributions on rows j = 1..J (row 0 holds u0).
    Matrix base() const {
        const int N = this->N(), J = this->J();
        Matrix U(J + 1, N + 1);
        for (int i = 0; i <= N; ++i) U(0, i) = prob_.u0 ? prob_.u0(x_[i]) : 0.0;
        if (prob_.u0) {
            std::vector<double> coef(4 * N);
            tab_.cell_coefficients(U.row(0), coef.data());
            parallel_for(1, J + 1, [&](int j) {
                std::vector<double> T(tab_.size(), 0.0);
                tab_.add_kernel(t(j), 1.0, prob_.params, T.data());
                tab_.apply(T.data(), coef.data(), U.row(j));
            });
        }
        const double L = prob_.domain.length;
        parallel_for(1, J + 1, [&](int j) {
            double* row = U.row(j);
            if (prob_.g1) {
                BoundaryHistory bh(prob_.params, prob_.g1, t(j), c_.quad_tol);
                for (int i = 0; i <= N; ++i) row[i] += bh.contribution(x_[i], L, BoundarySide::left);
            }
            if (prob_.g2) {
                BoundaryHistory bh(prob_.params, prob_.g2, t(j), c_.quad_tol);
                for (int i = 0; i <= N; ++i) row[i] += bh.contribution(x_[i], L, BoundarySide::right);
            }
        });
        return U;
    }

    const SourceConvolution& convolution() const {
        if (!conv_) conv_ = std::make_unique<SourceConvolution>(tab_, prob_.params, J(), dt_);
        return *conv_;
    }

    GridSolution package(const Matrix& U, SolveDiagnostics diag) const {
        GridSolution out;
        out.x_nodes = x_;
        const int J = this->J(), N = this->N();
        out.t_nodes.resize(J);
        out.values = Matrix(J, N + 1);
        double berr = 0.0;
        for (int j = 1; j <= J; ++j) {
            out.t_nodes[j - 1] = t(j);
            for (int i = 0; i <= N; ++i) out.values(j - 1, i) = U(j, i);
            const double g1 = prob_.g1 ? prob_.g1(t(j)) : 0.0, g2 = prob_.g2 ? prob_.g2(t(j)) : 0.0;
            berr = std::max({berr, std::fabs(U(j, 0) - g1), std::fabs(U(j, N) - g2)});
        }
        for (double v : out.values.data())
            if (!std::isfinite(v)) throw NumericalFailure("solution contains non-finite values");
        out.control = c_;
        diag.boundary_error = berr;
        for (auto& w : prob_.compatibility_warnings()) diag.warnings.push_back(w);
        out.diagnostics = std::move(diag);
        return out;
    }

    const FoldedTables& tables() const { return tab_; }

private:
    const DirichletProblem& prob_;
    GridSpec grid_;
    SeriesControl c_;
    FoldedTables tab_;
    double dt_;
    std::vector<double> x_;
    mutable std::unique_ptr<SourceConvolution> conv_;
};

}  // namespace detail

/// Boundary term of the representation formula at (x, t): -2 eps int_0^t theta_x(x, t - tau) g(tau) dtau
/// on the left, +2 eps int_0^t theta_x(x - L, t - tau) g(tau) dtau on the right.
inline double boundary_convolution(const TimeFn& g, double x, double t, BoundarySide which, const OperatorParams& p,
                                   const StripDomain& d, const SeriesControl& c) {
    require_finite(x, "x");
    require_finite(t, "t");
    if (x < 0 || x > d.length) throw DomainError("boundary_convolution: x outside [0, L]");
    if (!(t > 0)) throw DomainError("boundary_convolution needs t > 0");
    if (!g) return 0.0;
    detail::BoundaryHistory bh(p, g, t, c.quad_tol);
    return bh.contribution(x, d.length, which);
}

/// Explicit solution of the linear problem on a uniform grid.
inline GridSolution solve_linear(const DirichletProblem& prob, const GridSpec& grid, const SeriesControl& c) {
    if (prob.source.kind != SourceSpec::Kind::linear_f) throw DomainError("solve_linear needs a linear source");
    detail::Representation rep(prob, grid, c);
    Matrix U = rep.base();
    if (prob.source.f) {
        const int J = rep.J(), N = rep.N();
        Matrix F(J + 1, N + 1);
        for (int j = 0; j <= J; ++j)
            for (int i = 0; i <= N; ++i) F(j, i) = prob.source.f(rep.x()[i], rep.t(j));
        detail::check_finite_rows(F, "linear source");
        rep.convolution().apply(F, U);
    }
    return rep.package(U, {});
}

/// Evaluates the representation formula of a source-free linear problem at one point,
/// with u0 interpolated from nx_cells cells.
inline double evaluate_linear_point(const DirichletProblem& prob, int nx_cells, double x, double t,
                                    const SeriesControl& c) {
    prob.validate();
    if (prob.source.kind != SourceSpec::Kind::linear_f || prob.source.f)
        throw DomainError("point evaluation supports source-free linear problems only");
    if (x < 0 || x > prob.domain.length) throw DomainError("x outside [0, L]");
    if (!(t > 0)) throw DomainError("t must be positive");
    double u = 0.0;
    if (prob.u0) {
        detail::FoldedTables tab(nx_cells, prob.domain.length, prob.params.eps);
        const auto xs = uniform_nodes(0.0, prob.domain.length, nx_cells);
        std::vector<double> f(nx_cells + 1), coef(4 * nx_cells), w(4 * nx_cells, 0.0);
        for (int i = 0; i <= nx_cells; ++i) f[i] = prob.u0(xs[i]);
        tab.cell_coefficients(f.data(), coef.data());
        tab.add_kernel_row(x, t, 1.0, prob.params, w.data());
        for (std::size_t k = 0; k < w.size(); ++k) u += w[k] * coef[k];
    }
    u += boundary_convolution(prob.g1, x, t, BoundarySide::left, prob.params, prob.domain, c);
    u += boundary_convolution(prob.g2, x, t, BoundarySide::right, prob.params, prob.domain, c);
    return u;
}

struct PicardOptions {
    double tol = 1e-10;
    int max_iter = 100;
    std::optional<Matrix> initial_guess;  ///< rows t_1..t_J; replaces the frozen-source start
};

namespace detail {

inline void evaluate_source(const DirichletProblem& prob, const std::vector<double>& x, double dt, int J,
                            const Matrix& U, Matrix& F) {
    const int N = static_cast<int>(x.size()) - 1;
    auto t_of = [&](int j) { return j == J ? prob.horizon : j * dt; };
    if (prob.source.causal) {
        auto& src = *prob.source.causal;
        src.reset(x, dt);
        for (int j = 0; j <= J; ++j) src.advance(j, t_of(j), U.row(j), F.row(j));
    } else {
        for (int j = 0; j <= J; ++j)
            for (int i = 0; i <= N; ++i) F(j, i) = prob.source.F(x[i], t_of(j), U(j, i));
    }
    check_finite_rows(F, "nonlinear source");
}

}  // namespace detail

/// Picard iteration of the nonlinear integral equation on a uniform grid.
inline GridSolution solve_nonlinear_picard(const DirichletProblem& prob, const GridSpec& grid, const SeriesControl& c,
                                           const PicardOptions& opt = {}) {
    if (prob.source.kind != SourceSpec::Kind::nonlinear_F) throw DomainError("Picard solve needs a nonlinear source");
    if (!(opt.tol > 0) || opt.max_iter < 1) throw DomainError("Picard needs tol > 0 and max_iter >= 1");
    detail::Representation rep(prob, grid, c);
    const int J = rep.J(), N = rep.N();
    const Matrix base = rep.base();
    const auto& conv = rep.convolution();
    Matrix F(J + 1, N + 1), U;

    if (opt.initial_guess) {
        const Matrix& g = *opt.initial_guess;
        if (static_cast<int>(g.rows()) != J || static_cast<int>(g.cols()) != N + 1)
            throw DomainError("initial guess has the wrong shape");
        U = base;
        for (int j = 1; j <= J; ++j)
            for (int i = 0; i <= N; ++i) U(j, i) = g(j - 1, i);
    } else {
        // Frozen-source start: F evaluated along u = 0.
        Matrix zero(J + 1, N + 1);
        detail::evaluate_source(prob, rep.x(), rep.dt(), J, zero, F);
        U = base;
        conv.apply(F, U);
    }

    SolveDiagnostics diag;
    for (int it = 1; it <= opt.max_iter; ++it) {
        detail::evaluate_source(prob, rep.x(), rep.dt(), J, U, F);
        Matrix next = base;
        conv.apply(F, next);
        const double inc = max_abs_diff(next, U);
        if (!diag.increments.empty() && diag.increments.back() > 0)
            diag.ratios.push_back(inc / diag.increments.back());
        diag.increments.push_back(inc);
        U = std::move(next);
        diag.iterations = it;
        if (inc <= opt.tol) return rep.package(U, std::move(diag));
    }
    std::ostringstream msg;
    msg << "Picard iteration not contracting to tol " << opt.tol << " in " << opt.max_iter << " sweeps; ratios:";
    for (double r : diag.ratios) msg << ' ' << r;
    throw NonConvergence(msg.str());
}

}  // namespace memkernel
