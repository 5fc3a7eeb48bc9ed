#pragma once

#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "memkernel/ibvp_solver.hpp"

// Exponentially shaped Josephson junction
//     eps u_xxt + u_xx - u_tt - eps lam u_xt - lam u_x - alpha u_t = sin u - gamma
// written for u = e^{-lam x/2} u_bar as L u = F with beta = 1/eps.

namespace memkernel {

struct EsjjParams {
    double eps = 1.0;
    double alpha = 0.5;
    double lam = 2.0;
    double gamma = 0.0;
    double length = 1.0;

    void validate() const {
        for (auto [v, n] : {std::pair{eps, "eps"}, {alpha, "alpha"}, {lam, "lam"}, {gamma, "gamma"}, {length, "length"}})
            require_finite(v, n);
        if (eps <= 0 || alpha <= 0 || lam <= 0 || length <= 0)
            throw DomainError("ESJJ constants eps, alpha, lam and length must be positive");
    }
};

struct EsjjProblem {
    EsjjParams params;
    SpaceFn u0, v0;  ///< initial phase and phase velocity; empty means zero
    TimeFn g1, g2;   ///< boundary phases; empty means zero
    double horizon = 1.0;
};

/// beta = 1/eps, b = beta^2 (1 - alpha eps), a = (lam^2/4 - b)/beta.
inline OperatorParams map_params(const EsjjParams& e) {
    e.validate();
    if (e.alpha * e.eps >= 1.0)
        throw MappingInfeasible("alpha*eps = " + std::to_string(e.alpha * e.eps) + " must be < 1 so that b > 0");
    OperatorParams p;
    p.eps = e.eps;
    p.beta = 1.0 / e.eps;
    p.b = p.beta * p.beta * (1.0 - e.alpha * e.eps);
    if (e.lam * e.lam / 4.0 <= p.b)
        throw MappingInfeasible("lam^2/4 = " + std::to_string(e.lam * e.lam / 4.0) + " must exceed b = " +
                                std::to_string(p.b) + " so that a > 0");
    p.a = (e.lam * e.lam / 4.0 - p.b) / p.beta;
    return p;
}

/// u_bar = e^{lam x/2} u, node by node.
inline GridSolution gauge_forward(GridSolution u, double lam) {
    for (std::size_t j = 0; j < u.values.rows(); ++j)
        for (std::size_t i = 0; i < u.values.cols(); ++i) u.values(j, i) *= std::exp(0.5 * lam * u.x_nodes[i]);
    return u;
}

inline GridSolution gauge_inverse(GridSolution u, double lam) {
    for (std::size_t j = 0; j < u.values.rows(); ++j)
        for (std::size_t i = 0; i < u.values.cols(); ++i) u.values(j, i) /= std::exp(0.5 * lam * u.x_nodes[i]);
    return u;
}

/// e^{-lam x/2} [sin(e^{lam x/2} u) - gamma].
inline double f1_source(double x, double u, const EsjjParams& e) {
    const double g = std::exp(0.5 * e.lam * x);
    return (std::sin(g * u) - e.gamma) / g;
}

namespace detail {

// 5-point second derivative.
inline double second_derivative(const SpaceFn& f, double x, double h) {
    return (-f(x + 2 * h) + 16 * f(x + h) - 30 * f(x) + 16 * f(x - h) - f(x - 2 * h)) / (12 * h * h);
}

}  // namespace detail

/// Causal source of the mapped problem,
///     F(x, t) = -int_0^t e^{-(t-tau)/eps} f1(x, u(x, tau)) dtau + C(x) e^{-t/eps},
///     C = v0 - eps u0'' + a u0   (operator variables),
/// with the memory advanced exactly for f1 linear between grid times.
class EsjjSource : public CausalSource {
public:
    EsjjSource(const EsjjParams& e, const OperatorParams& p, SpaceFn u0_op, SpaceFn v0_op)
        : e_(e), p_(p), u0_(std::move(u0_op)), v0_(std::move(v0_op)) {}

    void reset(const std::vector<double>& x, double /*dt*/) override {
        x_ = x;
        const std::size_t n = x.size();
        w_.assign(n, 0.0);
        prev_.assign(n, 0.0);
        C_.assign(n, 0.0);
        const double hd = 2e-3 * e_.length;
        for (std::size_t i = 0; i < n; ++i) {
            const double u0 = u0_ ? u0_(x[i]) : 0.0, v0 = v0_ ? v0_(x[i]) : 0.0;
            const double upp = u0_ ? detail::second_derivative(u0_, x[i], hd) : 0.0;
            C_[i] = v0 - p_.eps * upp + p_.a * u0;
        }
        t_prev_ = 0.0;
    }

    void advance(int j, double t, const double* u, double* F) override {
        const std::size_t n = x_.size();
        double keep = 0.0, wa = 0.0, wb = 0.0;
        if (j > 0) {
            const double r = (t - t_prev_) / e_.eps;
            const double one_minus_E = -std::expm1(-r);
            keep = 1.0 - one_minus_E;
            wa = e_.eps * (one_minus_E / r - keep);
            wb = e_.eps * (1.0 - one_minus_E / r);
        }
        const double decay = std::exp(-t / e_.eps);
        for (std::size_t i = 0; i < n; ++i) {
            const double f = f1_source(x_[i], u[i], e_);
            if (j > 0) w_[i] = keep * w_[i] + wa * prev_[i] + wb * f;
            prev_[i] = f;
            F[i] = -w_[i] + C_[i] * decay;
        }
        t_prev_ = t;
    }

    const std::vector<double>& data_term() const { return C_; }

private:
    EsjjParams e_;
    OperatorParams p_;
    SpaceFn u0_, v0_;
    std::vector<double> x_, w_, prev_, C_;
    double t_prev_ = 0.0;
};

/// Operator-variable data of an ESJJ problem.
inline SpaceFn operator_initial(const EsjjProblem& prob) {
    if (!prob.u0) return {};
    const double lam = prob.params.lam;
    auto u0 = prob.u0;
    return [u0, lam](double x) { return std::exp(-0.5 * lam * x) * u0(x); };
}

inline SpaceFn operator_velocity(const EsjjProblem& prob) {
    if (!prob.v0) return {};
    const double lam = prob.params.lam;
    auto v0 = prob.v0;
    return [v0, lam](double x) { return std::exp(-0.5 * lam * x) * v0(x); };
}

/// Nonlinear source of the mapped problem with its Hypotheses-A metadata:
/// beta_F = eps (1 - e^{-T/eps}) <= eps, bound = eps (1 + |gamma|) + sup |C|.
inline SourceSpec assemble_F(const EsjjProblem& prob) {
    const OperatorParams p = map_params(prob.params);
    auto src = std::make_shared<EsjjSource>(prob.params, p, operator_initial(prob), operator_velocity(prob));
    const double L = prob.params.length;
    src->reset(uniform_nodes(0.0, L, 256), 1.0);
    double csup = 0.0;
    for (double c : src->data_term()) csup = std::max(csup, std::fabs(c));
    const double lip = prob.params.eps * -std::expm1(-prob.horizon / prob.params.eps);
    return SourceSpec::history(src, lip, prob.params.eps * (1.0 + std::fabs(prob.params.gamma)) + csup);
}

/// The mapped Dirichlet problem in operator variables.
inline DirichletProblem mapped_problem(const EsjjProblem& prob) {
    DirichletProblem d;
    d.params = map_params(prob.params);
    d.domain.length = prob.params.length;
    d.horizon = prob.horizon;
    d.u0 = operator_initial(prob);
    d.g1 = prob.g1;
    if (prob.g2) {
        const double w = std::exp(-0.5 * prob.params.lam * prob.params.length);
        auto g2 = prob.g2;
        d.g2 = [g2, w](double t) { return w * g2(t); };
    }
    d.source = assemble_F(prob);
    return d;
}

/// Picard solve of the mapped problem, returned as the physical phase u_bar.
inline GridSolution solve_esjj(const EsjjProblem& prob, const GridSpec& grid, const SeriesControl& c,
                               const PicardOptions& opt = {}) {
    const DirichletProblem d = mapped_problem(prob);
    GridSolution op = solve_nonlinear_picard(d, grid, c, opt);
    GridSolution out = gauge_forward(std::move(op), prob.params.lam);
    double berr = 0.0;
    const std::size_t N = out.x_nodes.size() - 1;
    for (std::size_t j = 0; j < out.t_nodes.size(); ++j) {
        const double t = out.t_nodes[j];
        berr = std::max(berr, std::fabs(out.values(j, 0) - (prob.g1 ? prob.g1(t) : 0.0)));
        berr = std::max(berr, std::fabs(out.values(j, N) - (prob.g2 ? prob.g2(t) : 0.0)));
    }
    out.diagnostics.boundary_error = berr;
    return out;
}

/// 2 [ |u0| (1 + pi sqrt(b) t) e^{-omega t} + |v0| E(t) + beta1 |f| ].
inline double apriori_bound(double t, double norm_u0, double norm_v0, double norm_f, const OperatorParams& p) {
    require_finite(t, "t");
    if (t < 0) throw DomainError("apriori_bound needs t >= 0");
    if (norm_u0 < 0 || norm_v0 < 0 || norm_f < 0) throw DomainError("norms must be non-negative");
    return 2.0 * (norm_u0 * (1.0 + std::numbers::pi * std::sqrt(p.b) * t) * std::exp(-p.omega() * t) +
                  norm_v0 * e_of_t(t, p) + p.beta1() * norm_f);
}

/// Long-time boundary-driven profile in operator variables (steady two-point problem).
inline double boundary_asymptote(double x, double g1_inf, double g2_inf, const EsjjParams& e) {
    const OperatorParams p = map_params(e);
    const double s0 = p.sigma0(), L = e.length;
    const double den = std::sinh(s0 * L);
    return g1_inf * std::sinh(s0 * (L - x)) / den + g2_inf * std::sinh(s0 * x) / den;
}

}  // namespace memkernel
