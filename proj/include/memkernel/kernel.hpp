#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include "memkernel/params.hpp"
#include "memkernel/quadrature.hpp"
#include "memkernel/special_functions.hpp"

// Fundamental solution K of
//     u_t - eps u_xx + a u + b int_0^t e^{-beta(t-tau)} u(x,tau) dtau
// written as a damped heat kernel minus a memory superposition of heat kernels:
//     K(x,t) = e^{-a t} H(x,t) - int_0^t m(t,y) H(x,y) dy,
//     H(x,y) = exp(-x^2/(4 eps y)) / sqrt(4 pi eps y),
//     m(t,y) = sqrt(b) sqrt(y) e^{-a y - beta (t-y)} J_1(2 sqrt(b y (t-y))) / sqrt(t-y).
// The memory integral is taken in y = t sin^2(phi), which turns both endpoint
// singularities into a smooth integrand on [0, pi/2].

namespace memkernel {

/// Heat kernel of u_t = eps u_xx.
inline double heat_kernel(double x, double y, double eps) {
    return std::exp(-x * x / (4.0 * eps * y)) / std::sqrt(4.0 * std::numbers::pi * eps * y);
}

/// One node of the memory integral in the phi variable: int_0^t m(t,y) Q(y) dy
/// equals int_0^{pi/2} weight(phi) Q(y(phi)) dphi.
struct MemoryNode {
    double y;
    double weight;
};

inline MemoryNode memory_node(const OperatorParams& p, double t, double phi) {
    const double s = std::sin(phi), c = std::cos(phi);
    const double y = t * s * s;
    const double sb = std::sqrt(p.b);
    const double w = 2.0 * sb * t * s * s * std::exp(-p.a * y - p.beta * (t - y)) *
                     bessel_j1(sb * t * 2.0 * s * c);
    return {y, w};
}

/// Order of the fixed phi rule used by the bulk (solver) evaluations; grows
/// with the number of J_1 oscillations over [0, pi/2].
inline int memory_rule_panels(const OperatorParams& p, double t) {
    return 1 + static_cast<int>(std::sqrt(p.b) * t / 6.0);
}

namespace detail {

inline void check_point(double x, double t, const SeriesControl& c) {
    require_finite(x, "x");
    require_finite(t, "t");
    if (t < c.t_floor)
        throw EvaluationWindowError("t = " + std::to_string(t) + " below t_floor = " +
                                    std::to_string(c.t_floor));
}

// K without the t_floor guard; used by the time integrals that reach t -> 0.
inline double kernel_unchecked(double x, double t, const OperatorParams& p, double tol) {
    const double heat = std::exp(-p.a * t) * heat_kernel(x, t, p.eps);
    auto integrand = [&](double phi) {
        const auto n = memory_node(p, t, phi);
        if (n.y <= 0.0) return 0.0;
        return n.weight * heat_kernel(x, n.y, p.eps);
    };
    const double mem = quad::integrate(integrand, 0.0, std::numbers::pi / 2, tol, "kernel memory integral");
    return heat - mem;
}

inline double kernel_x_unchecked(double x, double t, const OperatorParams& p, double tol) {
    const double heat = -x / (2.0 * p.eps * t) * std::exp(-p.a * t) * heat_kernel(x, t, p.eps);
    if (x == 0.0) return 0.0;
    auto integrand = [&](double phi) {
        const auto n = memory_node(p, t, phi);
        if (n.y <= 0.0) return 0.0;
        return n.weight * (-x / (2.0 * p.eps * n.y)) * heat_kernel(x, n.y, p.eps);
    };
    const double mem = quad::integrate(integrand, 0.0, std::numbers::pi / 2, tol, "kernel derivative integral");
    return heat - mem;
}

// Pointwise bound |K(x,t)| <= e^{-x^2/4 eps t} (e^{-a t}/sqrt(t) + 2 j1max sqrt(b t) e^{-omega t}) / (2 sqrt(pi eps)),
// from |J_1| <= 0.5819 and e^{-x^2/4 eps y} <= e^{-x^2/4 eps t} for y <= t.
inline double kernel_amplitude_bound(double t, const OperatorParams& p) {
    constexpr double j1max = 0.5819;
    return (std::exp(-p.a * t) / std::sqrt(t) + 2.0 * j1max * std::sqrt(p.b * t) * std::exp(-p.omega() * t)) /
           (2.0 * std::sqrt(std::numbers::pi * p.eps));
}

}  // namespace detail

/// Fundamental solution K(x, t).
inline double eval_k(double x, double t, const OperatorParams& p, const SeriesControl& c) {
    detail::check_point(x, t, c);
    return detail::kernel_unchecked(x, t, p, c.quad_tol);
}

/// dK/dx by differentiation under the integral sign; odd in x.
inline double eval_kx(double x, double t, const OperatorParams& p, const SeriesControl& c) {
    detail::check_point(x, t, c);
    return detail::kernel_x_unchecked(x, t, p, c.quad_tol);
}

/// K_1(x,t) = int_0^t e^{-beta (t - tau)} K(x, tau) dtau, integrated in tau = v^2.
inline double eval_k1(double x, double t, const OperatorParams& p, const SeriesControl& c) {
    detail::check_point(x, t, c);
    const double inner_tol = 0.1 * c.quad_tol / std::max(1.0, std::sqrt(t));
    auto integrand = [&](double v) {
        if (v <= 0.0) return x == 0.0 ? 1.0 / std::sqrt(std::numbers::pi * p.eps) * std::exp(-p.beta * t) : 0.0;
        const double tau = v * v;
        return 2.0 * v * std::exp(-p.beta * (t - tau)) * detail::kernel_unchecked(x, tau, p, inner_tol);
    };
    return quad::integrate(integrand, 0.0, std::sqrt(t), c.quad_tol, "K1 time integral");
}

/// E(t) = (e^{-beta t} - e^{-a t}) / (a - beta), with the limit t e^{-a t} at a = beta.
inline double e_of_t(double t, const OperatorParams& p) {
    require_finite(t, "t");
    if (t < 0) throw DomainError("E(t) needs t >= 0");
    const double lo = std::min(p.a, p.beta), d = std::fabs(p.a - p.beta);
    if (d < 1e-12) return t * std::exp(-p.a * t);
    return std::exp(-lo * t) * (-std::expm1(-d * t)) / d;
}

struct LaplaceCheck {
    double numeric = 0.0;
    double closed_form = 0.0;
    double sigma = 0.0;
    double truncation = 0.0;  ///< time at which the transform integral was cut
};

/// Laplace variable sigma(s) = sqrt(s + a + b/(s + beta)), positive root.
inline double laplace_sigma(double s, const OperatorParams& p) {
    return std::sqrt(s + p.a + p.b / (s + p.beta));
}

/// Closed-form transform e^{-r sigma} / (2 sqrt(eps) sigma), r = |x|/sqrt(eps).
inline double laplace_closed_form(double r, double s, const OperatorParams& p) {
    const double sigma = laplace_sigma(s, p);
    return std::exp(-r * sigma) / (2.0 * std::sqrt(p.eps) * sigma);
}

/// Numerical Laplace transform of K(r, .) next to its closed form.
inline LaplaceCheck laplace_check(double r, double s, const OperatorParams& p, const SeriesControl& c) {
    require_finite(r, "r");
    require_finite(s, "s");
    if (r < 0) throw DomainError("r must be >= 0");
    if (!(s > -p.omega()))
        throw ConvergenceDomainError("s = " + std::to_string(s) + " <= max(-a, -beta)");
    LaplaceCheck out;
    out.sigma = laplace_sigma(s, p);
    out.closed_form = laplace_closed_form(r, s, p);

    // Tail bound from the pointwise amplitude bound of K.
    const double ca = s + p.a, cw = s + p.omega();
    auto tail = [&](double T) {
        const double pre = 1.0 / (2.0 * std::sqrt(std::numbers::pi * p.eps));
        return pre * (std::exp(-ca * T) / (std::sqrt(T) * ca) +
                      2.0 * 0.5819 * std::sqrt(p.b) * std::exp(-cw * T) *
                          (std::sqrt(T) / cw + 1.0 / (2.0 * cw * cw * std::sqrt(T))));
    };
    double T = 1.0;
    while (tail(T) > 0.05 * c.quad_tol && T < 1e6) T *= 1.25;
    out.truncation = T;

    const double x = r * std::sqrt(p.eps);
    const double inner_tol = 0.05 * c.quad_tol / std::sqrt(T);
    auto integrand = [&](double v) {
        if (v <= 0.0) return x == 0.0 ? 1.0 / std::sqrt(std::numbers::pi * p.eps) : 0.0;
        const double t = v * v;
        // For s < 0 the weight e^{-s t} grows, so K is resolved more tightly.
        return 2.0 * v * std::exp(-s * t) * detail::kernel_unchecked(x, t, p, inner_tol * std::exp(std::min(s, 0.0) * t));
    };
    out.numeric = quad::integrate(integrand, 0.0, std::sqrt(T), 0.5 * c.quad_tol, "Laplace transform", 4000);
    return out;
}

/// int_R |K(xi, t)| dxi by adaptive quadrature.
inline double kernel_l1_norm(double t, const OperatorParams& p, const SeriesControl& c) {
    detail::check_point(0.0, t, c);
    const double xmax = std::sqrt(4.0 * p.eps * t * 45.0);
    auto f = [&](double xi) { return std::fabs(detail::kernel_unchecked(xi, t, p, 0.01 * c.quad_tol)); };
    return 2.0 * quad::integrate(f, 0.0, xmax, c.quad_tol, "L1 norm of K");
}

/// int_R |K_1(xi, t)| dxi by adaptive quadrature.
inline double kernel1_l1_norm(double t, const OperatorParams& p, const SeriesControl& c) {
    detail::check_point(0.0, t, c);
    const double xmax = std::sqrt(4.0 * p.eps * t * 45.0);
    SeriesControl inner = c;
    inner.quad_tol = 0.01 * c.quad_tol;
    auto f = [&](double xi) { return std::fabs(eval_k1(xi, t, p, inner)); };
    return 2.0 * quad::integrate(f, 0.0, xmax, c.quad_tol, "L1 norm of K1");
}

}  // namespace memkernel
