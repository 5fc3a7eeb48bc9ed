#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <string>

#include "memkernel/kernel.hpp"

namespace memkernel {

struct ThetaSeriesTerm {
    int image_index;
    double center;  // x + 2 n L
};

namespace detail {

// Gaussian envelopes of |K(z,t)| and |K_x(z,t)|; used for image-tail bounds.
inline double kernel_envelope(double z, double t, const OperatorParams& p) {
    return kernel_amplitude_bound(t, p) * std::exp(-z * z / (4.0 * p.eps * t));
}

inline double kernel_x_envelope(double z, double t, const OperatorParams& p) {
    constexpr double j1max = 0.5819;
    const double az = std::fabs(z);
    const double pre = 1.0 / (2.0 * std::sqrt(std::numbers::pi * p.eps));
    const double heat = az / (2.0 * p.eps * t) * std::exp(-p.a * t) / std::sqrt(t) * std::exp(-z * z / (4.0 * p.eps * t));
    // sup_{y <= t} |z|/(2 eps y) e^{-z^2/(4 eps y)}: attained at y = t once z^2 >= 4 eps t.
    const double u = z * z / (4.0 * p.eps * t);
    const double peak = u >= 1.0 ? az / (2.0 * p.eps * t) * std::exp(-u) : (az > 0 ? 2.0 / (std::numbers::e * az) : 0.0);
    const double mem = peak * 2.0 * j1max * std::sqrt(p.b * t) * std::exp(-p.omega() * t);
    return pre * (heat + mem);
}

template <class Envelope>
double image_tail(double x, double t, double L, int n_images, const OperatorParams& p, Envelope env) {
    double tail = 0.0;
    for (int n = n_images + 1;; ++n) {
        const double z = 2.0 * n * L - std::fabs(x);
        const double term = 2.0 * env(z, t, p);
        tail += term;
        if (term < 1e-3 * tail || term < 1e-300) break;
        if (n > n_images + 100000) break;
    }
    return tail;
}

template <class Envelope>
int images_needed(double x, double t, double L, double tol, const OperatorParams& p, Envelope env) {
    int n = 1;
    while (image_tail(x, t, L, n, p, env) > tol) n = n < 4 ? n + 1 : n + n / 2;
    return n;
}

template <class Term, class Envelope>
double image_sum(double x, double t, const OperatorParams& p, const StripDomain& d, const SeriesControl& c,
                 int n_images, Term term, Envelope env, const char* what) {
    check_point(x, t, c);
    if (std::fabs(x) > 2.0 * d.length * (1 + 1e-14))
        throw DomainError(std::string(what) + ": |x| must not exceed 2L");
    if (n_images < 0) throw DomainError("negative image count");
    const double tail = image_tail(x, t, d.length, n_images, p, env);
    if (tail > c.quad_tol) {
        throw InsufficientTruncation(std::string(what) + " tail bound " + std::to_string(tail) + " exceeds quad_tol at t=" +
                                         std::to_string(t),
                                     images_needed(x, t, d.length, c.quad_tol, p, env));
    }
    const double budget = 0.5 * c.quad_tol / (2 * n_images + 1);
    double sum = 0.0;
    // Pair n and -n from the outside in so the sum is symmetric in floating point.
    for (int n = n_images; n >= 1; --n) {
        const double zp = x + 2.0 * n * d.length, zm = x - 2.0 * n * d.length;
        if (env(zp, t, p) > 1e-3 * budget) sum += term(zp, budget);
        if (env(zm, t, p) > 1e-3 * budget) sum += term(zm, budget);
    }
    return sum + term(x, budget);
}

}  // namespace detail

/// Image series sum_{|n| <= n_images} K(x + 2nL, t) with an explicit image count.
inline double theta_images(double x, double t, const OperatorParams& p, const StripDomain& d, const SeriesControl& c,
                           int n_images) {
    auto term = [&](double z, double tol) { return detail::kernel_unchecked(z, t, p, tol); };
    return detail::image_sum(x, t, p, d, c, n_images, term, detail::kernel_envelope, "theta");
}

inline double theta(double x, double t, const OperatorParams& p, const StripDomain& d, const SeriesControl& c) {
    return theta_images(x, t, p, d, c, c.n_images);
}

inline double theta_x_images(double x, double t, const OperatorParams& p, const StripDomain& d,
                             const SeriesControl& c, int n_images) {
    auto term = [&](double z, double tol) { return detail::kernel_x_unchecked(z, t, p, tol); };
    return detail::image_sum(x, t, p, d, c, n_images, term, detail::kernel_x_envelope, "theta_x");
}

/// x-derivative of theta, odd in x.
inline double theta_x(double x, double t, const OperatorParams& p, const StripDomain& d, const SeriesControl& c) {
    return theta_x_images(x, t, p, d, c, c.n_images);
}

/// Dirichlet Green function of the strip, G = theta(|x - xi|) - theta(x + xi).
inline double green(double x, double xi, double t, const OperatorParams& p, const StripDomain& d,
                    const SeriesControl& c) {
    const double L = d.length;
    if (x < 0 || x > L || xi < 0 || xi > L) throw DomainError("green: x and xi must lie in [0, L]");
    if (x == 0 || x == L || xi == 0 || xi == L) {
        detail::check_point(x, t, c);
        return 0.0;
    }
    return theta(std::fabs(x - xi), t, p, d, c) - theta(x + xi, t, p, d, c);
}

/// k(t) = [exp(M t)]_{11} for M = [[-(eps mu + a), -b], [1, -beta]].
inline double memory_mode(double mu, double t, const OperatorParams& p) {
    const double m11 = -(p.eps * mu + p.a), m22 = -p.beta;
    const double m = 0.5 * (m11 + m22);
    const double h = 0.5 * (m11 - m22);
    const double disc = h * h - p.b;
    if (disc > 0) {
        const double dd = std::sqrt(disc);
        // (1 + h/d) written without cancellation when h < 0.
        const double up = h >= 0 ? 1.0 + h / dd : -p.b / (dd * (dd - h));
        const double lo = 2.0 - up;
        return 0.5 * (up * std::exp((m + dd) * t) + lo * std::exp((m - dd) * t));
    }
    const double w = std::sqrt(-disc);
    const double sinc = w * t < 1e-8 ? t : std::sin(w * t) / w;
    return std::exp(m * t) * (std::cos(w * t) + h * sinc);
}

namespace detail {

// Bound on sup_t |k_n(t)| summed over modes > n: slow modes decay like b/(eps mu)^2.
inline double mode_tail(int modes, double t, const OperatorParams& p, const StripDomain& d) {
    const double L = d.length;
    auto term = [&](int n) {
        const double mu = std::pow(n * std::numbers::pi / L, 2);
        const double m11 = -(p.eps * mu + p.a), m22 = -p.beta;
        const double m = 0.5 * (m11 + m22), h = 0.5 * (m11 - m22);
        const double disc = h * h - p.b;
        if (disc <= 0) return 2.0 * std::exp(m * t) * (1.0 + std::fabs(h) * t);
        const double dd = std::sqrt(disc);
        const double up = h >= 0 ? 1.0 + h / dd : -p.b / (dd * (dd - h));
        return 0.5 * (std::fabs(up) * std::exp((m + dd) * t) + std::fabs(2.0 - up) * std::exp((m - dd) * t));
    };
    double tail = 0.0;
    int n = modes + 1;
    const int stop = 4 * modes + 64;
    for (; n <= stop; ++n) tail += term(n);
    // Terms fall at least like n^{-4} beyond this point.
    tail += term(stop) * stop / 3.0;
    return 2.0 / L * tail;
}

}  // namespace detail

/// Green function by eigenfunction expansion; an oracle independent of the image series.
inline double eigen_green(double x, double xi, double t, const OperatorParams& p, const StripDomain& d, int modes,
                          double tol = 1e-9) {
    require_finite(x, "x");
    require_finite(xi, "xi");
    require_finite(t, "t");
    if (!(t > 0)) throw DomainError("eigen_green needs t > 0");
    if (modes < 1) throw DomainError("eigen_green needs modes >= 1");
    const double tail = detail::mode_tail(modes, t, p, d);
    if (tail > tol)
        throw InsufficientModes("tail bound " + std::to_string(tail) + " with " + std::to_string(modes) +
                                " modes exceeds " + std::to_string(tol));
    const double L = d.length;
    double sum = 0.0;
    for (int n = modes; n >= 1; --n) {
        const double k = n * std::numbers::pi / L;
        sum += std::sin(k * x) * std::sin(k * xi) * memory_mode(k * k, t, p);
    }
    return 2.0 / L * sum;
}

/// theta_x with the image count raised to whatever the tail bound asks for.
inline double theta_x_retry(double x, double t, const OperatorParams& p, const StripDomain& d, const SeriesControl& c) {
    try {
        return theta_x(x, t, p, d, c);
    } catch (const InsufficientTruncation& e) {
        return theta_x_images(x, t, p, d, c, e.needed());
    }
}

/// lim_{t -> inf} int_0^t theta_x(x, tau) dtau.
inline double steady_boundary_kernel(double x, const OperatorParams& p, const StripDomain& d) {
    const double s0 = p.sigma0();
    return std::sinh(s0 * (x - d.length)) / (2.0 * p.eps * std::sinh(s0 * d.length));
}

/// int_0^T theta_x(x, tau) dtau (or of |theta_x| when absolute). Below t_floor the
/// integrand is dropped; for x away from the images it is e^{-x^2/(4 eps t_floor)} small.
/// The image count is raised where the tighter inner tolerance needs it.
inline double theta_x_time_integral(double x, double T, const OperatorParams& p, const StripDomain& d,
                                    const SeriesControl& c, bool absolute = false) {
    require_finite(T, "T");
    if (T <= c.t_floor) return 0.0;
    SeriesControl inner = c;
    inner.quad_tol = 0.1 * c.quad_tol / std::max(1.0, T);
    auto f = [&](double v) {
        const double tau = v * v;
        if (tau < c.t_floor) return 0.0;
        const double val = theta_x_retry(x, tau, p, d, inner);
        return 2.0 * v * (absolute ? std::fabs(val) : val);
    };
    return quad::integrate(f, std::sqrt(c.t_floor), std::sqrt(T), c.quad_tol, "theta_x time integral", 4000);
}

/// A function of time with known long-time limit, used by convolution_limit.
struct TimeFunction {
    std::function<double(double)> value;
    std::function<double(double)> derivative;  ///< optional; central differences otherwise
    double limit = 0.0;
    double initial = 0.0;  ///< value at t = 0

    double slope(double t) const {
        if (derivative) return derivative(t);
        const double h = 1e-4 * std::max(1.0, t);
        const double lo = std::max(0.0, t - h);
        const double d1 = (value(t + h) - value(lo)) / (t + h - lo);
        const double h2 = 0.5 * h, lo2 = std::max(0.0, t - h2);
        const double d2 = (value(t + h2) - value(lo2)) / (t + h2 - lo2);
        return lo > 0 ? (4.0 * d2 - d1) / 3.0 : 2.0 * d2 - d1;
    }
};

struct ConvolutionLimit {
    double numeric = 0.0;
    double predicted = 0.0;  ///< chi(inf) [h(inf) - h(0)]
};

/// int_0^T chi(T - tau) h'(tau) dtau at T = horizon, next to chi(inf) [h(inf) - h(0)].
inline ConvolutionLimit convolution_limit(const TimeFunction& chi, const TimeFunction& h, double horizon,
                                          double tol = 1e-9, double limit_tol = 1e-6) {
    require_finite(horizon, "horizon");
    if (!(horizon > 0)) throw DomainError("horizon must be positive");
    if (!chi.value || !h.value) throw DomainError("convolution_limit needs samplers for chi and h");
    const double chi_end = chi.value(horizon), h_end = h.value(horizon), h0 = h.value(0.0);
    if (std::fabs(chi_end - chi.limit) > limit_tol)
        throw NonConvergence("chi(" + std::to_string(horizon) + ") is not within " + std::to_string(limit_tol) +
                             " of its stated limit");
    if (std::fabs(h_end - h.limit) > limit_tol)
        throw NonConvergence("h(" + std::to_string(horizon) + ") is not within " + std::to_string(limit_tol) +
                             " of its stated limit");
    if (std::fabs(h0 - h.initial) > limit_tol) throw NonConvergence("h(0) disagrees with its stated initial value");
    auto f = [&](double tau) { return chi.value(horizon - tau) * h.slope(tau); };
    ConvolutionLimit out;
    out.numeric = quad::integrate(f, 0.0, horizon, tol, "convolution integral", 8000);
    out.predicted = chi.limit * (h.limit - h.initial);
    return out;
}

}  // namespace memkernel
