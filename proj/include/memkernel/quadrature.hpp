#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <queue>
#include <vector>

#include "memkernel/errors.hpp"

namespace memkernel::quad {

/// Gauss-Legendre rule on [-1, 1].
struct GaussLegendreRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

inline constexpr int kMaxGaussLegendreOrder = 128;

namespace detail {

inline GaussLegendreRule build_gauss_legendre(int n) {
    GaussLegendreRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) p0 = 1.0;
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::fabs(dx) < 1e-16) break;
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
    return rule;
}

}  // namespace detail

/// Cached rule of order n (1 <= n <= 128). Thread-safe after first use.
inline const GaussLegendreRule& gauss_legendre(int n) {
    static const std::vector<GaussLegendreRule> rules = [] {
        std::vector<GaussLegendreRule> r(kMaxGaussLegendreOrder + 1);
        for (int k = 1; k <= kMaxGaussLegendreOrder; ++k) r[k] = detail::build_gauss_legendre(k);
        return r;
    }();
    if (n < 1 || n > kMaxGaussLegendreOrder) throw DomainError("Gauss-Legendre order out of range");
    return rules[n];
}

/// Fixed-order Gauss-Legendre on [a, b].
template <class F>
double gauss_legendre_integrate(F&& f, double a, double b, int n) {
    const auto& rule = gauss_legendre(n);
    const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
    return sum * half;
}

/// Composite Gauss-Legendre with `panels` equal panels of order n.
template <class F>
double composite_gauss_legendre(F&& f, double a, double b, int panels, int n) {
    const double w = (b - a) / panels;
    double sum = 0.0;
    for (int p = 0; p < panels; ++p) sum += gauss_legendre_integrate(f, a + p * w, a + (p + 1) * w, n);
    return sum;
}

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
    int intervals = 0;
    bool converged = false;
};

namespace detail {

// Kronrod 15 / Gauss 7 abscissae and weights (QUADPACK qk15).
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double a, b, value, error;
    bool operator<(const Segment& o) const { return error < o.error; }
};

template <class F>
Segment gk15(F& f, double a, double b) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    const double fc = f(c);
    double resk = fc * kWgk[7];
    double resg = fc * kWg[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = h * kXgk[j];
        const double f1 = f(c - dx), f2 = f(c + dx);
        resk += kWgk[j] * (f1 + f2);
        if (j % 2 == 1) resg += kWg[j / 2] * (f1 + f2);
    }
    return {a, b, resk * h, std::fabs((resk - resg) * h)};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod (7,15) with an absolute tolerance.
template <class F>
QuadResult adaptive_gk15(F&& f, double a, double b, double abs_tol, int max_intervals = 2000) {
    QuadResult out;
    if (a == b) {
        out.converged = true;
        return out;
    }
    std::priority_queue<detail::Segment> heap;
    auto first = detail::gk15(f, a, b);
    double total = first.value, err = first.error;
    heap.push(first);
    int n = 1;
    while (err > abs_tol && n < max_intervals) {
        auto worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) {
            heap.push(worst);
            break;
        }
        auto left = detail::gk15(f, worst.a, mid);
        auto right = detail::gk15(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++n;
    }
    // Re-sum to shed the drift of the incremental updates.
    total = 0.0;
    err = 0.0;
    while (!heap.empty()) {
        total += heap.top().value;
        err += heap.top().error;
        heap.pop();
    }
    out.value = total;
    out.error = err;
    out.intervals = n;
    out.converged = err <= abs_tol;
    return out;
}

/// Like adaptive_gk15 but throws NumericalFailure when the tolerance is missed.
template <class F>
double integrate(F&& f, double a, double b, double abs_tol, const char* what = "quadrature",
                 int max_intervals = 2000) {
    auto r = adaptive_gk15(f, a, b, abs_tol, max_intervals);
    if (!r.converged && !(r.error <= 10 * abs_tol))
        throw NumericalFailure(std::string(what) + ": error estimate " + std::to_string(r.error) +
                               " above tolerance " + std::to_string(abs_tol));
    return r.value;
}

/// Chebyshev expansion of a smooth function on [a, b].
class ChebyshevSeries {
public:
    ChebyshevSeries() = default;

    /// Fits with degree doubling (from 16) until the trailing coefficients fall
    /// below `abs_tol`; throws NumericalFailure past `max_degree`.
    template <class F>
    static ChebyshevSeries fit(F&& f, double a, double b, double abs_tol, int max_degree = 1024) {
        for (int n = 16; n <= max_degree; n *= 2) {
            ChebyshevSeries s = fit_degree(f, a, b, n);
            double tail = 0.0;
            for (int k = n - 3; k <= n; ++k) tail = std::max(tail, std::fabs(s.c_[k]));
            if (tail <= abs_tol) {
                s.trim(abs_tol);
                return s;
            }
        }
        throw NumericalFailure("Chebyshev fit did not resolve the function at degree " +
                               std::to_string(max_degree));
    }

    template <class F>
    static ChebyshevSeries fit_degree(F&& f, double a, double b, int n) {
        ChebyshevSeries s;
        s.a_ = a;
        s.b_ = b;
        std::vector<double> vals(n + 1);
        for (int j = 0; j <= n; ++j) {
            const double x = std::cos(std::numbers::pi * j / n);
            vals[j] = f(0.5 * (a + b) + 0.5 * (b - a) * x);
        }
        std::vector<double> cos_table(2 * n);
        for (int m = 0; m < 2 * n; ++m) cos_table[m] = std::cos(std::numbers::pi * m / n);
        s.c_.assign(n + 1, 0.0);
        for (int k = 0; k <= n; ++k) {
            double sum = 0.0;
            for (int j = 0; j <= n; ++j) {
                const double w = (j == 0 || j == n) ? 0.5 : 1.0;
                sum += w * vals[j] * cos_table[(static_cast<long>(k) * j) % (2 * n)];
            }
            s.c_[k] = sum * 2.0 / n;
        }
        s.c_[0] *= 0.5;
        s.c_[n] *= 0.5;
        return s;
    }

    double operator()(double x) const {
        const double u = (2.0 * x - a_ - b_) / (b_ - a_);
        double b1 = 0.0, b2 = 0.0;
        for (std::size_t k = c_.size(); k-- > 1;) {
            const double t = 2.0 * u * b1 - b2 + c_[k];
            b2 = b1;
            b1 = t;
        }
        return u * b1 - b2 + c_[0];
    }

    int degree() const { return static_cast<int>(c_.size()) - 1; }

private:
    void trim(double tol) {
        while (c_.size() > 2 && std::fabs(c_.back()) < 0.01 * tol) c_.pop_back();
    }

    double a_ = 0.0, b_ = 1.0;
    std::vector<double> c_;
};

}  // namespace memkernel::quad
