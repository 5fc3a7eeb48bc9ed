#pragma once

#include <cmath>
#include <numbers>

#include "memkernel/errors.hpp"

namespace memkernel {

/// Order of J_n. Only J_0 and J_1 enter the fundamental solution.
struct BesselOrder {
    int n = 0;
    constexpr explicit BesselOrder(int order) : n(order) {}
};

/// |z| below which J_0/J_1 use the ascending series (in long double); above it
/// the Hankel asymptotic expansion. At 12 the optimally truncated asymptotic
/// series is only good to ~1e-12, so the seam sits at 15 where both regimes
/// measure ~2e-15 against a 50-digit reference (tests/test_special_functions.cpp).
inline constexpr double kBesselSeriesCrossover = 15.0;

namespace detail {

inline double bessel_series(int n, double z) {
    const long double q = -0.25L * static_cast<long double>(z) * z;
    long double term = (n == 0) ? 1.0L : 0.5L * static_cast<long double>(z);
    long double sum = term;
    for (int k = 1; k < 200; ++k) {
        term *= q / (static_cast<long double>(k) * (k + n));
        sum += term;
        if (std::fabs(term) < 1e-21L * std::fabs(sum) + 1e-300L) break;
    }
    return static_cast<double>(sum);
}

inline double bessel_asymptotic(int n, double z) {
    // J_n(z) = sqrt(2/(pi z)) [P cos(chi) - Q sin(chi)], chi = z - (n/2 + 1/4) pi
    const double mu = 4.0 * n * n;
    double p = 1.0, q = 0.0;
    double term = 1.0;
    double last = 1.0;
    for (int k = 1; k < 80; ++k) {
        term *= (mu - (2.0 * k - 1) * (2.0 * k - 1)) / (k * 8.0 * z);
        if (std::fabs(term) > last) break;  // series started diverging
        last = std::fabs(term);
        switch (k % 4) {
            case 1: q += term; break;
            case 2: p -= term; break;
            case 3: q -= term; break;
            default: p += term; break;
        }
        if (last < 1e-18) break;
    }
    const double c = std::cos(z), s = std::sin(z);
    double cchi, schi;
    if (n == 0) {
        cchi = (c + s) * std::numbers::sqrt2 / 2;
        schi = (s - c) * std::numbers::sqrt2 / 2;
    } else {
        cchi = (s - c) * std::numbers::sqrt2 / 2;
        schi = -(s + c) * std::numbers::sqrt2 / 2;
    }
    return std::sqrt(2.0 / (std::numbers::pi * z)) * (p * cchi - q * schi);
}

}  // namespace detail

/// Bessel function of the first kind J_n(z) for n in {0, 1}.
inline double bessel_j(BesselOrder order, double z) {
    if (order.n != 0 && order.n != 1) throw UnsupportedOrder(order.n);
    if (!std::isfinite(z)) throw DomainError("bessel_j argument is not finite");
    const double az = std::fabs(z);
    const double v = az < kBesselSeriesCrossover ? detail::bessel_series(order.n, az)
                                                 : detail::bessel_asymptotic(order.n, az);
    return (order.n == 1 && z < 0) ? -v : v;
}

inline double bessel_j0(double z) { return bessel_j(BesselOrder{0}, z); }
inline double bessel_j1(double z) { return bessel_j(BesselOrder{1}, z); }

}  // namespace memkernel
