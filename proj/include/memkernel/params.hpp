#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "memkernel/errors.hpp"

namespace memkernel {

inline void require_finite(double v, const char* what) {
    if (!std::isfinite(v)) throw DomainError(std::string(what) + " is not finite");
}

/// Constants of u_t - eps u_xx + a u + b int_0^t e^{-beta(t-tau)} u dtau.
struct OperatorParams {
    double eps = 1.0;
    double a = 0.5;
    double b = 0.5;
    double beta = 1.0;

    void validate() const {
        require_finite(eps, "eps");
        require_finite(a, "a");
        require_finite(b, "b");
        require_finite(beta, "beta");
        if (eps <= 0 || a <= 0 || b <= 0 || beta <= 0)
            throw DomainError("operator constants eps, a, b, beta must be strictly positive");
    }

    /// Decay rate min(a, beta) of the a-priori estimates.
    double omega() const { return std::min(a, beta); }
    /// Steady decay rate sqrt((a + b/beta)/eps).
    double sigma0() const { return std::sqrt((a + b / beta) / eps); }
    /// Time integral of E(t): 1/(a beta).
    double beta1() const { return 1.0 / (a * beta); }
};

/// Truncation orders and tolerances shared by every series and quadrature.
struct SeriesControl {
    double quad_tol = 1e-10;
    int n_images = 16;
    double t_floor = 1e-6;

    void validate() const {
        if (!(quad_tol > 0 && quad_tol < 1)) throw DomainError("quad_tol must lie in (0, 1)");
        if (n_images < 1) throw DomainError("n_images must be >= 1");
        if (!(t_floor > 0) || !std::isfinite(t_floor)) throw DomainError("t_floor must be > 0");
    }
};

/// The strip 0 <= x <= length.
struct StripDomain {
    double length = 1.0;

    void validate() const {
        if (!(length > 0) || !std::isfinite(length))
            throw DomainError("domain length must be finite and positive");
    }
};

}  // namespace memkernel
