#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "memkernel/grid.hpp"
#include "memkernel/kernel.hpp"

// Product-integration weights for int_0^L G(x_i, xi, s) f(xi) dxi on the lattice
// x_i = i h, h = L/N, with f replaced cell by cell by its cubic interpolant
// p_c(x_c + eta) = sum_m coef[c][m] (eta/h)^m.
//
// Everything reduces to the periodised cell moments
//     P_m(r) = sum_n int_0^h H((r + 2nN) h - eta, y) (eta/h)^m deta,  r = 0..2N-1,
// because G = sum_n [H(x - xi + 2nL) - H(x + xi + 2nL)] for the heat part and K is
// a superposition of heat kernels (see kernel.hpp). A "folded table" is the array
// T[m * 2N + r] holding these four moment rows.

namespace memkernel::detail {

inline constexpr double kGaussWindow = 9.5;  // e^{-9.5^2/2} ~ 2e-20

class FoldedTables {
public:
    FoldedTables(int n_cells, double length, double eps) : N_(n_cells), L_(length), h_(length / n_cells), eps_(eps) {
        cos_.resize(2 * N_);
        sin_.resize(2 * N_);
        for (int r = 0; r < 2 * N_; ++r) {
            cos_[r] = std::cos(std::numbers::pi * r / N_);
            sin_[r] = std::sin(std::numbers::pi * r / N_);
        }
        build_stencils();
    }

    int cells() const { return N_; }
    int size() const { return 8 * N_; }
    double spacing() const { return h_; }

    /// Folded heat-kernel table at time y (accumulated with factor `scale`).
    void add_heat(double y, double scale, double* T) const {
        const int twoN = 2 * N_;
        if (y <= 0.0) {
            T[0 * twoN + 0] += 0.5 * scale;
            for (int m = 0; m < 4; ++m) T[m * twoN + 1] += 0.5 * scale;
            return;
        }
        const double sigma = std::sqrt(2.0 * eps_ * y);
        if (sigma > 0.25 * L_) {
            add_heat_fourier(y, scale, T);
            return;
        }
        const int lo = static_cast<int>(std::ceil(-kGaussWindow * sigma / h_));
        const int hi = static_cast<int>(std::floor(1.0 + kGaussWindow * sigma / h_));
        const auto& gl = quad::gauss_legendre(8);
        for (int R = lo; R <= hi; ++R) {
            const int r = ((R % twoN) + twoN) % twoN;
            const double z = R * h_;
            double mom[4];
            if (sigma < h_) {
                analytic_moments(z, sigma, mom);
            } else {
                mom[0] = mom[1] = mom[2] = mom[3] = 0.0;
                for (int q = 0; q < 8; ++q) {
                    const double xi = 0.5 * (1.0 + gl.nodes[q]);
                    const double w = 0.5 * gl.weights[q] * h_ * heat_kernel(z - h_ * xi, y, eps_);
                    mom[0] += w;
                    mom[1] += w * xi;
                    mom[2] += w * xi * xi;
                    mom[3] += w * xi * xi * xi;
                }
            }
            for (int m = 0; m < 4; ++m) T[m * twoN + r] += scale * mom[m];
        }
    }

    /// Folded table of K(., s): e^{-a s} H(., s) - int_0^s m(s, y) H(., y) dy.
    void add_kernel(double s, double scale, const OperatorParams& p, double* T) const {
        add_heat(s, scale * std::exp(-p.a * s), T);
        const int panels = memory_rule_panels(p, s) + extra_panels(s);
        const auto& gl = quad::gauss_legendre(24);
        const double width = 0.5 * std::numbers::pi / panels;
        for (int k = 0; k < panels; ++k) {
            const double a = k * width;
            for (int q = 0; q < 24; ++q) {
                const double phi = a + 0.5 * width * (1.0 + gl.nodes[q]);
                const auto node = memory_node(p, s, phi);
                add_heat(node.y, -scale * 0.5 * width * gl.weights[q] * node.weight, T);
            }
        }
    }

    /// Cubic coefficients coef[c*4 + m] of the cellwise interpolant of nodal values f[0..N].
    void cell_coefficients(const double* f, double* coef) const {
        for (int c = 0; c < N_; ++c) {
            const int s = stencil_start(c);
            const auto& V = vinv_[stencil_type(c)];
            for (int m = 0; m < 4; ++m) {
                double acc = 0.0;
                for (int l = 0; l < 4; ++l) acc += V[m][l] * f[s + l];
                coef[4 * c + m] = acc;
            }
        }
    }

    /// out[i] = int_0^L G_T(x_i, xi) p(xi) dxi for the table T; rows 0 and N are zero.
    void apply(const double* T, const double* coef, double* out) const {
        const int twoN = 2 * N_;
        out[0] = out[N_] = 0.0;
        for (int i = 1; i < N_; ++i) {
            double acc = 0.0;
            for (int c = 0; c < N_; ++c) {
                int r1 = i - c;
                if (r1 < 0) r1 += twoN;
                const int r2 = twoN - i - c;  // (-i - c) mod 2N, always in [2, 2N - 1]
                const double* cf = coef + 4 * c;
                acc += (T[r1] - T[r2]) * cf[0] + (T[twoN + r1] - T[twoN + r2]) * cf[1] +
                       (T[2 * twoN + r1] - T[2 * twoN + r2]) * cf[2] + (T[3 * twoN + r1] - T[3 * twoN + r2]) * cf[3];
            }
            out[i] = acc;
        }
    }

    /// Nodal matrix A with (A f)_i = apply(T, coef(f))_i, stored for rows 1..N-1.
    Matrix nodal_matrix(const double* T) const {
        const int twoN = 2 * N_;
        Matrix A(N_ - 1, N_ + 1);
        for (int i = 1; i < N_; ++i) {
            double* row = A.row(i - 1);
            for (int c = 0; c < N_; ++c) {
                int r1 = i - c;
                if (r1 < 0) r1 += twoN;
                const int r2 = twoN - i - c;
                double q[4];
                for (int m = 0; m < 4; ++m) q[m] = T[m * twoN + r1] - T[m * twoN + r2];
                const int s = stencil_start(c);
                const auto& V = vinv_[stencil_type(c)];
                for (int l = 0; l < 4; ++l)
                    row[s + l] += q[0] * V[0][l] + q[1] * V[1][l] + q[2] * V[2][l] + q[3] * V[3][l];
            }
        }
        return A;
    }

    static void apply_nodal(const Matrix& A, const double* f, double* out) {
        const std::size_t n = A.cols();
        for (std::size_t r = 0; r < A.rows(); ++r) {
            const double* a = A.row(r);
            double acc = 0.0;
            for (std::size_t k = 0; k < n; ++k) acc += a[k] * f[k];
            out[r + 1] += acc;
        }
    }

    /// Row weights at an arbitrary point x in [0, L] for table-free evaluation:
    /// w[c*4 + m] = int over cell c of G_H(x, xi, y) (eta/h)^m, for the heat kernel at y.
    void add_heat_row(double x, double y, double scale, double* w) const {
        const double sigma = std::sqrt(2.0 * eps_ * std::max(y, 0.0));
        const double reach = kGaussWindow * sigma + h_;
        const auto& gl = quad::gauss_legendre(8);
        auto moments = [&](double z, double* mom) {
            if (y <= 0.0) {
                mom[0] = mom[1] = mom[2] = mom[3] = 0.0;
                if (z > 0 && z < h_) {
                    const double xi = z / h_;
                    mom[0] = 1.0, mom[1] = xi, mom[2] = xi * xi, mom[3] = xi * xi * xi;
                }
                return;
            }
            if (sigma < h_) return analytic_moments(z, sigma, mom);
            mom[0] = mom[1] = mom[2] = mom[3] = 0.0;
            for (int q = 0; q < 8; ++q) {
                const double xi = 0.5 * (1.0 + gl.nodes[q]);
                const double g = 0.5 * gl.weights[q] * h_ * heat_kernel(z - h_ * xi, y, eps_);
                mom[0] += g, mom[1] += g * xi, mom[2] += g * xi * xi, mom[3] += g * xi * xi * xi;
            }
        };
        const int nmax = static_cast<int>(std::ceil((reach + 2.0 * L_) / (2.0 * L_)));
        for (int c = 0; c < N_; ++c) {
            const double xc = c * h_;
            for (int n = -nmax; n <= nmax; ++n) {
                double mom[4];
                const double z1 = x - xc + 2.0 * n * L_;
                if (z1 > -reach && z1 < reach + h_) {
                    moments(z1, mom);
                    for (int m = 0; m < 4; ++m) w[4 * c + m] += scale * mom[m];
                }
                const double z2 = -x - xc + 2.0 * n * L_;
                if (z2 > -reach && z2 < reach + h_) {
                    moments(z2, mom);
                    for (int m = 0; m < 4; ++m) w[4 * c + m] -= scale * mom[m];
                }
            }
        }
    }

    void add_kernel_row(double x, double s, double scale, const OperatorParams& p, double* w) const {
        add_heat_row(x, s, scale * std::exp(-p.a * s), w);
        const int panels = memory_rule_panels(p, s) + extra_panels(s);
        const auto& gl = quad::gauss_legendre(24);
        const double width = 0.5 * std::numbers::pi / panels;
        for (int k = 0; k < panels; ++k) {
            for (int q = 0; q < 24; ++q) {
                const double phi = k * width + 0.5 * width * (1.0 + gl.nodes[q]);
                const auto node = memory_node(p, s, phi);
                add_heat_row(x, node.y, -scale * 0.5 * width * gl.weights[q] * node.weight, w);
            }
        }
    }

    int stencil_start(int c) const { return std::clamp(c - 1, 0, N_ - 3); }

private:
    // 0: nodes {c-1..c+2}; 1: first cell {c..c+3}; 2: last cell {c-2..c+1}.
    int stencil_type(int c) const {
        if (c == 0) return 1;
        if (c == N_ - 1) return 2;
        return 0;
    }

    // Extra phi panels resolving the heat-kernel transition at y ~ h^2 when s >> h^2.
    int extra_panels(double s) const {
        const double ratio = std::sqrt(eps_ * s) / h_;
        return ratio > 8.0 ? 1 + static_cast<int>(std::log2(ratio / 8.0)) : 0;
    }

    void build_stencils() {
        const std::array<std::array<double, 4>, 3> offsets{{{-1, 0, 1, 2}, {0, 1, 2, 3}, {-2, -1, 0, 1}}};
        for (int t = 0; t < 3; ++t) {
            const auto& o = offsets[t];
            for (int l = 0; l < 4; ++l) {
                // Monomial coefficients of the Lagrange basis polynomial for node l.
                std::array<double, 4> poly{1, 0, 0, 0};
                double denom = 1.0;
                for (int k = 0; k < 4; ++k) {
                    if (k == l) continue;
                    std::array<double, 4> next{0, 0, 0, 0};
                    for (int d = 0; d < 3; ++d) {
                        next[d + 1] += poly[d];
                        next[d] -= o[k] * poly[d];
                    }
                    poly = next;
                    denom *= o[l] - o[k];
                }
                for (int m = 0; m < 4; ++m) vinv_[t][m][l] = poly[m] / denom;
            }
        }
    }

    // int_{-z}^{h-z} phi_sigma(w) ((z + w)/h)^m dw with erf/erfc and Gaussian recursions.
    void analytic_moments(double z, double sigma, double* mom) const {
        const double alpha = -z, beta = h_ - z;
        const double k = 1.0 / (std::numbers::sqrt2 * sigma);
        double m0;
        if (alpha * k > 0)
            m0 = 0.5 * (std::erfc(alpha * k) - std::erfc(beta * k));
        else if (beta * k < 0)
            m0 = 0.5 * (std::erfc(-beta * k) - std::erfc(-alpha * k));
        else
            m0 = 0.5 * (std::erf(beta * k) - std::erf(alpha * k));
        const double norm = 1.0 / (sigma * std::sqrt(2.0 * std::numbers::pi));
        const double pa = norm * std::exp(-alpha * alpha * k * k), pb = norm * std::exp(-beta * beta * k * k);
        const double s2 = sigma * sigma;
        const double m1 = s2 * (pa - pb);
        const double m2 = s2 * (alpha * pa - beta * pb) + s2 * m0;
        const double m3 = s2 * (alpha * alpha * pa - beta * beta * pb) + 2.0 * s2 * m1;
        const double zeta = z / h_;
        const double mu1 = m1 / h_, mu2 = m2 / (h_ * h_), mu3 = m3 / (h_ * h_ * h_);
        mom[0] = m0;
        mom[1] = zeta * m0 + mu1;
        mom[2] = zeta * zeta * m0 + 2.0 * zeta * mu1 + mu2;
        mom[3] = zeta * zeta * zeta * m0 + 3.0 * zeta * zeta * mu1 + 3.0 * zeta * mu2 + mu3;
    }

    // Periodised heat kernel as a cosine series; used once sigma is a sizable
    // fraction of L, where the image sum would need many terms.
    void add_heat_fourier(double y, double scale, double* T) const {
        const int twoN = 2 * N_;
        const double kappa1 = std::numbers::pi / L_;
        const int K = static_cast<int>(std::ceil(std::sqrt(42.0 / (eps_ * y)) / kappa1)) + 1;
        const auto& gl = quad::gauss_legendre(16);
        const double base = scale / (2.0 * L_);
        for (int m = 0; m < 4; ++m)
            for (int r = 0; r < twoN; ++r) T[m * twoN + r] += base * h_ / (m + 1);
        for (int k = 1; k <= K; ++k) {
            const double kap = k * kappa1;
            const double damp = 2.0 * base * std::exp(-eps_ * y * kap * kap);
            double C[4] = {0, 0, 0, 0}, S[4] = {0, 0, 0, 0};
            for (int q = 0; q < 16; ++q) {
                const double xi = 0.5 * (1.0 + gl.nodes[q]);
                const double w = 0.5 * gl.weights[q] * h_;
                const double c = std::cos(kap * h_ * xi), s = std::sin(kap * h_ * xi);
                double pw = 1.0;
                for (int m = 0; m < 4; ++m) {
                    C[m] += w * c * pw;
                    S[m] += w * s * pw;
                    pw *= xi;
                }
            }
            for (int r = 0; r < twoN; ++r) {
                const int idx = static_cast<int>((static_cast<long>(k) * r) % twoN);
                const double cr = cos_[idx], sr = sin_[idx];
                for (int m = 0; m < 4; ++m) T[m * twoN + r] += damp * (cr * C[m] + sr * S[m]);
            }
        }
    }

    int N_;
    double L_, h_, eps_;
    std::vector<double> cos_, sin_;
    std::array<std::array<std::array<double, 4>, 4>, 3> vinv_{};
};

}  // namespace memkernel::detail
