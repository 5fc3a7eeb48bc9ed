#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "memkernel/params.hpp"

namespace memkernel {

/// Dense row-major matrix.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
    double* row(std::size_t r) { return data_.data() + r * cols_; }
    const double* row(std::size_t r) const { return data_.data() + r * cols_; }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<double> data_;
};

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw DomainError("matrix shapes differ");
    double m = 0.0;
    for (std::size_t k = 0; k < a.data().size(); ++k) m = std::max(m, std::fabs(a.data()[k] - b.data()[k]));
    return m;
}

/// Uniform space-time grid: nx_cells + 1 nodes on [0, L], nt_steps steps on (0, T].
struct GridSpec {
    int nx_cells = 64;
    int nt_steps = 100;

    void validate() const {
        if (nx_cells < 3) throw DomainError("nx_cells must be >= 3");
        if (nt_steps < 1) throw DomainError("nt_steps must be >= 1");
    }
};

struct SolveDiagnostics {
    int iterations = 0;
    std::vector<double> increments;  ///< sup |u^{k+1} - u^k| per Picard sweep
    std::vector<double> ratios;      ///< successive increment ratios
    double boundary_error = 0.0;     ///< sup over t of |u(0,t) - g1|, |u(L,t) - g2|
    std::vector<std::string> warnings;
    std::map<std::string, double> extra;

    double max_ratio() const {
        double r = 0.0;
        for (double v : ratios) r = std::max(r, v);
        return r;
    }
};

/// Solution samples u(x_i, t_j); values(j, i) with t_j in (0, T].
struct GridSolution {
    std::vector<double> x_nodes;
    std::vector<double> t_nodes;
    Matrix values;
    SeriesControl control;
    SolveDiagnostics diagnostics;

    double at(std::size_t j, std::size_t i) const { return values(j, i); }
};

inline std::vector<double> uniform_nodes(double a, double b, int cells) {
    std::vector<double> v(cells + 1);
    for (int i = 0; i <= cells; ++i) v[i] = a + (b - a) * i / cells;
    v[cells] = b;
    return v;
}

}  // namespace memkernel
