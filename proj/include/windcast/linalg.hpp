#pragma once

// Dense least squares by Householder QR.
//
// Columns are equilibrated to unit 2-norm before factorizing and the scaling
// is undone on the solution, so the minimizer is that of the raw system.
// The normal equations are never formed.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "windcast/error.hpp"

namespace windcast::linalg {

struct LeastSquaresSolution {
    std::vector<double> coefficients;
    /// 2-norm condition estimate of the column-equilibrated matrix.
    double condition = 1.0;
};

namespace detail {

/// Upper-triangular p x p, column-major.
struct Triangular {
    std::size_t p = 0;
    std::vector<double> r;
    double at(std::size_t i, std::size_t j) const { return r[j * p + i]; }
};

inline void solve_upper(const Triangular& t, std::span<double> x) {
    for (std::size_t ii = t.p; ii-- > 0;) {
        double s = x[ii];
        for (std::size_t j = ii + 1; j < t.p; ++j) s -= t.at(ii, j) * x[j];
        x[ii] = s / t.at(ii, ii);
    }
}

inline void solve_upper_transposed(const Triangular& t, std::span<double> x) {
    for (std::size_t i = 0; i < t.p; ++i) {
        double s = x[i];
        for (std::size_t j = 0; j < i; ++j) s -= t.at(j, i) * x[j];
        x[i] = s / t.at(i, i);
    }
}

inline double norm2(std::span<const double> v) {
    double scale = 0.0;
    for (double x : v) scale = std::max(scale, std::abs(x));
    if (scale == 0.0) return 0.0;
    double s = 0.0;
    for (double x : v) s += (x / scale) * (x / scale);
    return scale * std::sqrt(s);
}

/// sigma_max / sigma_min of R by power and inverse iteration on RᵀR.
inline double condition_estimate(const Triangular& t) {
    const std::size_t p = t.p;
    if (p == 0) return 1.0;
    constexpr int iterations = 50;
    std::vector<double> v(p, 1.0), w(p);
    auto normalize = [](std::vector<double>& x) {
        const double n = norm2(x);
        for (auto& e : x) e /= n;
        return n;
    };
    normalize(v);
    double big = 0.0;
    for (int it = 0; it < iterations; ++it) {
        // w = Rᵀ R v
        for (std::size_t i = 0; i < p; ++i) {
            double s = 0.0;
            for (std::size_t j = i; j < p; ++j) s += t.at(i, j) * v[j];
            w[i] = s;
        }
        std::vector<double> u(p, 0.0);
        for (std::size_t j = 0; j < p; ++j)
            for (std::size_t i = 0; i <= j; ++i) u[j] += t.at(i, j) * w[i];
        v = u;
        big = normalize(v);
    }
    std::fill(v.begin(), v.end(), 1.0);
    normalize(v);
    double inv_small = 0.0;
    for (int it = 0; it < iterations; ++it) {
        // v <- (RᵀR)^{-1} v
        solve_upper_transposed(t, v);
        solve_upper(t, v);
        if (!std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); }))
            return std::numeric_limits<double>::infinity();
        inv_small = normalize(v);
    }
    return std::sqrt(big * inv_small);
}

} // namespace detail

/// Minimizes ||A x - b||₂ for row-major A (rows x cols). Requires rows >= cols and full column rank.
/// Throws RankDeficient listing the columns found dependent on earlier ones, labelled from `names`
/// when given.
inline LeastSquaresSolution solve_least_squares(std::span<const double> a, std::size_t rows, std::size_t cols,
                                                std::span<const double> b, std::span<const std::string> names = {}) {
    if (a.size() != rows * cols) throw LengthMismatch(a.size(), rows * cols);
    if (b.size() != rows) throw LengthMismatch(b.size(), rows);
    if (rows < cols) throw TooFewRows(std::to_string(rows) + " rows for " + std::to_string(cols) + " unknowns");

    auto column_name = [&](std::size_t j) {
        return j < names.size() ? names[j] : "column " + std::to_string(j);
    };

    // Column-major working copy, each column scaled to unit norm.
    std::vector<double> q(rows * cols);
    std::vector<double> scale(cols);
    std::vector<std::string> zero_cols;
    for (std::size_t j = 0; j < cols; ++j) {
        for (std::size_t i = 0; i < rows; ++i) q[j * rows + i] = a[i * cols + j];
        const double n = detail::norm2(std::span<const double>(q.data() + j * rows, rows));
        if (!(n > 0.0) || !std::isfinite(n)) {
            zero_cols.push_back(column_name(j));
            scale[j] = 1.0;
            continue;
        }
        scale[j] = n;
        for (std::size_t i = 0; i < rows; ++i) q[j * rows + i] /= n;
    }
    if (!zero_cols.empty()) throw RankDeficient(std::move(zero_cols));

    std::vector<double> rhs(b.begin(), b.end());
    std::vector<double> diag(cols);
    for (std::size_t k = 0; k < cols; ++k) {
        double* col = q.data() + k * rows;
        const double alpha_norm = detail::norm2(std::span<const double>(col + k, rows - k));
        if (alpha_norm == 0.0) {
            diag[k] = 0.0;
            continue;
        }
        const double alpha = col[k] > 0.0 ? -alpha_norm : alpha_norm;
        // v = x - alpha e1 stored in place; H = I - beta v vᵀ
        col[k] -= alpha;
        double vtv = 0.0;
        for (std::size_t i = k; i < rows; ++i) vtv += col[i] * col[i];
        const double beta = 2.0 / vtv;
        for (std::size_t j = k + 1; j < cols; ++j) {
            double* cj = q.data() + j * rows;
            double s = 0.0;
            for (std::size_t i = k; i < rows; ++i) s += col[i] * cj[i];
            s *= beta;
            for (std::size_t i = k; i < rows; ++i) cj[i] -= s * col[i];
        }
        double s = 0.0;
        for (std::size_t i = k; i < rows; ++i) s += col[i] * rhs[i];
        s *= beta;
        for (std::size_t i = k; i < rows; ++i) rhs[i] -= s * col[i];
        diag[k] = alpha;
    }

    detail::Triangular r{cols, std::vector<double>(cols * cols, 0.0)};
    for (std::size_t j = 0; j < cols; ++j) {
        for (std::size_t i = 0; i < j; ++i) r.r[j * cols + i] = q[j * rows + i];
        r.r[j * cols + j] = diag[j];
    }

    double max_diag = 0.0;
    for (double d : diag) max_diag = std::max(max_diag, std::abs(d));
    const double tol = static_cast<double>(std::max(rows, cols)) * std::numeric_limits<double>::epsilon() * max_diag;
    std::vector<std::string> dependent;
    for (std::size_t j = 0; j < cols; ++j)
        if (!(std::abs(diag[j]) > tol)) dependent.push_back(column_name(j));
    if (!dependent.empty()) throw RankDeficient(std::move(dependent));

    LeastSquaresSolution out;
    out.coefficients.assign(rhs.begin(), rhs.begin() + static_cast<std::ptrdiff_t>(cols));
    detail::solve_upper(r, out.coefficients);
    for (std::size_t j = 0; j < cols; ++j) out.coefficients[j] /= scale[j];
    out.condition = detail::condition_estimate(r);
    return out;
}

} // namespace windcast::linalg
