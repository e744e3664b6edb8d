#pragma once

// MAE, RMSE and R² over kW vectors. Sums are pairwise and R² uses a
// two-pass mean so 30k-row inputs stay accurate.

#include <cmath>
#include <cstddef>
#include <span>

#include "windcast/error.hpp"
#include "windcast/numeric.hpp"

namespace windcast {

namespace detail {
inline void check_pair(std::span<const double> actual, std::span<const double> predicted) {
    if (actual.size() != predicted.size()) throw LengthMismatch(actual.size(), predicted.size());
    if (actual.empty()) throw EmptyVector();
}
} // namespace detail

inline double mae(std::span<const double> actual, std::span<const double> predicted) {
    detail::check_pair(actual, predicted);
    const double s = pairwise_sum(actual.size(), [&](std::size_t i) { return std::abs(actual[i] - predicted[i]); });
    return s / static_cast<double>(actual.size());
}

inline double rmse(std::span<const double> actual, std::span<const double> predicted) {
    detail::check_pair(actual, predicted);
    const double s = pairwise_sum(actual.size(), [&](std::size_t i) {
        const double e = actual[i] - predicted[i];
        return e * e;
    });
    return std::sqrt(s / static_cast<double>(actual.size()));
}

/// 1 - SS_res / SS_tot. Negative when the predictor is worse than the mean of `actual`.
inline double r_squared(std::span<const double> actual, std::span<const double> predicted) {
    if (actual.size() != predicted.size()) throw LengthMismatch(actual.size(), predicted.size());
    if (actual.size() < 2) throw EmptyVector();
    const double n = static_cast<double>(actual.size());
    const double mean = pairwise_sum(actual) / n;
    const double ss_tot = pairwise_sum(actual.size(), [&](std::size_t i) {
        const double d = actual[i] - mean;
        return d * d;
    });
    if (!(ss_tot > 0.0)) throw ConstantActual();
    const double ss_res = pairwise_sum(actual.size(), [&](std::size_t i) {
        const double e = actual[i] - predicted[i];
        return e * e;
    });
    return 1.0 - ss_res / ss_tot;
}

struct EvalReport {
    double mae = 0.0;
    double rmse = 0.0;
    double r_squared = 0.0;
    std::size_t n_samples = 0;

    friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

inline EvalReport evaluate(std::span<const double> actual, std::span<const double> predicted) {
    return {mae(actual, predicted), rmse(actual, predicted), r_squared(actual, predicted), actual.size()};
}

} // namespace windcast
