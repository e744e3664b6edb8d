#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "windcast/dataset.hpp"
#include "windcast/error.hpp"
#include "windcast/numeric.hpp"

namespace windcast {

/// Pearson product-moment correlation, two-pass (means first, then co-moments).
inline double pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw LengthMismatch(x.size(), y.size());
    if (x.size() < 2) throw InvalidArgument("pearson needs at least 2 samples");
    const double n = static_cast<double>(x.size());
    const double mx = pairwise_sum(x) / n;
    const double my = pairwise_sum(y) / n;
    const double sxx = pairwise_sum(x.size(), [&](std::size_t i) { return (x[i] - mx) * (x[i] - mx); });
    const double syy = pairwise_sum(y.size(), [&](std::size_t i) { return (y[i] - my) * (y[i] - my); });
    if (!(sxx > 0.0)) throw ConstantInput("x");
    if (!(syy > 0.0)) throw ConstantInput("y");
    const double sxy = pairwise_sum(x.size(), [&](std::size_t i) { return (x[i] - mx) * (y[i] - my); });
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

struct CorrelationMatrix {
    std::vector<std::string> labels;
    std::vector<double> values; // row-major k x k

    [[nodiscard]] std::size_t size() const noexcept { return labels.size(); }
    [[nodiscard]] double operator()(std::size_t i, std::size_t j) const { return values[i * size() + j]; }
};

/// 4 x 4 matrix over (wind_speed, wind_direction, temperature, power).
inline CorrelationMatrix correlation_matrix(const Dataset& d) {
    if (d.size() < 2) throw InvalidArgument("correlation needs at least 2 rows");
    const std::array<std::vector<double>, 4> cols{d.wind_speed(), d.wind_direction(), d.temperature(), d.power()};
    CorrelationMatrix m{{"wind_speed", "wind_direction", "temperature", "power"}, std::vector<double>(16, 0.0)};
    for (std::size_t c = 0; c < 4; ++c) {
        const auto& v = cols[c];
        if (std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); }))
            throw ConstantInput(m.labels[c]);
    }
    for (std::size_t i = 0; i < 4; ++i) {
        m.values[i * 4 + i] = 1.0;
        for (std::size_t j = i + 1; j < 4; ++j) {
            const double r = pearson(cols[i], cols[j]);
            m.values[i * 4 + j] = r;
            m.values[j * 4 + i] = r;
        }
    }
    return m;
}

/// Heatmap plot data: one (row_label, col_label, r) triple per cell.
inline void write_heatmap_csv(std::ostream& out, const CorrelationMatrix& m) {
    out << "row_label,col_label,r\n";
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < m.size(); ++j)
            out << m.labels[i] << ',' << m.labels[j] << ',' << format_double(m(i, j)) << '\n';
}

inline constexpr double kBetzLimit = 0.59;

/// Aerodynamic power 0.5·ρ·Cp·A·V³, returned in kW.
inline double physical_power(double v, double rho, double cp, double area) {
    if (cp > kBetzLimit) throw BetzViolation(cp);
    if (!(v >= 0.0) || !(rho >= 0.0) || !(cp >= 0.0) || !(area >= 0.0))
        throw InvalidArgument("physical_power inputs must be non-negative");
    const double k = 0.5 * rho * cp * area;
    return k * (v * v * v) / 1000.0;
}

} // namespace windcast
