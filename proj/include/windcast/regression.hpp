#pragma once

// Parametric power-curve models: multiple linear regression and
// polynomial-expansion regression, both fitted by ordinary least squares.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include <json.hpp>

#include "windcast/dataset.hpp"
#include "windcast/error.hpp"
#include "windcast/linalg.hpp"

namespace windcast {

/// Fits above this condition estimate are kept but flagged.
inline constexpr double kConditionWarningThreshold = 1e10;

struct LinearModel {
    double intercept = 0.0;
    std::vector<double> coefficients;
    std::vector<std::string> feature_names;
    double condition_estimate = 1.0;

    [[nodiscard]] bool condition_warning() const noexcept { return condition_estimate > kConditionWarningThreshold; }
    friend bool operator==(const LinearModel&, const LinearModel&) = default;
};

namespace detail {
inline void require_features(const std::vector<std::string>& expected, const DesignMatrix& m) {
    if (expected == m.feature_names()) return;
    std::string want, got;
    for (const auto& n : expected) want += (want.empty() ? "" : ",") + n;
    for (const auto& n : m.feature_names()) got += (got.empty() ? "" : ",") + n;
    throw FeatureMismatch("model expects [" + want + "], matrix has [" + got + "]");
}
} // namespace detail

/// OLS with an intercept. Needs more rows than features and full column rank.
inline LinearModel fit_ols(const DesignMatrix& m) {
    const std::size_t n = m.rows(), k = m.cols();
    if (n <= k)
        throw TooFewRows(std::to_string(n) + " rows cannot determine " + std::to_string(k + 1) + " coefficients");
    std::vector<double> augmented(n * (k + 1));
    for (std::size_t i = 0; i < n; ++i) {
        augmented[i * (k + 1)] = 1.0;
        for (std::size_t j = 0; j < k; ++j) augmented[i * (k + 1) + j + 1] = m(i, j);
    }
    std::vector<std::string> names{"intercept"};
    names.insert(names.end(), m.feature_names().begin(), m.feature_names().end());
    auto sol = linalg::solve_least_squares(augmented, n, k + 1, m.target(), names);

    LinearModel model;
    model.intercept = sol.coefficients[0];
    model.coefficients.assign(sol.coefficients.begin() + 1, sol.coefficients.end());
    model.feature_names = m.feature_names();
    model.condition_estimate = sol.condition;
    return model;
}

inline std::vector<double> predict_linear(const LinearModel& model, const DesignMatrix& m) {
    detail::require_features(model.feature_names, m);
    std::vector<double> out(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        double y = model.intercept;
        for (std::size_t j = 0; j < m.cols(); ++j) y += model.coefficients[j] * m(i, j);
        out[i] = y;
    }
    return out;
}

// --- polynomial expansion --------------------------------------------------------------

using Exponents = std::vector<int>;

inline constexpr int kMinDegree = 2;
inline constexpr int kMaxDegree = 5;

/// All exponent tuples over k variables with total degree 1..degree, in graded
/// lexicographic order: by total degree, then lexicographically descending
/// (x1², x1·x2, x2² for k = 2). The constant term is excluded.
inline std::vector<Exponents> monomial_terms(std::size_t k, int degree) {
    std::vector<Exponents> out;
    Exponents current(k, 0);
    // Fills positions pos..k-1 with exponents summing to `remaining`, first variable highest.
    auto fill = [&](auto&& self, std::size_t pos, int remaining) -> void {
        if (pos + 1 == k) {
            current[pos] = remaining;
            out.push_back(current);
            return;
        }
        for (int e = remaining; e >= 0; --e) {
            current[pos] = e;
            self(self, pos + 1, remaining - e);
        }
    };
    if (k == 0) return out;
    for (int d = 1; d <= degree; ++d) fill(fill, 0, d);
    return out;
}

inline double evaluate_monomial(std::span<const double> x, const Exponents& e) {
    double v = 1.0;
    for (std::size_t j = 0; j < e.size(); ++j)
        for (int p = 0; p < e[j]; ++p) v *= x[j];
    return v;
}

inline std::string monomial_name(const std::vector<std::string>& names, const Exponents& e) {
    std::string s;
    for (std::size_t j = 0; j < e.size(); ++j) {
        if (e[j] == 0) continue;
        if (!s.empty()) s += '*';
        s += names[j];
        if (e[j] > 1) s += '^' + std::to_string(e[j]);
    }
    return s.empty() ? "1" : s;
}

/// C(k + degree, degree) - 1 columns, ordered as monomial_terms().
inline DesignMatrix expand_polynomial(const DesignMatrix& m, int degree) {
    if (degree < kMinDegree || degree > kMaxDegree) throw DegreeOutOfRange(degree);
    const auto terms = monomial_terms(m.cols(), degree);
    std::vector<std::string> names;
    names.reserve(terms.size());
    for (const auto& t : terms) names.push_back(monomial_name(m.feature_names(), t));
    std::vector<double> values;
    values.reserve(m.rows() * terms.size());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        const auto row = m.row(i);
        for (const auto& t : terms) values.push_back(evaluate_monomial(row, t));
    }
    return DesignMatrix(m.rows(), std::move(names), std::move(values), m.target());
}

struct PolynomialModel {
    int degree = kMinDegree;
    /// terms[0] is the all-zero (intercept) tuple; coefficients align with terms.
    std::vector<Exponents> terms;
    std::vector<double> coefficients;
    std::vector<std::string> feature_names;
    double condition_estimate = 1.0;

    [[nodiscard]] bool condition_warning() const noexcept { return condition_estimate > kConditionWarningThreshold; }
    friend bool operator==(const PolynomialModel&, const PolynomialModel&) = default;
};

/// Same fit as fit_ols(expand_polynomial(m, degree)), repackaged with term exponents.
inline PolynomialModel fit_polynomial(const DesignMatrix& m, int degree) {
    const auto linear = fit_ols(expand_polynomial(m, degree));
    PolynomialModel model;
    model.degree = degree;
    model.terms.push_back(Exponents(m.cols(), 0));
    for (auto& t : monomial_terms(m.cols(), degree)) model.terms.push_back(std::move(t));
    model.coefficients.push_back(linear.intercept);
    model.coefficients.insert(model.coefficients.end(), linear.coefficients.begin(), linear.coefficients.end());
    model.feature_names = m.feature_names();
    model.condition_estimate = linear.condition_estimate;
    return model;
}

inline std::vector<double> predict_polynomial(const PolynomialModel& model, const DesignMatrix& m) {
    detail::require_features(model.feature_names, m);
    std::vector<double> out(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        const auto row = m.row(i);
        double y = model.coefficients[0];
        for (std::size_t t = 1; t < model.terms.size(); ++t)
            y += model.coefficients[t] * evaluate_monomial(row, model.terms[t]);
        out[i] = y;
    }
    return out;
}

// --- serialization ------------------------------------------------------------------------

inline constexpr int kModelSchemaVersion = 1;

inline nlohmann::json to_json(const LinearModel& m) {
    return {{"schema", "windcast.linear_model"},
            {"version", kModelSchemaVersion},
            {"feature_names", m.feature_names},
            {"intercept", m.intercept},
            {"coefficients", m.coefficients},
            {"condition_estimate", m.condition_estimate}};
}

inline nlohmann::json to_json(const PolynomialModel& m) {
    return {{"schema", "windcast.polynomial_model"},
            {"version", kModelSchemaVersion},
            {"degree", m.degree},
            {"feature_names", m.feature_names},
            {"terms", m.terms},
            {"coefficients", m.coefficients},
            {"condition_estimate", m.condition_estimate}};
}

namespace detail {
inline void require_schema(const nlohmann::json& j, const char* schema) {
    if (!j.contains("schema") || j.at("schema") != schema)
        throw DataError(std::string("expected a '") + schema + "' document");
    if (j.at("version").get<int>() != kModelSchemaVersion)
        throw DataError("unsupported model version " + j.at("version").dump());
}
} // namespace detail

inline LinearModel linear_model_from_json(const nlohmann::json& j) {
    detail::require_schema(j, "windcast.linear_model");
    LinearModel m;
    m.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    m.intercept = j.at("intercept").get<double>();
    m.coefficients = j.at("coefficients").get<std::vector<double>>();
    m.condition_estimate = j.at("condition_estimate").get<double>();
    if (m.coefficients.size() != m.feature_names.size())
        throw DataError("linear model: coefficient count does not match feature count");
    return m;
}

inline PolynomialModel polynomial_model_from_json(const nlohmann::json& j) {
    detail::require_schema(j, "windcast.polynomial_model");
    PolynomialModel m;
    m.degree = j.at("degree").get<int>();
    m.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    m.terms = j.at("terms").get<std::vector<Exponents>>();
    m.coefficients = j.at("coefficients").get<std::vector<double>>();
    m.condition_estimate = j.at("condition_estimate").get<double>();
    if (m.degree < kMinDegree || m.degree > kMaxDegree) throw DegreeOutOfRange(m.degree);
    if (m.terms.size() != m.coefficients.size()) throw DataError("polynomial model: term/coefficient count mismatch");
    for (const auto& t : m.terms) {
        int total = 0;
        for (int e : t) total += e;
        if (t.size() != m.feature_names.size() || total > m.degree)
            throw DataError("polynomial model: malformed term exponents");
    }
    auto sorted = m.terms;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw DataError("polynomial model: duplicate term");
    return m;
}

} // namespace windcast
