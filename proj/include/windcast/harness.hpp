#pragma once

// Experiment grid: models x feature sets x train fractions x degrees, each
// cell scored on its held-out split, plus plot-data emitters.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <numeric>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "windcast/ann.hpp"
#include "windcast/dataset.hpp"
#include "windcast/error.hpp"
#include "windcast/metrics.hpp"
#include "windcast/regression.hpp"

namespace windcast {

enum class ModelKind { Persistence, Linear, Polynomial, Ann };

inline constexpr ModelKind kAllModels[] = {ModelKind::Persistence, ModelKind::Linear, ModelKind::Polynomial,
                                           ModelKind::Ann};

inline std::string to_string(ModelKind m) {
    switch (m) {
    case ModelKind::Persistence: return "persistence";
    case ModelKind::Linear: return "linear";
    case ModelKind::Polynomial: return "polynomial";
    case ModelKind::Ann: return "ann";
    }
    return "?";
}

inline std::optional<ModelKind> parse_model_kind(std::string_view s) {
    for (auto m : kAllModels)
        if (s == to_string(m)) return m;
    if (s == "poly") return ModelKind::Polynomial;
    return std::nullopt;
}

// --- persistence baseline ------------------------------------------------------------

/// Predicts power[i] as power[i - horizon] on the chronological series.
/// Returns (actual, predicted) for i = horizon .. n-1.
inline std::pair<std::vector<double>, std::vector<double>> persistence_forecast(const Dataset& d,
                                                                                std::size_t horizon_steps) {
    if (horizon_steps < 1) throw InvalidArgument("horizon_steps must be >= 1");
    if (d.size() <= horizon_steps)
        throw SeriesTooShort(std::to_string(d.size()) + " rows for horizon " + std::to_string(horizon_steps));
    std::vector<double> actual, predicted;
    actual.reserve(d.size() - horizon_steps);
    predicted.reserve(d.size() - horizon_steps);
    for (std::size_t i = horizon_steps; i < d.size(); ++i) {
        actual.push_back(d[i].power);
        predicted.push_back(d[i - horizon_steps].power);
    }
    return {std::move(actual), std::move(predicted)};
}

// --- fitted models --------------------------------------------------------------------

using FittedModel = std::variant<LinearModel, PolynomialModel, MlpModel>;

inline std::vector<double> predict(const FittedModel& model, const DesignMatrix& m) {
    return std::visit(
        [&](const auto& fitted) -> std::vector<double> {
            using T = std::decay_t<decltype(fitted)>;
            if constexpr (std::is_same_v<T, LinearModel>) return predict_linear(fitted, m);
            else if constexpr (std::is_same_v<T, PolynomialModel>) return predict_polynomial(fitted, m);
            else {
                if (m.cols() != fitted.input_dim()) throw FeatureMismatch("network input width differs");
                return predict_ann(fitted, m);
            }
        },
        model);
}

inline nlohmann::json to_json(const FittedModel& model) {
    return std::visit([](const auto& m) { return to_json(m); }, model);
}

inline double out_of_bounds_fraction(std::span<const double> predicted, double rated_power) {
    if (predicted.empty()) return 0.0;
    const auto outside =
        std::count_if(predicted.begin(), predicted.end(), [&](double p) { return p < 0.0 || p > rated_power; });
    return static_cast<double>(outside) / static_cast<double>(predicted.size());
}

/// One configuration of the grid.
struct Experiment {
    ModelKind model = ModelKind::Linear;
    FeatureSet features = FeatureSet::SpeedOnly;
    double train_fraction = 0.85;
    int degree = 0;          // polynomial only
    std::uint64_t seed = 42; // split seed
    TrainConfig ann{};
    HiddenWidths hidden = kDefaultHiddenWidths;
    HiddenActivations activations = kDefaultHiddenActivations;
};

struct FitOutcome {
    FittedModel model;
    DesignMatrix train;
    DesignMatrix test;
    std::vector<double> test_predictions;
    EvalReport train_report;
    EvalReport test_report;
    double out_of_bounds = 0.0;
    std::optional<TrainHistory> history;
};

/// Split, project features, fit, predict on the held-out rows and score.
/// Not valid for the persistence baseline, which has no fitted model.
inline FitOutcome run_experiment(const Dataset& d, const Experiment& e) {
    if (e.model == ModelKind::Persistence) throw InvalidArgument("persistence has no fitted model");
    const auto [train_set, test_set] = split(d, SplitSpec{e.train_fraction, e.seed});
    auto train = select_features(train_set, e.features);
    auto test = select_features(test_set, e.features);

    std::optional<TrainHistory> history;
    FittedModel model = [&]() -> FittedModel {
        switch (e.model) {
        case ModelKind::Linear: return fit_ols(train);
        case ModelKind::Polynomial: return fit_polynomial(train, e.degree);
        case ModelKind::Ann: {
            auto net = init_network(train.cols(), e.hidden, derive_seed(e.ann.seed, 0), e.activations);
            net.input_scaler = fit_scaler(train);
            net.target_scale = d.rated_power();
            auto trained = windcast::train(net, train, e.ann);
            history = std::move(trained.history);
            return std::move(trained.model);
        }
        case ModelKind::Persistence: break;
        }
        throw InvalidArgument("unsupported model");
    }();

    const auto train_pred = predict(model, train);
    auto test_pred = predict(model, test);
    FitOutcome out{std::move(model),
                   std::move(train),
                   std::move(test),
                   {},
                   {},
                   {},
                   out_of_bounds_fraction(test_pred, d.rated_power()),
                   std::move(history)};
    out.train_report = evaluate(out.train.target(), train_pred);
    out.test_report = evaluate(out.test.target(), test_pred);
    out.test_predictions = std::move(test_pred);
    return out;
}

// --- sweep -------------------------------------------------------------------------------

struct SweepConfig {
    std::vector<double> train_fractions{0.95, 0.90, 0.85, 0.80, 0.75, 0.70};
    std::vector<FeatureSet> feature_sets{std::begin(kAllFeatureSets), std::end(kAllFeatureSets)};
    std::vector<int> degrees{2, 3, 4, 5};
    std::vector<ModelKind> models{std::begin(kAllModels), std::end(kAllModels)};
    std::uint64_t seed = 42;
    TrainConfig ann_train{};
    HiddenWidths hidden = kDefaultHiddenWidths;
    std::size_t threads = 1; // output order does not depend on this

    void validate() const {
        for (double f : train_fractions) SplitSpec{f, seed}.validate();
        for (int deg : degrees)
            if (deg < kMinDegree || deg > kMaxDegree) throw DegreeOutOfRange(deg);
        ann_train.validate();
        if (threads < 1) throw InvalidArgument("threads must be >= 1");
    }
};

struct SweepRow {
    ModelKind model = ModelKind::Linear;
    std::optional<FeatureSet> feature_set; // absent for persistence
    double train_fraction = 0.0;
    std::optional<int> degree;             // polynomial only
    bool ok = true;
    std::string error;                     // set when !ok
    EvalReport test{};
    std::optional<double> train_r_squared;
    double out_of_bounds_fraction = 0.0;
    std::optional<double> condition_estimate; // regression models only
};

/// The grid in output order, before anything is fitted.
inline std::vector<SweepRow> plan_sweep(const SweepConfig& cfg) {
    std::vector<SweepRow> rows;
    for (auto model : cfg.models) {
        if (model == ModelKind::Persistence) {
            for (double f : cfg.train_fractions) rows.push_back({.model = model, .train_fraction = f});
            continue;
        }
        for (auto fs : cfg.feature_sets)
            for (double f : cfg.train_fractions) {
                if (model == ModelKind::Polynomial) {
                    for (int deg : cfg.degrees)
                        rows.push_back({.model = model, .feature_set = fs, .train_fraction = f, .degree = deg});
                } else {
                    rows.push_back({.model = model, .feature_set = fs, .train_fraction = f});
                }
            }
    }
    return rows;
}

/// Scores one planned row in isolation. Failures are recorded on the row.
inline SweepRow run_sweep_row(const Dataset& d, const SweepConfig& cfg, SweepRow row) {
    try {
        if (row.model == ModelKind::Persistence) {
            // Horizon-1 persistence scored on the same held-out timestamps as the fitted models.
            const auto parts = split_indices(d.size(), SplitSpec{row.train_fraction, cfg.seed});
            std::vector<double> actual, predicted;
            for (auto i : parts.test) {
                if (i == 0) continue;
                actual.push_back(d[i].power);
                predicted.push_back(d[i - 1].power);
            }
            row.test = evaluate(actual, predicted);
            row.out_of_bounds_fraction = out_of_bounds_fraction(predicted, d.rated_power());
            return row;
        }
        Experiment e;
        e.model = row.model;
        e.features = *row.feature_set;
        e.train_fraction = row.train_fraction;
        e.degree = row.degree.value_or(0);
        e.seed = cfg.seed;
        e.ann = cfg.ann_train;
        e.hidden = cfg.hidden;
        const auto outcome = run_experiment(d, e);
        row.test = outcome.test_report;
        row.train_r_squared = outcome.train_report.r_squared;
        row.out_of_bounds_fraction = outcome.out_of_bounds;
        if (const auto* lm = std::get_if<LinearModel>(&outcome.model)) row.condition_estimate = lm->condition_estimate;
        if (const auto* pm = std::get_if<PolynomialModel>(&outcome.model))
            row.condition_estimate = pm->condition_estimate;
    } catch (const Error& ex) {
        row.ok = false;
        row.error = ex.what();
    }
    return row;
}

inline std::vector<SweepRow> run_sweep(const Dataset& d, const SweepConfig& cfg) {
    cfg.validate();
    auto rows = plan_sweep(cfg);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < rows.size(); i = next++) rows[i] = run_sweep_row(d, cfg, rows[i]);
    };
    const std::size_t n_threads = std::min(cfg.threads, std::max<std::size_t>(rows.size(), 1));
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    }
    return rows;
}

// --- report files ------------------------------------------------------------------------

inline constexpr int kSweepSchemaVersion = 1;

namespace detail {
inline std::string fraction_text(double f) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%.2f", f);
    return buf;
}
} // namespace detail

inline void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
    out << "# schema: windcast.sweep v" << kSweepSchemaVersion << '\n';
    out << "model,feature_set,train_fraction,test_fraction,degree,status,n_test,mae,rmse,r_squared,"
           "train_r_squared,out_of_bounds_fraction,condition_estimate,error\n";
    for (const auto& r : rows) {
        out << to_string(r.model) << ',' << (r.feature_set ? to_string(*r.feature_set) : "") << ','
            << detail::fraction_text(r.train_fraction) << ',' << detail::fraction_text(1.0 - r.train_fraction) << ','
            << (r.degree ? std::to_string(*r.degree) : "") << ',' << (r.ok ? "ok" : "failed") << ',';
        if (r.ok) {
            out << r.test.n_samples << ',' << format_double(r.test.mae) << ',' << format_double(r.test.rmse) << ','
                << format_double(r.test.r_squared) << ','
                << (r.train_r_squared ? format_double(*r.train_r_squared) : "") << ','
                << format_double(r.out_of_bounds_fraction) << ','
                << (r.condition_estimate ? format_double(*r.condition_estimate) : "") << ',';
        } else {
            out << ",,,,,,,";
        }
        std::string msg = r.error;
        std::replace(msg.begin(), msg.end(), ',', ';');
        std::replace(msg.begin(), msg.end(), '\n', ' ');
        out << msg << '\n';
    }
}

inline nlohmann::json sweep_to_json(const std::vector<SweepRow>& rows) {
    auto arr = nlohmann::json::array();
    for (const auto& r : rows) {
        nlohmann::json j{{"model", to_string(r.model)},
                         {"feature_set", r.feature_set ? nlohmann::json(to_string(*r.feature_set)) : nlohmann::json()},
                         {"train_fraction", detail::fraction_text(r.train_fraction)},
                         {"degree", r.degree ? nlohmann::json(*r.degree) : nlohmann::json()},
                         {"status", r.ok ? "ok" : "failed"}};
        if (r.ok) {
            j["report"] = {{"mae", r.test.mae},
                           {"rmse", r.test.rmse},
                           {"r_squared", r.test.r_squared},
                           {"n_samples", r.test.n_samples}};
            j["train_r_squared"] = r.train_r_squared ? nlohmann::json(*r.train_r_squared) : nlohmann::json();
            j["out_of_bounds_fraction"] = r.out_of_bounds_fraction;
            j["condition_estimate"] = r.condition_estimate ? nlohmann::json(*r.condition_estimate) : nlohmann::json();
        } else {
            j["error"] = r.error;
        }
        arr.push_back(std::move(j));
    }
    return {{"schema", "windcast.sweep"}, {"version", kSweepSchemaVersion}, {"rows", std::move(arr)}};
}

// --- plot data ------------------------------------------------------------------------------

/// (wind_speed, actual_power, predicted_power) sorted by speed. Column 0 of `test` is wind speed.
inline void emit_power_curve_points(std::ostream& out, const FittedModel& model, const DesignMatrix& test) {
    const auto pred = predict(model, test);
    std::vector<std::size_t> order(test.rows());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return test(a, 0) < test(b, 0); });
    out << "wind_speed,actual_power,predicted_power\n";
    for (auto i : order)
        out << format_double(test(i, 0)) << ',' << format_double(test.target()[i]) << ',' << format_double(pred[i])
            << '\n';
}

/// (actual_power, predicted_power) in test-row order.
inline void emit_pred_vs_actual(std::ostream& out, const FittedModel& model, const DesignMatrix& test) {
    const auto pred = predict(model, test);
    out << "actual_power,predicted_power\n";
    for (std::size_t i = 0; i < test.rows(); ++i)
        out << format_double(test.target()[i]) << ',' << format_double(pred[i]) << '\n';
}

} // namespace windcast
