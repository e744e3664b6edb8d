#pragma once

// Feed-forward network with four hidden layers, trained by mini-batch
// backpropagation on min-max-scaled inputs and rated-power-scaled targets.
//
// Each neuron computes act(w·x + b). Default widths are (64, 32, 16, 8) with
// ReLU, ReLU, Sigmoid, Sigmoid on the hidden layers and an identity output.
//
// Weights are initialised He-uniform: U(-sqrt(6 / fan_in), +sqrt(6 / fan_in)),
// drawn layer by layer, row by row from one seeded Rng. Biases start at zero.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <functional>
#include <limits>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "windcast/dataset.hpp"
#include "windcast/error.hpp"
#include "windcast/numeric.hpp"
#include "windcast/random.hpp"

namespace windcast {

enum class Activation { Identity, ReLU, Sigmoid };

inline std::string to_string(Activation a) {
    switch (a) {
    case Activation::Identity: return "identity";
    case Activation::ReLU: return "relu";
    case Activation::Sigmoid: return "sigmoid";
    }
    return "?";
}

inline Activation parse_activation(const std::string& s) {
    if (s == "identity") return Activation::Identity;
    if (s == "relu") return Activation::ReLU;
    if (s == "sigmoid") return Activation::Sigmoid;
    throw InvalidArchitecture("unknown activation '" + s + "'");
}

template <std::floating_point T>
T activate(Activation a, T z) {
    switch (a) {
    case Activation::ReLU: return z > T(0) ? z : T(0);
    case Activation::Sigmoid: return T(1) / (T(1) + std::exp(-z));
    case Activation::Identity: break;
    }
    return z;
}

/// Derivative expressed through the pre-activation z and the output a = act(z).
inline double activate_derivative(Activation act, double z, double a) {
    switch (act) {
    case Activation::ReLU: return z > 0.0 ? 1.0 : 0.0;
    case Activation::Sigmoid: return a * (1.0 - a);
    case Activation::Identity: break;
    }
    return 1.0;
}

struct DenseLayer {
    std::size_t inputs = 0;
    std::size_t outputs = 0;
    Activation activation = Activation::Identity;
    std::vector<double> weights; // outputs x inputs, row-major
    std::vector<double> biases;  // outputs

    friend bool operator==(const DenseLayer&, const DenseLayer&) = default;
};

inline constexpr std::size_t kHiddenLayers = 4;
using HiddenWidths = std::array<std::size_t, kHiddenLayers>;
using HiddenActivations = std::array<Activation, kHiddenLayers>;

inline constexpr HiddenWidths kDefaultHiddenWidths{64, 32, 16, 8};
inline constexpr HiddenActivations kDefaultHiddenActivations{Activation::ReLU, Activation::ReLU,
                                                             Activation::Sigmoid, Activation::Sigmoid};

struct MlpModel {
    std::vector<DenseLayer> layers; // 4 hidden + 1 output
    MinMaxScaler input_scaler;
    double target_scale = 1.0; // kW per unit of network output

    [[nodiscard]] std::size_t input_dim() const { return layers.empty() ? 0 : layers.front().inputs; }

    [[nodiscard]] std::vector<std::size_t> layer_sizes() const {
        std::vector<std::size_t> s{input_dim()};
        for (const auto& l : layers) s.push_back(l.outputs);
        return s;
    }

    [[nodiscard]] std::size_t parameter_count() const {
        std::size_t n = 0;
        for (const auto& l : layers) n += l.weights.size() + l.biases.size();
        return n;
    }

    /// Throws InvalidArchitecture when shapes, activations or parameters break the model invariants.
    void validate() const {
        if (layers.size() != kHiddenLayers + 1)
            throw InvalidArchitecture("expected " + std::to_string(kHiddenLayers) + " hidden layers plus output");
        for (std::size_t l = 0; l < layers.size(); ++l) {
            const auto& L = layers[l];
            if (L.inputs == 0 || L.outputs == 0) throw InvalidArchitecture("zero-width layer");
            if (l > 0 && L.inputs != layers[l - 1].outputs) throw InvalidArchitecture("layer shapes do not chain");
            if (L.weights.size() != L.inputs * L.outputs || L.biases.size() != L.outputs)
                throw InvalidArchitecture("parameter tensor has the wrong size");
            for (double w : L.weights)
                if (!std::isfinite(w)) throw InvalidArchitecture("non-finite weight");
            for (double b : L.biases)
                if (!std::isfinite(b)) throw InvalidArchitecture("non-finite bias");
        }
        if (layers.back().outputs != 1 || layers.back().activation != Activation::Identity)
            throw InvalidArchitecture("output layer must be a single identity unit");
        if (input_scaler.size() != input_dim()) throw InvalidArchitecture("input scaler width mismatch");
        if (!(target_scale > 0.0) || !std::isfinite(target_scale))
            throw InvalidArchitecture("target_scale must be positive");
    }

    friend bool operator==(const MlpModel&, const MlpModel&) = default;
};

inline MlpModel init_network(std::size_t input_dim, const HiddenWidths& hidden, std::uint64_t seed,
                             const HiddenActivations& activations = kDefaultHiddenActivations) {
    if (input_dim < 1 || input_dim > 3) throw InvalidArchitecture("input dimension must be 1, 2 or 3");
    for (auto w : hidden)
        if (w < 1) throw InvalidArchitecture("hidden widths must be >= 1");
    Rng rng(seed);
    MlpModel m;
    std::size_t fan_in = input_dim;
    for (std::size_t l = 0; l <= kHiddenLayers; ++l) {
        DenseLayer layer;
        layer.inputs = fan_in;
        layer.outputs = l < kHiddenLayers ? hidden[l] : 1;
        layer.activation = l < kHiddenLayers ? activations[l] : Activation::Identity;
        const double limit = std::sqrt(6.0 / static_cast<double>(fan_in));
        layer.weights.resize(layer.inputs * layer.outputs);
        for (auto& w : layer.weights) w = rng.uniform(-limit, limit);
        layer.biases.assign(layer.outputs, 0.0);
        fan_in = layer.outputs;
        m.layers.push_back(std::move(layer));
    }
    m.input_scaler = identity_scaler(input_dim);
    m.target_scale = 1.0;
    return m;
}

/// Per-layer activations for one already-scaled input; trace[0] is the input itself.
inline std::vector<std::vector<double>> forward_trace(const MlpModel& m, std::span<const double> scaled_x) {
    if (scaled_x.size() != m.input_dim()) throw DimensionMismatch(m.input_dim(), scaled_x.size());
    std::vector<std::vector<double>> trace;
    trace.emplace_back(scaled_x.begin(), scaled_x.end());
    for (const auto& L : m.layers) {
        const auto& in = trace.back();
        std::vector<double> out(L.outputs);
        for (std::size_t o = 0; o < L.outputs; ++o) {
            const double* w = L.weights.data() + o * L.inputs;
            double z = L.biases[o];
            for (std::size_t i = 0; i < L.inputs; ++i) z += w[i] * in[i];
            out[o] = activate(L.activation, z);
        }
        trace.push_back(std::move(out));
    }
    return trace;
}

/// Network output for a raw feature vector, in kW.
inline double forward(const MlpModel& m, std::span<const double> x) {
    if (x.size() != m.input_dim()) throw DimensionMismatch(m.input_dim(), x.size());
    std::vector<double> scaled(x.size());
    m.input_scaler.apply_row(x, scaled);
    return forward_trace(m, scaled).back()[0] * m.target_scale;
}

inline std::vector<double> predict_ann(const MlpModel& m, const DesignMatrix& d) {
    if (d.cols() != m.input_dim()) throw DimensionMismatch(m.input_dim(), d.cols());
    std::vector<double> out(d.rows());
    for (std::size_t i = 0; i < d.rows(); ++i) out[i] = forward(m, d.row(i));
    return out;
}

// --- training --------------------------------------------------------------------

enum class Optimizer { SGD, Adam };

struct TrainConfig {
    std::size_t epochs = 20;
    std::size_t batch_size = 32;
    double learning_rate = 1e-3;
    std::uint64_t seed = 42;
    Optimizer optimizer = Optimizer::Adam;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;

    void validate() const {
        if (epochs < 1) throw InvalidArgument("epochs must be >= 1");
        if (batch_size < 1) throw InvalidArgument("batch_size must be >= 1");
        if (!(learning_rate > 0.0) || !std::isfinite(learning_rate))
            throw InvalidArgument("learning_rate must be > 0");
    }
};

struct TrainHistory {
    std::vector<double> loss;            // per-epoch mean scaled MSE
    std::vector<double> epoch_seconds;   // wall time per epoch
};

/// Gradient of the loss w.r.t. every parameter, flattened layer by layer (weights, then biases).
using ParameterVector = std::vector<double>;

namespace detail {

/// Reusable per-sample buffers for forward and backward passes.
class Backprop {
public:
    explicit Backprop(const MlpModel& m) {
        z_.resize(m.layers.size());
        a_.resize(m.layers.size() + 1);
        delta_.resize(m.layers.size());
        a_[0].resize(m.input_dim());
        for (std::size_t l = 0; l < m.layers.size(); ++l) {
            z_[l].resize(m.layers[l].outputs);
            a_[l + 1].resize(m.layers[l].outputs);
            delta_[l].resize(m.layers[l].outputs);
        }
    }

    /// Adds d(weight * (y - t)²)/dθ into grad and returns the squared error.
    double accumulate(const MlpModel& m, std::span<const double> x, double target, double weight,
                      std::span<double> grad) {
        std::copy(x.begin(), x.end(), a_[0].begin());
        const std::size_t nl = m.layers.size();
        for (std::size_t l = 0; l < nl; ++l) {
            const auto& L = m.layers[l];
            const double* in = a_[l].data();
            for (std::size_t o = 0; o < L.outputs; ++o) {
                const double* w = L.weights.data() + o * L.inputs;
                double z = L.biases[o];
                for (std::size_t i = 0; i < L.inputs; ++i) z += w[i] * in[i];
                z_[l][o] = z;
                a_[l + 1][o] = activate(L.activation, z);
            }
        }
        const double err = a_[nl][0] - target;

        // Parameter offsets of each layer within the flat vector.
        std::size_t offset = m.parameter_count();
        double upstream = 2.0 * weight * err;
        for (std::size_t l = nl; l-- > 0;) {
            const auto& L = m.layers[l];
            offset -= L.weights.size() + L.biases.size();
            auto& delta = delta_[l];
            if (l == nl - 1) {
                delta[0] = upstream * activate_derivative(L.activation, z_[l][0], a_[l + 1][0]);
            } else {
                for (std::size_t o = 0; o < L.outputs; ++o)
                    delta[o] *= activate_derivative(L.activation, z_[l][o], a_[l + 1][o]);
            }
            double* gw = grad.data() + offset;
            double* gb = gw + L.weights.size();
            const double* in = a_[l].data();
            for (std::size_t o = 0; o < L.outputs; ++o) {
                const double d = delta[o];
                double* row = gw + o * L.inputs;
                for (std::size_t i = 0; i < L.inputs; ++i) row[i] += d * in[i];
                gb[o] += d;
            }
            if (l > 0) {
                auto& prev = delta_[l - 1];
                std::fill(prev.begin(), prev.end(), 0.0);
                for (std::size_t o = 0; o < L.outputs; ++o) {
                    const double d = delta[o];
                    const double* w = L.weights.data() + o * L.inputs;
                    for (std::size_t i = 0; i < L.inputs; ++i) prev[i] += w[i] * d;
                }
            }
        }
        return err * err;
    }

private:
    std::vector<std::vector<double>> z_, a_, delta_;
};

inline std::vector<double> scaled_inputs(const MlpModel& m, const DesignMatrix& d) {
    if (d.cols() != m.input_dim()) throw DimensionMismatch(m.input_dim(), d.cols());
    std::vector<double> out(d.values().size());
    for (std::size_t i = 0; i < d.rows(); ++i)
        m.input_scaler.apply_row(d.row(i), std::span<double>(out.data() + i * d.cols(), d.cols()));
    return out;
}

inline double& parameter_at(MlpModel& m, std::size_t flat) {
    for (auto& L : m.layers) {
        if (flat < L.weights.size()) return L.weights[flat];
        flat -= L.weights.size();
        if (flat < L.biases.size()) return L.biases[flat];
        flat -= L.biases.size();
    }
    throw InvalidArgument("parameter index out of range");
}

} // namespace detail

inline ParameterVector flatten_parameters(const MlpModel& m) {
    ParameterVector p;
    p.reserve(m.parameter_count());
    for (const auto& L : m.layers) {
        p.insert(p.end(), L.weights.begin(), L.weights.end());
        p.insert(p.end(), L.biases.begin(), L.biases.end());
    }
    return p;
}

inline void assign_parameters(MlpModel& m, std::span<const double> p) {
    if (p.size() != m.parameter_count()) throw DimensionMismatch(m.parameter_count(), p.size());
    std::size_t k = 0;
    for (auto& L : m.layers) {
        for (auto& w : L.weights) w = p[k++];
        for (auto& b : L.biases) b = p[k++];
    }
}

/// Mean squared error on scaled targets (power / target_scale) over the sample.
inline double scaled_loss(const MlpModel& m, const DesignMatrix& sample) {
    const auto x = detail::scaled_inputs(m, sample);
    const std::size_t k = sample.cols();
    return pairwise_sum(sample.rows(), [&](std::size_t i) {
               const auto y = forward_trace(m, std::span<const double>(x.data() + i * k, k)).back()[0];
               const double e = y - sample.target()[i] / m.target_scale;
               return e * e;
           }) /
           static_cast<double>(sample.rows());
}

/// Analytic gradient of scaled_loss by backpropagation.
inline ParameterVector loss_gradient(const MlpModel& m, const DesignMatrix& sample) {
    if (sample.rows() == 0) throw EmptyInput("empty sample");
    const auto x = detail::scaled_inputs(m, sample);
    const std::size_t k = sample.cols();
    ParameterVector grad(m.parameter_count(), 0.0);
    detail::Backprop bp(m);
    const double w = 1.0 / static_cast<double>(sample.rows());
    for (std::size_t i = 0; i < sample.rows(); ++i)
        bp.accumulate(m, std::span<const double>(x.data() + i * k, k), sample.target()[i] / m.target_scale, w, grad);
    return grad;
}

using GradientFunction = std::function<ParameterVector(const MlpModel&, const DesignMatrix&)>;

namespace detail {
// scaled_loss evaluated in long double. Central differences cancel all but a
// few digits of the loss, so a double forward pass leaves ~eps·L/h ≈ 1e-11 of
// noise in the numeric gradient — the same size as the smallest true gradients.
inline long double extended_scaled_loss(const MlpModel& m, const DesignMatrix& sample) {
    const auto x = scaled_inputs(m, sample);
    const std::size_t k = sample.cols();
    long double total = 0.0L;
    std::vector<long double> in, out;
    for (std::size_t i = 0; i < sample.rows(); ++i) {
        in.assign(x.begin() + static_cast<std::ptrdiff_t>(i * k), x.begin() + static_cast<std::ptrdiff_t>((i + 1) * k));
        for (const auto& L : m.layers) {
            out.assign(L.outputs, 0.0L);
            for (std::size_t o = 0; o < L.outputs; ++o) {
                const double* w = L.weights.data() + o * L.inputs;
                long double z = L.biases[o];
                for (std::size_t j = 0; j < L.inputs; ++j) z += static_cast<long double>(w[j]) * in[j];
                out[o] = activate(L.activation, z);
            }
            in.swap(out);
        }
        const long double e = in[0] - static_cast<long double>(sample.target()[i]) / m.target_scale;
        total += e * e;
    }
    return total / static_cast<long double>(sample.rows());
}
} // namespace detail

/// Worst relative disagreement between an analytic gradient and central
/// differences (step 1e-5, loss evaluated in long double) over every
/// parameter. Relative error is |a - n| / max(|a|, |n|, 1e-8).
inline double gradient_check(const MlpModel& model, const DesignMatrix& sample,
                             const GradientFunction& gradient = loss_gradient) {
    if (sample.rows() == 0 || sample.rows() > 32)
        throw InvalidArgument("gradient_check expects between 1 and 32 rows");
    constexpr double step = 1e-5;
    constexpr double floor = 1e-8;
    const auto analytic = gradient(model, sample);
    if (analytic.size() != model.parameter_count()) throw DimensionMismatch(model.parameter_count(), analytic.size());
    MlpModel probe = model;
    double worst = 0.0;
    for (std::size_t p = 0; p < analytic.size(); ++p) {
        double& theta = detail::parameter_at(probe, p);
        const double original = theta;
        const double hi = original + step, lo = original - step;
        theta = hi;
        const long double up = detail::extended_scaled_loss(probe, sample);
        theta = lo;
        const long double down = detail::extended_scaled_loss(probe, sample);
        theta = original;
        // Divide by the representable step actually taken, not the nominal one.
        const double numeric =
            static_cast<double>((up - down) / (static_cast<long double>(hi) - static_cast<long double>(lo)));
        const double denom = std::max({std::abs(analytic[p]), std::abs(numeric), floor});
        const double rel = std::abs(analytic[p] - numeric) / denom;
        if (!std::isfinite(rel)) return std::numeric_limits<double>::infinity();
        worst = std::max(worst, rel);
    }
    return worst;
}

struct TrainResult {
    MlpModel model;
    TrainHistory history;
};

/// Mini-batch training. The input model's scaler and target_scale define the
/// scaled problem; the caller fits the scaler on training rows only.
/// Deterministic given (model, data, cfg).
inline TrainResult train(const MlpModel& initial, const DesignMatrix& data, const TrainConfig& cfg) {
    cfg.validate();
    initial.validate();
    if (data.cols() != initial.input_dim()) throw DimensionMismatch(initial.input_dim(), data.cols());
    if (data.rows() < cfg.batch_size)
        throw TooFewRows(std::to_string(data.rows()) + " rows for batch size " + std::to_string(cfg.batch_size));

    TrainResult result{initial, {}};
    MlpModel& m = result.model;
    const std::size_t n = data.rows(), k = data.cols();
    const auto x = detail::scaled_inputs(m, data);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = data.target()[i] / m.target_scale;

    const std::size_t np = m.parameter_count();
    ParameterVector params = flatten_parameters(m);
    ParameterVector grad(np), moment1(np, 0.0), moment2(np, 0.0);
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    Rng rng(cfg.seed);
    detail::Backprop bp(m);
    double beta1_t = 1.0, beta2_t = 1.0;

    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        const auto t0 = std::chrono::steady_clock::now();
        rng.shuffle(std::span<std::size_t>(order));
        double epoch_sse = 0.0;
        for (std::size_t start = 0; start < n; start += cfg.batch_size) {
            const std::size_t stop = std::min(n, start + cfg.batch_size);
            const double w = 1.0 / static_cast<double>(stop - start);
            std::fill(grad.begin(), grad.end(), 0.0);
            double batch_sse = 0.0;
            for (std::size_t b = start; b < stop; ++b) {
                const std::size_t i = order[b];
                batch_sse += bp.accumulate(m, std::span<const double>(x.data() + i * k, k), y[i], w, grad);
            }
            if (!std::isfinite(batch_sse)) throw NonFiniteLoss(epoch + 1, cfg.learning_rate);
            epoch_sse += batch_sse;

            if (cfg.optimizer == Optimizer::SGD) {
                for (std::size_t p = 0; p < np; ++p) params[p] -= cfg.learning_rate * grad[p];
            } else {
                beta1_t *= cfg.beta1;
                beta2_t *= cfg.beta2;
                const double c1 = 1.0 / (1.0 - beta1_t), c2 = 1.0 / (1.0 - beta2_t);
                for (std::size_t p = 0; p < np; ++p) {
                    moment1[p] = cfg.beta1 * moment1[p] + (1.0 - cfg.beta1) * grad[p];
                    moment2[p] = cfg.beta2 * moment2[p] + (1.0 - cfg.beta2) * grad[p] * grad[p];
                    params[p] -= cfg.learning_rate * (moment1[p] * c1) / (std::sqrt(moment2[p] * c2) + cfg.epsilon);
                }
            }
            assign_parameters(m, params);
        }
        const double mean_loss = epoch_sse / static_cast<double>(n);
        if (!std::isfinite(mean_loss)) throw NonFiniteLoss(epoch + 1, cfg.learning_rate);
        result.history.loss.push_back(mean_loss);
        result.history.epoch_seconds.push_back(
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }
    for (double p : params)
        if (!std::isfinite(p)) throw NonFiniteLoss(cfg.epochs, cfg.learning_rate);
    return result;
}

// --- serialization -------------------------------------------------------------------

inline nlohmann::json to_json(const MlpModel& m) {
    std::vector<std::string> acts;
    for (const auto& L : m.layers) acts.push_back(to_string(L.activation));
    return {{"schema", "windcast.mlp_model"},
            {"version", 1},
            {"layer_sizes", m.layer_sizes()},
            {"activations", acts},
            {"parameters", flatten_parameters(m)},
            {"input_scaler", {{"min", m.input_scaler.min}, {"max", m.input_scaler.max}}},
            {"target_scale", m.target_scale}};
}

inline MlpModel mlp_model_from_json(const nlohmann::json& j) {
    if (!j.contains("schema") || j.at("schema") != "windcast.mlp_model")
        throw DataError("expected a 'windcast.mlp_model' document");
    if (j.at("version").get<int>() != 1) throw DataError("unsupported model version " + j.at("version").dump());
    const auto sizes = j.at("layer_sizes").get<std::vector<std::size_t>>();
    const auto acts = j.at("activations").get<std::vector<std::string>>();
    if (sizes.size() < 2 || acts.size() != sizes.size() - 1) throw InvalidArchitecture("layer/activation count");
    MlpModel m;
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
        DenseLayer L;
        L.inputs = sizes[l];
        L.outputs = sizes[l + 1];
        L.activation = parse_activation(acts[l]);
        L.weights.assign(L.inputs * L.outputs, 0.0);
        L.biases.assign(L.outputs, 0.0);
        m.layers.push_back(std::move(L));
    }
    assign_parameters(m, j.at("parameters").get<std::vector<double>>());
    m.input_scaler.min = j.at("input_scaler").at("min").get<std::vector<double>>();
    m.input_scaler.max = j.at("input_scaler").at("max").get<std::vector<double>>();
    m.target_scale = j.at("target_scale").get<double>();
    m.validate();
    return m;
}

inline void write_history_csv(std::ostream& out, const TrainHistory& h) {
    out << "epoch,loss\n";
    for (std::size_t e = 0; e < h.loss.size(); ++e) out << (e + 1) << ',' << format_double(h.loss[e]) << '\n';
}

} // namespace windcast
