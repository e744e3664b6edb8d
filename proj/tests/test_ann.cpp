#include <cmath>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "windcast/ann.hpp"
#include "windcast/dataset.hpp"
#include "windcast/random.hpp"

using namespace windcast;

namespace {

DesignMatrix synthetic_sample(std::size_t rows, std::size_t dim, std::uint64_t seed) {
    SyntheticConfig c;
    c.n_samples = rows;
    c.seed = seed;
    const FeatureSet sets[] = {FeatureSet::SpeedOnly, FeatureSet::SpeedDirection,
                               FeatureSet::SpeedDirectionTemperature};
    return select_features(generate_synthetic(c), sets[dim - 1]);
}

// Network ready for the scaled problem the way the harness prepares it.
MlpModel prepared_network(const DesignMatrix& d, std::uint64_t seed) {
    auto m = init_network(d.cols(), kDefaultHiddenWidths, seed);
    m.input_scaler = fit_scaler(d);
    m.target_scale = 2000.0;
    return m;
}

DesignMatrix head(const DesignMatrix& d, std::size_t rows) {
    std::vector<double> v(d.values().begin(), d.values().begin() + static_cast<std::ptrdiff_t>(rows * d.cols()));
    std::vector<double> y(d.target().begin(), d.target().begin() + static_cast<std::ptrdiff_t>(rows));
    return DesignMatrix(rows, d.feature_names(), std::move(v), std::move(y));
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

} // namespace

TEST(Activation, Values) {
    EXPECT_EQ(activate(Activation::Sigmoid, 0.0), 0.5);
    EXPECT_EQ(activate(Activation::ReLU, -3.0), 0.0);
    EXPECT_EQ(activate(Activation::ReLU, 2.5), 2.5);
    EXPECT_EQ(activate(Activation::Identity, -2.5), -2.5);
    EXPECT_EQ(parse_activation(to_string(Activation::Sigmoid)), Activation::Sigmoid);
    EXPECT_THROW(parse_activation("tanh"), InvalidArchitecture);
}

TEST(Init, ShapesAndZeroBiases) {
    const auto m = init_network(3, kDefaultHiddenWidths, 7);
    ASSERT_EQ(m.layers.size(), 5u);
    EXPECT_EQ(m.layer_sizes(), (std::vector<std::size_t>{3, 64, 32, 16, 8, 1}));
    const std::size_t rows[] = {64, 32, 16, 8, 1}, cols[] = {3, 64, 32, 16, 8};
    for (std::size_t l = 0; l < 5; ++l) {
        EXPECT_EQ(m.layers[l].weights.size(), rows[l] * cols[l]);
        for (double b : m.layers[l].biases) EXPECT_EQ(b, 0.0);
        const double limit = std::sqrt(6.0 / static_cast<double>(cols[l]));
        for (double w : m.layers[l].weights) EXPECT_LE(std::abs(w), limit);
    }
    EXPECT_EQ(m.layers[0].activation, Activation::ReLU);
    EXPECT_EQ(m.layers[1].activation, Activation::ReLU);
    EXPECT_EQ(m.layers[2].activation, Activation::Sigmoid);
    EXPECT_EQ(m.layers[3].activation, Activation::Sigmoid);
    EXPECT_EQ(m.layers[4].activation, Activation::Identity);
    EXPECT_NO_THROW(m.validate());
}

TEST(Init, DeterministicPerSeed) {
    EXPECT_EQ(init_network(2, kDefaultHiddenWidths, 5), init_network(2, kDefaultHiddenWidths, 5));
    EXPECT_NE(init_network(2, kDefaultHiddenWidths, 5), init_network(2, kDefaultHiddenWidths, 6));
    EXPECT_THROW(init_network(4, kDefaultHiddenWidths, 5), InvalidArchitecture);
    EXPECT_THROW(init_network(0, kDefaultHiddenWidths, 5), InvalidArchitecture);
    EXPECT_THROW(init_network(1, {64, 0, 16, 8}, 5), InvalidArchitecture);
}

TEST(Forward, HandComputedSingleUnitChain) {
    auto m = init_network(1, {1, 1, 1, 1}, 1);
    const double w[] = {0.8, -1.5, 2.0, 0.7, 3.0};
    const double b[] = {0.1, 2.0, -0.5, 0.2, -1.0};
    for (std::size_t l = 0; l < 5; ++l) {
        m.layers[l].weights = {w[l]};
        m.layers[l].biases = {b[l]};
    }
    m.target_scale = 10.0;
    for (double x : {-1.0, 0.0, 0.3, 1.2, 5.0}) {
        double h = std::max(0.0, w[0] * x + b[0]);
        h = std::max(0.0, w[1] * h + b[1]);
        h = sigmoid(w[2] * h + b[2]);
        h = sigmoid(w[3] * h + b[3]);
        const double expected = 10.0 * (w[4] * h + b[4]);
        EXPECT_NEAR(forward(m, std::vector<double>{x}), expected, 1e-12) << "x=" << x;
    }
}

TEST(Forward, InputScalerAppliedBeforeFirstLayer) {
    auto m = init_network(1, {1, 1, 1, 1}, 1);
    m.input_scaler = {{10.0}, {20.0}};
    auto reference = m;
    reference.input_scaler = identity_scaler(1);
    EXPECT_EQ(forward(m, std::vector<double>{15.0}), forward(reference, std::vector<double>{0.5}));
}

TEST(Forward, SigmoidLayersStayInUnitInterval) {
    const auto d = synthetic_sample(200, 3, 2);
    const auto m = prepared_network(d, 3);
    for (std::size_t i = 0; i < d.rows(); ++i) {
        std::vector<double> scaled(3);
        m.input_scaler.apply_row(d.row(i), scaled);
        const auto trace = forward_trace(m, scaled);
        for (std::size_t l : {3u, 4u})
            for (double a : trace[l]) {
                EXPECT_GT(a, 0.0);
                EXPECT_LT(a, 1.0);
            }
        for (std::size_t l : {1u, 2u})
            for (double a : trace[l]) EXPECT_GE(a, 0.0);
    }
}

TEST(Forward, DimensionMismatch) {
    const auto m = init_network(2, kDefaultHiddenWidths, 1);
    EXPECT_THROW(forward(m, std::vector<double>{1.0}), DimensionMismatch);
    EXPECT_THROW(predict_ann(m, synthetic_sample(10, 3, 1)), DimensionMismatch);
}

TEST(GradientCheck, AgreesAtInitialisation) {
    for (std::size_t dim = 1; dim <= 3; ++dim) {
        const auto d = synthetic_sample(400, dim, 40 + dim);
        const auto m = prepared_network(d, 50 + dim);
        EXPECT_LT(gradient_check(m, head(d, 16)), 1e-4) << "dim " << dim;
    }
}

TEST(GradientCheck, AgreesAfterTraining) {
    for (std::size_t dim = 1; dim <= 3; ++dim) {
        const auto d = synthetic_sample(1000, dim, 60 + dim);
        TrainConfig cfg;
        cfg.epochs = 5;
        const auto trained = train(prepared_network(d, 70 + dim), d, cfg).model;
        EXPECT_LT(gradient_check(trained, head(d, 16)), 1e-4) << "dim " << dim;
    }
}

TEST(GradientCheck, AllZeroWeights) {
    const auto d = synthetic_sample(50, 2, 3);
    auto m = prepared_network(d, 4);
    assign_parameters(m, ParameterVector(m.parameter_count(), 0.0));
    EXPECT_LT(gradient_check(m, head(d, 8)), 1e-4);
}

TEST(GradientCheck, DetectsSignFlippedGradient) {
    const auto d = synthetic_sample(200, 3, 5);
    const auto m = prepared_network(d, 6);
    const GradientFunction flipped = [](const MlpModel& model, const DesignMatrix& s) {
        auto g = loss_gradient(model, s);
        g[g.size() / 2] = -g[g.size() / 2];
        for (std::size_t p = model.parameter_count() - 9; p < model.parameter_count(); ++p) g[p] = -g[p];
        return g;
    };
    EXPECT_GT(gradient_check(m, head(d, 16), flipped), 1e-2);
    EXPECT_THROW(gradient_check(m, head(d, 33)), InvalidArgument);
}

TEST(Training, LearnsALine) {
    std::vector<double> x, y;
    for (int i = 0; i < 1000; ++i) {
        x.push_back(i / 999.0);
        y.push_back(2.0 * x.back());
    }
    const DesignMatrix d(x.size(), {"x"}, x, y);
    const auto m = init_network(1, kDefaultHiddenWidths, 8);
    TrainConfig cfg;
    cfg.epochs = 50;
    const double before = scaled_loss(m, d);
    const auto result = train(m, d, cfg);
    EXPECT_LT(scaled_loss(result.model, d), 0.01 * before);
    EXPECT_EQ(result.history.loss.size(), 50u);
    EXPECT_EQ(result.history.epoch_seconds.size(), 50u);
}

TEST(Training, LossMostlyNonIncreasing) {
    const auto d = synthetic_sample(3000, 1, 9);
    TrainConfig cfg;
    cfg.epochs = 20;
    const auto h = train(prepared_network(d, 10), d, cfg).history;
    std::size_t ok = 0;
    for (std::size_t e = 1; e < h.loss.size(); ++e)
        if (h.loss[e] <= h.loss[e - 1]) ++ok;
    EXPECT_GE(ok * 5, (h.loss.size() - 1) * 4);
    EXPECT_LT(h.loss.back(), h.loss.front());
}

TEST(Training, DeterministicForSameSeed) {
    const auto d = synthetic_sample(500, 2, 11);
    TrainConfig cfg;
    cfg.epochs = 3;
    const auto a = train(prepared_network(d, 12), d, cfg);
    const auto b = train(prepared_network(d, 12), d, cfg);
    EXPECT_EQ(a.model, b.model);
    EXPECT_EQ(a.history.loss, b.history.loss);
    cfg.seed = 43;
    EXPECT_NE(train(prepared_network(d, 12), d, cfg).model, a.model);
}

TEST(Training, SgdAlsoReducesLoss) {
    const auto d = synthetic_sample(2000, 1, 13);
    TrainConfig cfg;
    cfg.optimizer = Optimizer::SGD;
    cfg.learning_rate = 0.05;
    cfg.epochs = 5;
    const auto m = prepared_network(d, 14);
    EXPECT_LT(scaled_loss(train(m, d, cfg).model, d), scaled_loss(m, d));
}

TEST(Training, InvalidConfiguration) {
    const auto d = synthetic_sample(100, 1, 15);
    const auto m = prepared_network(d, 16);
    TrainConfig cfg;
    cfg.epochs = 0;
    EXPECT_THROW(train(m, d, cfg), InvalidArgument);
    cfg = {};
    cfg.learning_rate = 0.0;
    EXPECT_THROW(train(m, d, cfg), InvalidArgument);
    cfg = {};
    cfg.batch_size = 101;
    EXPECT_THROW(train(m, d, cfg), TooFewRows);
    EXPECT_THROW(train(m, synthetic_sample(100, 2, 15), TrainConfig{}), DimensionMismatch);
}

TEST(Training, DivergenceIsReported) {
    const auto d = synthetic_sample(500, 1, 17);
    TrainConfig cfg;
    cfg.optimizer = Optimizer::SGD;
    cfg.learning_rate = 1e12;
    EXPECT_THROW(train(prepared_network(d, 18), d, cfg), NonFiniteLoss);
}

TEST(Serialization, RoundTripsBitExact) {
    const auto d = synthetic_sample(300, 3, 19);
    TrainConfig cfg;
    cfg.epochs = 2;
    const auto m = train(prepared_network(d, 20), d, cfg).model;
    const auto back = mlp_model_from_json(nlohmann::json::parse(to_json(m).dump()));
    EXPECT_EQ(back, m);
    EXPECT_EQ(predict_ann(back, d), predict_ann(m, d));

    auto broken = to_json(m);
    broken["parameters"].erase(0);
    EXPECT_THROW(mlp_model_from_json(broken), Error);
}

TEST(Serialization, HistoryCsv) {
    TrainHistory h{{0.5, 0.25}, {0.1, 0.1}};
    std::ostringstream out;
    write_history_csv(out, h);
    EXPECT_EQ(out.str(), "epoch,loss\n1,0.5\n2,0.25\n");
}
