// windcast: command-line front end for the forecasting library.
//
// Exit codes: 0 success, 1 usage, 2 data error, 3 numeric failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "windcast/windcast.hpp"

namespace fs = std::filesystem;
using namespace windcast;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumeric = 3;

struct CommonOptions {
    std::string data;
    double rated_power = 2000.0;
    std::uint64_t seed = 42;
    double train_fraction = 0.85;
    std::string features = "sdt";
    int degree = 5;
    std::string model = "ann";
    std::size_t epochs = 20;
    std::string out_dir = ".";
    std::size_t threads = 1;
    std::size_t synthetic_rows = SyntheticConfig{}.n_samples;
};

Dataset load_or_synthesize(const CommonOptions& o) {
    if (o.data.empty()) {
        SyntheticConfig cfg;
        cfg.seed = o.seed;
        cfg.n_samples = o.synthetic_rows;
        return generate_synthetic(cfg);
    }
    std::ifstream in(o.data);
    if (!in) throw DataError("cannot open '" + o.data + "'");
    return parse_csv(in, o.rated_power);
}

FeatureSet features_from(const std::string& s) {
    auto fs = parse_feature_set(s);
    if (!fs) throw InvalidArgument("unknown feature set '" + s + "' (use s, sd, st, sdt)");
    return *fs;
}

ModelKind model_from(const std::string& s) {
    auto m = parse_model_kind(s);
    if (!m) throw InvalidArgument("unknown model '" + s + "' (use persistence, linear, polynomial, ann)");
    return *m;
}

std::ofstream open_out(const fs::path& p) {
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    if (!out) throw DataError("cannot write '" + p.string() + "'");
    return out;
}

Experiment experiment_from(const CommonOptions& o) {
    Experiment e;
    e.model = model_from(o.model);
    e.features = features_from(o.features);
    e.train_fraction = o.train_fraction;
    e.degree = o.degree;
    e.seed = o.seed;
    e.ann.epochs = o.epochs;
    e.ann.seed = o.seed;
    return e;
}

void print_report(const EvalReport& r) {
    std::printf("n_samples %zu\nmae       %.5f\nrmse      %.5f\nr_squared %.5f\n", r.n_samples, r.mae, r.rmse,
                r.r_squared);
}

void add_data_flags(CLI::App* cmd, CommonOptions& o) {
    cmd->add_option("--data", o.data, "Input CSV; a default synthetic dataset (seeded by --seed) when omitted");
    cmd->add_option("--rated-power", o.rated_power, "Plant rated power in kW for ingested data")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--seed", o.seed, "Seed for splits, initialisation and synthesis");
    cmd->add_option("--n-samples", o.synthetic_rows, "Rows in the synthetic fallback dataset")
        ->check(CLI::PositiveNumber);
}

void add_model_flags(CLI::App* cmd, CommonOptions& o) {
    cmd->add_option("--train-fraction", o.train_fraction, "Training share in [0.5, 0.99]");
    cmd->add_option("--features", o.features, "Feature set: s, sd, st or sdt");
    cmd->add_option("--degree", o.degree, "Polynomial degree in [2, 5]");
    cmd->add_option("--model", o.model, "persistence, linear, polynomial or ann");
    cmd->add_option("--epochs", o.epochs, "ANN training epochs");
}

int run_gen(const std::string& config_path, SyntheticConfig overrides, const std::vector<std::string>& set_keys,
            const std::string& out_path) {
    SyntheticConfig cfg;
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) throw DataError("cannot open '" + config_path + "'");
        cfg = parse_synthetic_config(in, cfg);
    }
    // Flags given on the command line win over the config file.
    for (const auto& k : set_keys) {
        if (k == "n_samples") cfg.n_samples = overrides.n_samples;
        else if (k == "cut_in_speed") cfg.cut_in_speed = overrides.cut_in_speed;
        else if (k == "rated_speed") cfg.rated_speed = overrides.rated_speed;
        else if (k == "cut_out_speed") cfg.cut_out_speed = overrides.cut_out_speed;
        else if (k == "rated_power") cfg.rated_power = overrides.rated_power;
        else if (k == "air_density") cfg.air_density = overrides.air_density;
        else if (k == "rotor_area") cfg.rotor_area = overrides.rotor_area;
        else if (k == "power_coefficient") cfg.power_coefficient = overrides.power_coefficient;
        else if (k == "noise_sd") cfg.noise_sd = overrides.noise_sd;
        else if (k == "seed") cfg.seed = overrides.seed;
    }
    const auto d = generate_synthetic(cfg);
    auto out = open_out(out_path);
    write_csv(out, d);
    std::printf("wrote %zu records to %s\n", d.size(), out_path.c_str());
    return 0;
}

int run_correlate(const CommonOptions& o) {
    const auto d = load_or_synthesize(o);
    const auto m = correlation_matrix(d);
    std::printf("%-16s", "");
    for (const auto& l : m.labels) std::printf("%16s", l.c_str());
    std::printf("\n");
    for (std::size_t i = 0; i < m.size(); ++i) {
        std::printf("%-16s", m.labels[i].c_str());
        for (std::size_t j = 0; j < m.size(); ++j) std::printf("%16.6f", m(i, j));
        std::printf("\n");
    }
    const auto path = fs::path(o.out_dir) / "correlation_heatmap.csv";
    auto out = open_out(path);
    write_heatmap_csv(out, m);
    std::printf("heatmap data: %s\n", path.string().c_str());
    return 0;
}

int run_fit(const CommonOptions& o) {
    const auto d = load_or_synthesize(o);
    const auto e = experiment_from(o);
    if (e.model == ModelKind::Persistence) {
        SweepConfig cfg;
        cfg.seed = o.seed;
        const auto row = run_sweep_row(d, cfg, SweepRow{.model = ModelKind::Persistence, .train_fraction = o.train_fraction});
        if (!row.ok) throw DataError(row.error);
        print_report(row.test);
        return 0;
    }
    const auto outcome = run_experiment(d, e);
    print_report(outcome.test_report);
    std::printf("train_r_squared %.5f\nout_of_bounds_fraction %.5f\n", outcome.train_report.r_squared,
                outcome.out_of_bounds);
    const auto stem = fs::path(o.out_dir) / ("model_" + to_string(e.model));
    {
        auto out = open_out(stem.string() + ".json");
        out << to_json(outcome.model).dump(2) << '\n';
    }
    if (outcome.history) {
        auto out = open_out(stem.string() + "_loss.csv");
        write_history_csv(out, *outcome.history);
    }
    return 0;
}

int run_sweep_cmd(const CommonOptions& o) {
    const auto d = load_or_synthesize(o);
    SweepConfig cfg;
    cfg.seed = o.seed;
    cfg.ann_train.epochs = o.epochs;
    cfg.ann_train.seed = o.seed;
    cfg.threads = o.threads;
    const auto rows = run_sweep(d, cfg);
    const auto csv_path = fs::path(o.out_dir) / "sweep.csv";
    const auto json_path = fs::path(o.out_dir) / "sweep.json";
    {
        auto out = open_out(csv_path);
        write_sweep_csv(out, rows);
    }
    {
        auto out = open_out(json_path);
        out << sweep_to_json(rows).dump(2) << '\n';
    }
    std::size_t failed = 0;
    for (const auto& r : rows) failed += r.ok ? 0 : 1;
    std::printf("%zu rows (%zu failed) -> %s, %s\n", rows.size(), failed, csv_path.string().c_str(),
                json_path.string().c_str());
    return 0;
}

int run_plot_data(const CommonOptions& o) {
    const auto d = load_or_synthesize(o);
    const auto e = experiment_from(o);
    if (e.model == ModelKind::Persistence) throw InvalidArgument("plot-data needs a fitted model");
    const auto outcome = run_experiment(d, e);
    const auto tag = to_string(e.model);
    const auto curve = fs::path(o.out_dir) / ("power_curve_" + tag + ".csv");
    const auto scatter = fs::path(o.out_dir) / ("pred_vs_actual_" + tag + ".csv");
    {
        auto out = open_out(curve);
        emit_power_curve_points(out, outcome.model, outcome.test);
    }
    {
        auto out = open_out(scatter);
        emit_pred_vs_actual(out, outcome.model, outcome.test);
    }
    std::printf("%s\n%s\n", curve.string().c_str(), scatter.string().c_str());
    return 0;
}

int run_gradcheck(const CommonOptions& o, std::size_t sample_rows) {
    constexpr double tolerance = 1e-4;
    const auto d = load_or_synthesize(o);
    const auto [train_set, test_set] = split(d, SplitSpec{o.train_fraction, o.seed});
    const auto train = select_features(train_set, features_from(o.features));
    auto net = init_network(train.cols(), kDefaultHiddenWidths, o.seed);
    net.input_scaler = fit_scaler(train);
    net.target_scale = d.rated_power();

    const auto rows = std::min(sample_rows, train.rows());
    std::vector<double> values(train.values().begin(),
                               train.values().begin() + static_cast<std::ptrdiff_t>(rows * train.cols()));
    std::vector<double> target(train.target().begin(), train.target().begin() + static_cast<std::ptrdiff_t>(rows));
    const DesignMatrix sample(rows, train.feature_names(), std::move(values), std::move(target));

    const double at_init = gradient_check(net, sample);
    std::printf("max relative error at init:          %.3e\n", at_init);
    TrainConfig cfg;
    cfg.epochs = o.epochs;
    cfg.seed = o.seed;
    const auto trained = windcast::train(net, train, cfg);
    const double after = gradient_check(trained.model, sample);
    std::printf("max relative error after %2zu epochs: %.3e\n", o.epochs, after);
    const bool pass = at_init < tolerance && after < tolerance;
    std::printf("%s (tolerance %.0e)\n", pass ? "PASS" : "FAIL", tolerance);
    return pass ? 0 : kExitNumeric;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"windcast: wind-power forecasting with regression and neural-network models"};
    app.require_subcommand(1);
    CommonOptions o;

    auto* gen = app.add_subcommand("gen", "Generate a synthetic 15-minute wind-farm dataset");
    std::string config_path, out_path = "synthetic.csv";
    SyntheticConfig gen_flags;
    gen->add_option("--config", config_path, "Flat key=value file with SyntheticConfig fields");
    gen->add_option("--out", out_path, "Output CSV path");
    gen->add_option("--n-samples", gen_flags.n_samples);
    gen->add_option("--cut-in-speed", gen_flags.cut_in_speed);
    gen->add_option("--rated-speed", gen_flags.rated_speed);
    gen->add_option("--cut-out-speed", gen_flags.cut_out_speed);
    gen->add_option("--rated-power", gen_flags.rated_power);
    gen->add_option("--air-density", gen_flags.air_density);
    gen->add_option("--rotor-area", gen_flags.rotor_area);
    gen->add_option("--power-coefficient", gen_flags.power_coefficient);
    gen->add_option("--noise-sd", gen_flags.noise_sd);
    gen->add_option("--seed", gen_flags.seed);

    auto* correlate = app.add_subcommand("correlate", "Correlation matrix and heatmap plot data");
    add_data_flags(correlate, o);
    correlate->add_option("--out-dir", o.out_dir);

    auto* fit = app.add_subcommand("fit", "Fit one model on one split and print its evaluation");
    add_data_flags(fit, o);
    add_model_flags(fit, o);
    fit->add_option("--out-dir", o.out_dir, "Where the model JSON (and ANN loss history) go");

    auto* sweep = app.add_subcommand("sweep", "Run the full experiment grid and write report files");
    add_data_flags(sweep, o);
    sweep->add_option("--epochs", o.epochs, "ANN training epochs");
    sweep->add_option("--out-dir", o.out_dir);
    sweep->add_option("--threads", o.threads, "Worker threads (output is identical for any value)")
        ->check(CLI::PositiveNumber);

    auto* plot = app.add_subcommand("plot-data", "Power-curve and predicted-vs-actual plot data");
    add_data_flags(plot, o);
    add_model_flags(plot, o);
    plot->add_option("--out-dir", o.out_dir);

    auto* gradcheck = app.add_subcommand("gradcheck", "Verify ANN backpropagation against finite differences");
    std::size_t sample_rows = 16;
    add_data_flags(gradcheck, o);
    gradcheck->add_option("--train-fraction", o.train_fraction);
    gradcheck->add_option("--features", o.features);
    gradcheck->add_option("--epochs", o.epochs, "Epochs to train before the second check");
    gradcheck->add_option("--rows", sample_rows, "Rows in the checked sample (1-32)")->check(CLI::Range(1, 32));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (*gen) {
            std::vector<std::string> set_keys;
            for (const auto* opt : gen->get_options()) {
                if (opt->count() == 0) continue;
                auto name = opt->get_name(false, true);
                if (name.rfind("--", 0) == 0) name = name.substr(2);
                for (auto& c : name)
                    if (c == '-') c = '_';
                set_keys.push_back(name);
            }
            return run_gen(config_path, gen_flags, set_keys, out_path);
        }
        if (*correlate) return run_correlate(o);
        if (*fit) return run_fit(o);
        if (*sweep) return run_sweep_cmd(o);
        if (*plot) return run_plot_data(o);
        if (*gradcheck) {
            if (gradcheck->get_option("--epochs")->count() == 0) o.epochs = 5;
            return run_gradcheck(o, sample_rows);
        }
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        switch (e.kind()) {
        case ErrorKind::Usage: return kExitUsage;
        case ErrorKind::Data: return kExitData;
        case ErrorKind::Numeric: return kExitNumeric;
        }
    } catch (const nlohmann::json::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitData;
    } catch (const fs::filesystem_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitData;
    }
    return 0;
}
