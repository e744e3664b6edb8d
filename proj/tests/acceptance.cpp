// Acceptance suite: one PASS / FAIL / SKIP line per criterion, non-zero exit if
// anything fails. Every tolerance used is a named constant below.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "ls_oracle.hpp"
#include "windcast/windcast.hpp"

using namespace windcast;

namespace {

// Criterion 1
constexpr int kOracleSystems = 100;
constexpr double kOracleRelTol = 1e-8;
constexpr double kOracleSeconds = 10.0;
// Criterion 2
constexpr double kGradTol = 1e-4;
constexpr std::size_t kGradRows = 16;
constexpr std::size_t kGradEpochs = 5;
constexpr double kGradSeconds = 30.0;
// Criterion 3
constexpr int kMetricPairs = 500;
constexpr double kMeanPredictorTol = 1e-12;
constexpr double kAffineTol = 1e-10;
// Criterion 4
constexpr double kLinearFloor = 0.80;
constexpr double kPoly5Floor = 0.93;
constexpr double kAnnFloor = 0.95;
constexpr double kSeedSlack = 0.02; // thresholds relaxed by this much for the non-primary seeds
constexpr std::uint64_t kSeeds[] = {42, 43, 44};
constexpr double kOrderingSeconds = 300.0;
// Criterion 7
constexpr double kRealCorrelation = 0.934438;
constexpr double kRealCorrelationTol = 1e-4;

enum class Status { Pass, Fail, Skip };

struct Verdict {
    Status status;
    std::string detail;
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// --- 1 ---------------------------------------------------------------------------------

Verdict ols_oracle() {
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng(20240101);
    double worst = 0.0;
    int expanded_systems = 0;
    for (int s = 0; s < kOracleSystems; ++s) {
        const std::size_t k = 1 + rng.below(3);
        const bool expand = s % 2 == 1;
        std::vector<std::string> names;
        for (std::size_t j = 0; j < k; ++j) names.push_back("x" + std::to_string(j + 1));
        const std::size_t width = expand ? monomial_terms(k, 5).size() : k;
        const std::size_t lo = std::max<std::size_t>(2 * (width + 1), 20);
        const std::size_t n = lo + rng.below(200 - lo + 1);

        std::vector<double> x(n * k), y(n);
        std::vector<double> scale(k);
        for (auto& c : scale) c = expand ? 1.0 : rng.uniform(0.5, 100.0);
        for (auto& v : x) v = rng.uniform(-1.0, 1.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < k; ++j) x[i * k + j] *= scale[j];
        DesignMatrix raw(n, names, x, std::vector<double>(n, 0.0));
        const DesignMatrix design = expand ? expand_polynomial(raw, 5) : raw;

        std::vector<double> beta(design.cols() + 1);
        for (auto& b : beta) b = rng.uniform(0.5, 2.0) * (rng.below(2) ? 1.0 : -1.0);
        for (std::size_t i = 0; i < n; ++i) {
            double t = beta[0];
            for (std::size_t j = 0; j < design.cols(); ++j) t += beta[j + 1] * design(i, j);
            y[i] = t + 0.1 * rng.normal();
        }
        const DesignMatrix fit_input(n, design.feature_names(), design.values(), y);
        const auto model = fit_ols(fit_input);

        std::vector<double> augmented;
        augmented.reserve(n * (design.cols() + 1));
        for (std::size_t i = 0; i < n; ++i) {
            augmented.push_back(1.0);
            for (std::size_t j = 0; j < design.cols(); ++j) augmented.push_back(design(i, j));
        }
        const auto want = oracle::least_squares(augmented, n, design.cols() + 1, y);
        std::vector<double> got{model.intercept};
        got.insert(got.end(), model.coefficients.begin(), model.coefficients.end());
        for (std::size_t j = 0; j < want.size(); ++j)
            worst = std::max(worst, std::abs(got[j] - want[j]) / std::abs(want[j]));
        if (expand) ++expanded_systems;
    }
    const double elapsed = seconds_since(t0);
    const bool ok = worst <= kOracleRelTol && elapsed < kOracleSeconds;
    return {ok ? Status::Pass : Status::Fail,
            std::to_string(kOracleSystems) + " systems (" + std::to_string(expanded_systems) +
                " degree-5 expansions), worst per-coefficient rel err " + fmt("%.2e", worst) + " (tol " +
                fmt("%.0e", kOracleRelTol) + "), " + fmt("%.2f", elapsed) + " s (limit " + fmt("%.0f", kOracleSeconds) +
                " s)"};
}

// --- 2 ---------------------------------------------------------------------------------

Verdict gradient_agreement() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto data = generate_synthetic(SyntheticConfig{});
    const auto [train_set, test_set] = split(data, SplitSpec{});
    const FeatureSet sets[] = {FeatureSet::SpeedOnly, FeatureSet::SpeedDirection,
                               FeatureSet::SpeedDirectionTemperature};
    double worst = 0.0;
    std::string per_dim;
    for (std::size_t dim = 1; dim <= 3; ++dim) {
        const auto train = select_features(train_set, sets[dim - 1]);
        auto net = init_network(dim, kDefaultHiddenWidths, derive_seed(42, dim));
        net.input_scaler = fit_scaler(train);
        net.target_scale = data.rated_power();

        Rng pick(derive_seed(7, dim));
        std::vector<double> xs, ys;
        for (std::size_t r = 0; r < kGradRows; ++r) {
            const auto i = pick.below(train.rows());
            const auto row = train.row(i);
            xs.insert(xs.end(), row.begin(), row.end());
            ys.push_back(train.target()[i]);
        }
        const DesignMatrix sample(kGradRows, train.feature_names(), xs, ys);

        const double at_init = gradient_check(net, sample);
        TrainConfig cfg;
        cfg.epochs = kGradEpochs;
        const auto trained = windcast::train(net, train, cfg).model;
        const double after = gradient_check(trained, sample);
        worst = std::max({worst, at_init, after});
        per_dim += " dim" + std::to_string(dim) + "=" + fmt("%.1e", at_init) + "/" + fmt("%.1e", after);
    }
    const double elapsed = seconds_since(t0);
    const bool ok = worst < kGradTol && elapsed < kGradSeconds;
    return {ok ? Status::Pass : Status::Fail,
            "max rel err " + fmt("%.2e", worst) + " (tol " + fmt("%.0e", kGradTol) + "; init/after " +
                std::to_string(kGradEpochs) + " epochs:" + per_dim + "), " + fmt("%.2f", elapsed) + " s (limit " +
                fmt("%.0f", kGradSeconds) + " s)"};
}

// --- 3 ---------------------------------------------------------------------------------

Verdict metric_identities() {
    Rng rng(3);
    std::vector<std::string> failures;
    auto check = [&](bool cond, const std::string& what) {
        if (!cond) failures.push_back(what);
    };
    for (int t = 0; t < kMetricPairs; ++t) {
        const std::size_t n = 2 + rng.below(200);
        std::vector<double> a(n), p(n);
        for (auto& v : a) v = rng.uniform(0.0, 2000.0);
        for (auto& v : p) v = rng.uniform(-100.0, 2100.0);
        if (t == 0) a[1] = a[0] + 1.0; // guarantee non-constant even for n = 2

        const auto perfect = evaluate(a, a);
        check(perfect.mae == 0.0 && perfect.rmse == 0.0 && perfect.r_squared == 1.0, "perfect forecast");

        double naive_mean = 0.0;
        for (double v : a) naive_mean += v;
        naive_mean /= static_cast<double>(n);
        check(std::abs(r_squared(a, std::vector<double>(n, naive_mean))) <= kMeanPredictorTol, "mean predictor");

        const auto rep = evaluate(a, p);
        check(rep.rmse >= rep.mae && rep.mae >= 0.0 && rep.r_squared <= 1.0, "rmse >= mae >= 0, r2 <= 1");

        const double scale = rng.uniform(0.01, 100.0) * (rng.below(2) ? 1.0 : -1.0);
        const double shift = rng.uniform(-1e3, 1e3);
        std::vector<double> ta(n), tp(n);
        for (std::size_t i = 0; i < n; ++i) {
            ta[i] = scale * a[i] + shift;
            tp[i] = scale * p[i] + shift;
        }
        check(std::abs(r_squared(ta, tp) - rep.r_squared) <= kAffineTol * std::max(1.0, std::abs(rep.r_squared)),
              "affine invariance of r2");
    }
    std::sort(failures.begin(), failures.end());
    failures.erase(std::unique(failures.begin(), failures.end()), failures.end());
    std::string detail = std::to_string(kMetricPairs) +
                         " random pairs: perfect -> 0/0/1 exactly, mean predictor |r2| <= " +
                         fmt("%.0e", kMeanPredictorTol) + ", rmse >= mae, joint affine r2 within " +
                         fmt("%.0e", kAffineTol);
    for (const auto& f : failures) detail += "; violated: " + f;
    return {failures.empty() ? Status::Pass : Status::Fail, detail};
}

// --- 4, 5, 6 ---------------------------------------------------------------------------

SweepConfig default_sweep(std::uint64_t seed) {
    SweepConfig cfg;
    cfg.seed = seed;
    cfg.ann_train.seed = seed;
    return cfg;
}

struct SeedRun {
    std::uint64_t seed;
    std::vector<SweepRow> rows;
};

// One default sweep per seed, shared by criteria 4-6 and computed on first use.
const std::vector<SeedRun>& seed_runs() {
    static const std::vector<SeedRun> runs = [] {
        std::vector<SeedRun> out;
        for (std::uint64_t seed : kSeeds) {
            SyntheticConfig data_cfg;
            data_cfg.seed = seed;
            out.push_back({seed, run_sweep(generate_synthetic(data_cfg), default_sweep(seed))});
        }
        return out;
    }();
    return runs;
}

Verdict qualitative_ordering() {
    const auto t0 = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = true;
    for (const auto& [seed, rows] : seed_runs()) {

        double best_lin = -1e300, min_lin = 1e300, best_p5 = -1e300, min_p5 = 1e300, best_ann = -1e300,
               min_ann = 1e300;
        std::size_t failed = 0;
        for (const auto& r : rows) {
            if (!r.ok) {
                ++failed;
                continue;
            }
            const double v = r.test.r_squared;
            if (r.model == ModelKind::Linear) {
                best_lin = std::max(best_lin, v);
                min_lin = std::min(min_lin, v);
            } else if (r.model == ModelKind::Polynomial && r.degree == 5) {
                best_p5 = std::max(best_p5, v);
                min_p5 = std::min(min_p5, v);
            } else if (r.model == ModelKind::Ann) {
                best_ann = std::max(best_ann, v);
                min_ann = std::min(min_ann, v);
            }
        }
        const double slack = seed == kSeeds[0] ? 0.0 : kSeedSlack;
        const bool ordering = best_lin < best_p5 && best_p5 < best_ann;
        const bool floors = min_lin >= kLinearFloor - slack && min_p5 >= kPoly5Floor - slack &&
                            min_ann >= kAnnFloor - slack;
        ok = ok && ordering && floors && failed == 0;
        detail += " seed " + std::to_string(seed) + ": linear best " + fmt("%.4f", best_lin) + " (min " +
                  fmt("%.4f", min_lin) + ") < poly5 best " + fmt("%.4f", best_p5) + " (min " + fmt("%.4f", min_p5) +
                  ") < ann best " + fmt("%.4f", best_ann) + " (min " + fmt("%.4f", min_ann) + ")" +
                  (ordering ? "" : " ORDERING BROKEN") + (floors ? "" : " FLOOR MISSED") +
                  (failed ? " " + std::to_string(failed) + " failed rows" : "") + ";";
    }
    const double elapsed = seconds_since(t0);
    ok = ok && elapsed < kOrderingSeconds;
    return {ok ? Status::Pass : Status::Fail,
            "floors " + fmt("%.2f", kLinearFloor) + "/" + fmt("%.2f", kPoly5Floor) + "/" + fmt("%.2f", kAnnFloor) +
                " on every row (relaxed by " + fmt("%.2f", kSeedSlack) + " for seeds 43, 44);" + detail + " " +
                fmt("%.1f", elapsed) + " s (limit " + fmt("%.0f", kOrderingSeconds) + " s)"};
}

Verdict degree_monotonicity() {
    std::size_t cells = 0;
    std::vector<std::string> broken;
    for (const auto& run : seed_runs()) {
        std::map<std::tuple<int, double>, std::vector<std::pair<int, double>>> by_cell;
        for (const auto& r : run.rows)
            if (r.model == ModelKind::Polynomial && r.ok && r.train_r_squared)
                by_cell[{static_cast<int>(*r.feature_set), r.train_fraction}].push_back({*r.degree, *r.train_r_squared});
        for (auto& [key, seq] : by_cell) {
            ++cells;
            std::sort(seq.begin(), seq.end());
            for (std::size_t i = 1; i < seq.size(); ++i)
                if (seq[i].second < seq[i - 1].second)
                    broken.push_back("seed " + std::to_string(run.seed) + " " +
                                     to_string(static_cast<FeatureSet>(std::get<0>(key))) + " @" +
                                     fmt("%.2f", std::get<1>(key)) + " deg " + std::to_string(seq[i].first));
            if (seq.size() != 4) broken.push_back("incomplete degree ladder");
        }
    }
    std::string detail = std::to_string(cells) +
                         " (seed, feature set, fraction) cells, training R^2 nondecreasing over degrees 2..5 with no "
                         "tolerance";
    for (const auto& b : broken) detail += "; violated at " + b;
    return {broken.empty() && cells > 0 ? Status::Pass : Status::Fail, detail};
}

Verdict determinism() {
    const auto data = generate_synthetic(SyntheticConfig{});
    auto serialise = [](const std::vector<SweepRow>& rows) {
        std::ostringstream csv;
        write_sweep_csv(csv, rows);
        return std::pair{csv.str(), sweep_to_json(rows).dump(2) + "\n"};
    };
    const auto first = serialise(seed_runs().front().rows);
    const auto t0 = std::chrono::steady_clock::now();
    const auto second = serialise(run_sweep(data, default_sweep(kSeeds[0])));
    const double elapsed = seconds_since(t0);
    const bool ok = first == second;
    return {ok ? Status::Pass : Status::Fail,
            "default sweep re-run: sweep.csv " + std::string(first.first == second.first ? "identical" : "DIFFERS") +
                " (" + std::to_string(first.first.size()) + " bytes), sweep.json " +
                (first.second == second.second ? "identical" : "DIFFERS") + " (" +
                std::to_string(first.second.size()) + " bytes); " + fmt("%.1f", elapsed) + " s"};
}

// --- 7 ---------------------------------------------------------------------------------

Verdict real_data_correlation() {
    const char* path = std::getenv("WINDCAST_REAL_DATA");
    if (!path || !*path) return {Status::Skip, "WINDCAST_REAL_DATA not set; real SCADA file not supplied"};
    double rated = 2000.0;
    if (const char* r = std::getenv("WINDCAST_REAL_RATED_POWER"); r && *r) rated = std::strtod(r, nullptr);
    std::ifstream in(path);
    if (!in) return {Status::Fail, std::string("cannot open ") + path};
    const auto d = parse_csv(in, rated);
    const double r = pearson(d.wind_speed(), d.power());
    const bool ok = std::abs(r - kRealCorrelation) <= kRealCorrelationTol;
    return {ok ? Status::Pass : Status::Fail, "pearson(speed, power) = " + fmt("%.6f", r) + " over " +
                                                  std::to_string(d.size()) + " rows (want " +
                                                  fmt("%.6f", kRealCorrelation) + " +/- " +
                                                  fmt("%.0e", kRealCorrelationTol) + ")"};
}

// --- 8 ---------------------------------------------------------------------------------

Verdict physics_bounds() {
    SyntheticConfig cfg;
    cfg.noise_sd = 0.0;
    const auto d = generate_synthetic(cfg);
    std::size_t over = 0, not_octuple = 0;
    double tightest = 1e300;
    for (const auto& r : d.records()) {
        const double bound = physical_power(r.wind_speed, cfg.air_density, kBetzLimit, cfg.rotor_area);
        if (r.power > bound) ++over;
        if (r.power > 0.0) tightest = std::min(tightest, bound / r.power);
        const double p = physical_power(r.wind_speed, cfg.air_density, cfg.power_coefficient, cfg.rotor_area);
        if (physical_power(2.0 * r.wind_speed, cfg.air_density, cfg.power_coefficient, cfg.rotor_area) != 8.0 * p)
            ++not_octuple;
    }
    Rng rng(8);
    constexpr int kRandomTriples = 100000;
    for (int i = 0; i < kRandomTriples; ++i) {
        const double v = rng.uniform(0.0, 40.0), rho = rng.uniform(0.9, 1.4), cp = rng.uniform(0.0, kBetzLimit),
                     a = rng.uniform(1.0, 2e4);
        if (physical_power(2.0 * v, rho, cp, a) != 8.0 * physical_power(v, rho, cp, a)) ++not_octuple;
    }
    const bool ok = over == 0 && not_octuple == 0;
    return {ok ? Status::Pass : Status::Fail,
            std::to_string(d.size()) + " noise-free rows, " + std::to_string(over) +
                " above the Cp=0.59 bound (min bound/power " + fmt("%.3f", tightest) + "); v->2v exact 8x on " +
                std::to_string(d.size() + kRandomTriples) + " inputs, " + std::to_string(not_octuple) + " mismatches"};
}

} // namespace

// With arguments, runs only the listed criterion numbers.
int main(int argc, char** argv) {
    std::vector<int> only;
    for (int i = 1; i < argc; ++i) only.push_back(std::atoi(argv[i]));
    struct Criterion {
        int id;
        const char* name;
        std::function<Verdict()> run;
    };
    const Criterion criteria[] = {
        {1, "OLS matches extended-precision oracle", ols_oracle},
        {2, "ANN gradient check", gradient_agreement},
        {3, "metric identities", metric_identities},
        {4, "model ordering on synthetic data", qualitative_ordering},
        {5, "training R^2 monotone in degree", degree_monotonicity},
        {6, "sweep output is byte-identical across runs", determinism},
        {7, "real-data speed/power correlation", real_data_correlation},
        {8, "Betz bound and cubic scaling", physics_bounds},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
        Verdict v;
        try {
            v = c.run();
        } catch (const std::exception& e) {
            v = {Status::Fail, std::string("threw: ") + e.what()};
        }
        const char* tag = v.status == Status::Pass ? "PASS" : v.status == Status::Skip ? "SKIP" : "FAIL";
        if (v.status == Status::Fail) ++failed;
        std::printf("%s  [%d] %s: %s\n", tag, c.id, c.name, v.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%s: %d criteria failed\n", failed ? "FAILED" : "OK", failed);
    return failed ? 1 : 0;
}
