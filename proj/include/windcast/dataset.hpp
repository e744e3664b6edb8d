#pragma once

// Wind-farm time series: records, ingest/emit, synthesis, splitting,
// feature projection and min-max scaling.

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <numbers>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "windcast/error.hpp"
#include "windcast/numeric.hpp"
#include "windcast/random.hpp"

namespace windcast {

using Timestamp = std::chrono::sys_seconds;

/// Parses "YYYY-MM-DDTHH:MM:SS" (a space may replace the 'T', a trailing 'Z' is accepted).
inline std::optional<Timestamp> parse_timestamp(std::string_view s) {
    using namespace std::chrono;
    while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) s.remove_suffix(1);
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    if (!s.empty() && s.back() == 'Z') s.remove_suffix(1);
    if (s.size() != 19 || s[4] != '-' || s[7] != '-' || (s[10] != 'T' && s[10] != ' ') || s[13] != ':' ||
        s[16] != ':')
        return std::nullopt;
    auto field = [&](std::size_t pos, std::size_t len, int& out) {
        out = 0;
        for (std::size_t i = pos; i < pos + len; ++i) {
            if (s[i] < '0' || s[i] > '9') return false;
            out = out * 10 + (s[i] - '0');
        }
        return true;
    };
    int y, mo, d, h, mi, se;
    if (!field(0, 4, y) || !field(5, 2, mo) || !field(8, 2, d) || !field(11, 2, h) || !field(14, 2, mi) ||
        !field(17, 2, se))
        return std::nullopt;
    const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok() || h > 23 || mi > 59 || se > 59) return std::nullopt;
    return sys_days{ymd} + hours{h} + minutes{mi} + seconds{se};
}

inline std::string format_timestamp(Timestamp t) {
    using namespace std::chrono;
    const auto day_point = floor<days>(t);
    const year_month_day ymd{day_point};
    const hh_mm_ss hms{t - day_point};
    char buf[64];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02ld:%02ld:%02ld", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<long>(hms.hours().count()), static_cast<long>(hms.minutes().count()),
                  static_cast<long>(hms.seconds().count()));
    return buf;
}

/// One SCADA sample: speed in m/s, direction in degrees, temperature in °C, power in kW.
struct Record {
    Timestamp timestamp{};
    double wind_speed = 0.0;
    double wind_direction = 0.0;
    double temperature = 0.0;
    double power = 0.0;

    friend bool operator==(const Record&, const Record&) = default;
};

/// Slack above rated power tolerated before a row is rejected.
inline constexpr double kRatedPowerTolerance = 1.05;

/// Returns the reason the record is invalid, or an empty string.
inline std::string validate_record(const Record& r, double rated_power) {
    if (!std::isfinite(r.wind_speed) || r.wind_speed < 0.0) return "wind_speed must be finite and >= 0";
    if (!std::isfinite(r.wind_direction) || r.wind_direction < 0.0 || r.wind_direction >= 360.0)
        return "wind_direction must lie in [0, 360)";
    if (!std::isfinite(r.temperature)) return "temperature must be finite";
    if (!std::isfinite(r.power) || r.power < 0.0) return "power must be finite and >= 0";
    if (r.power > kRatedPowerTolerance * rated_power) return "power exceeds rated_power by more than 5%";
    return {};
}

/// A validated, chronologically ordered series. Immutable once built.
class Dataset {
public:
    Dataset(std::vector<Record> records, double rated_power)
        : records_(std::move(records)), rated_power_(rated_power) {
        if (!(rated_power_ > 0.0) || !std::isfinite(rated_power_))
            throw InvalidConfig("rated_power must be positive and finite");
        if (records_.empty()) throw EmptyInput();
        std::vector<RowIssue> issues;
        for (std::size_t i = 0; i < records_.size(); ++i) {
            if (auto why = validate_record(records_[i], rated_power_); !why.empty())
                issues.push_back({i + 1, std::move(why)});
        }
        if (!issues.empty()) throw RowParseError(std::move(issues));
        for (std::size_t i = 1; i < records_.size(); ++i) {
            if (records_[i].timestamp <= records_[i - 1].timestamp) throw NonMonotonicTimestamps(i + 1);
        }
    }

    [[nodiscard]] const std::vector<Record>& records() const noexcept { return records_; }
    [[nodiscard]] std::size_t size() const noexcept { return records_.size(); }
    [[nodiscard]] double rated_power() const noexcept { return rated_power_; }
    [[nodiscard]] const Record& operator[](std::size_t i) const { return records_[i]; }

    [[nodiscard]] std::vector<double> wind_speed() const { return column(&Record::wind_speed); }
    [[nodiscard]] std::vector<double> wind_direction() const { return column(&Record::wind_direction); }
    [[nodiscard]] std::vector<double> temperature() const { return column(&Record::temperature); }
    [[nodiscard]] std::vector<double> power() const { return column(&Record::power); }

    /// Subset by index; indices must be strictly increasing so chronology survives.
    [[nodiscard]] Dataset subset(std::span<const std::size_t> indices) const {
        std::vector<Record> out;
        out.reserve(indices.size());
        for (auto i : indices) out.push_back(records_.at(i));
        return Dataset(std::move(out), rated_power_);
    }

    friend bool operator==(const Dataset&, const Dataset&) = default;

private:
    [[nodiscard]] std::vector<double> column(double Record::*field) const {
        std::vector<double> out;
        out.reserve(records_.size());
        for (const auto& r : records_) out.push_back(r.*field);
        return out;
    }

    std::vector<Record> records_;
    double rated_power_;
};

inline constexpr std::string_view kCsvHeader = "timestamp,wind_speed,wind_direction,temperature,power";

namespace detail {
inline std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = line.find(',', start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' || s.back() == '\n'))
        s.remove_suffix(1);
    return s;
}
} // namespace detail

/// Reads `timestamp,wind_speed,wind_direction,temperature,power` CSV.
/// Every bad row is collected before failing; row numbers are 1-based and exclude the header.
inline Dataset parse_csv(std::istream& in, double rated_power) {
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
        std::string_view v = line;
        if (v.size() >= 3 && v.substr(0, 3) == "\xEF\xBB\xBF") v.remove_prefix(3);
        v = detail::trim(v);
        if (v.empty()) continue;
        std::string compact;
        for (auto part : detail::split_commas(v)) {
            if (!compact.empty()) compact += ',';
            compact += detail::trim(part);
        }
        if (compact != kCsvHeader) throw MalformedHeader(std::string(v));
        have_header = true;
        break;
    }
    if (!have_header) throw EmptyInput();

    std::vector<Record> records;
    std::vector<RowIssue> issues;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        const auto v = detail::trim(line);
        if (v.empty()) continue;
        ++row;
        const auto fields = detail::split_commas(v);
        if (fields.size() != 5) {
            issues.push_back({row, "expected 5 fields, got " + std::to_string(fields.size())});
            continue;
        }
        Record r;
        auto ts = parse_timestamp(detail::trim(fields[0]));
        if (!ts) {
            issues.push_back({row, "unparseable timestamp '" + std::string(fields[0]) + "'"});
            continue;
        }
        r.timestamp = *ts;
        static constexpr const char* names[] = {"wind_speed", "wind_direction", "temperature", "power"};
        double* slots[] = {&r.wind_speed, &r.wind_direction, &r.temperature, &r.power};
        bool ok = true;
        for (std::size_t f = 0; f < 4; ++f) {
            if (!parse_double(fields[f + 1], *slots[f])) {
                issues.push_back({row, std::string("missing or non-numeric ") + names[f]});
                ok = false;
                break;
            }
        }
        if (!ok) continue;
        if (auto why = validate_record(r, rated_power); !why.empty()) {
            issues.push_back({row, std::move(why)});
            continue;
        }
        records.push_back(r);
    }
    if (row == 0) throw EmptyInput();
    if (!issues.empty()) throw RowParseError(std::move(issues));
    return Dataset(std::move(records), rated_power);
}

/// Writes the ingest format with round-trip-exact numbers.
inline void write_csv(std::ostream& out, const Dataset& d) {
    out << kCsvHeader << '\n';
    for (const auto& r : d.records()) {
        out << format_timestamp(r.timestamp) << ',' << format_double(r.wind_speed) << ','
            << format_double(r.wind_direction) << ',' << format_double(r.temperature) << ','
            << format_double(r.power) << '\n';
    }
}

// --- synthesis ---------------------------------------------------------------

struct SyntheticConfig {
    std::size_t n_samples = 30090;
    double cut_in_speed = 3.0;    // m/s
    double rated_speed = 12.0;    // m/s
    double cut_out_speed = 25.0;  // m/s
    double rated_power = 2000.0;  // kW
    double air_density = 1.225;   // kg/m^3
    double rotor_area = 4200.0;   // m^2; the cubic reaches ~rated_power at rated_speed
    double power_coefficient = 0.45;
    double noise_sd = 40.0;       // kW
    std::uint64_t seed = 42;

    // Wind regime. Speeds follow a Weibull marginal driven by a latent AR(1) process.
    double weibull_shape = 2.0;
    double weibull_scale = 8.0;        // m/s
    double speed_autocorrelation = 0.97; // per 15-minute step

    // Temperature: annual and diurnal cycles plus noise, independent of wind.
    double temperature_mean = 26.0;
    double temperature_annual_amplitude = 4.0;
    double temperature_diurnal_amplitude = 4.0;
    double temperature_noise_sd = 1.5;

    Timestamp start = std::chrono::sys_days{std::chrono::year{2019} / std::chrono::January / 1};
    std::chrono::seconds step{15 * 60};

    /// Throws InvalidConfig on the first violated invariant.
    void validate() const {
        if (n_samples == 0) throw InvalidConfig("n_samples must be >= 1");
        if (!(cut_in_speed > 0.0 && cut_in_speed < rated_speed && rated_speed < cut_out_speed))
            throw InvalidConfig("require 0 < cut_in_speed < rated_speed < cut_out_speed");
        if (!(power_coefficient > 0.0 && power_coefficient <= 0.59))
            throw InvalidConfig("power_coefficient must lie in (0, 0.59]");
        if (!(rated_power > 0.0)) throw InvalidConfig("rated_power must be > 0");
        if (!(air_density > 0.0)) throw InvalidConfig("air_density must be > 0");
        if (!(rotor_area > 0.0)) throw InvalidConfig("rotor_area must be > 0");
        if (!(noise_sd >= 0.0)) throw InvalidConfig("noise_sd must be >= 0");
        if (!(weibull_shape > 0.0 && weibull_scale > 0.0)) throw InvalidConfig("Weibull parameters must be > 0");
        if (!(speed_autocorrelation >= 0.0 && speed_autocorrelation < 1.0))
            throw InvalidConfig("speed_autocorrelation must lie in [0, 1)");
        if (!(temperature_noise_sd >= 0.0)) throw InvalidConfig("temperature_noise_sd must be >= 0");
        if (step.count() <= 0) throw InvalidConfig("step must be positive");
    }
};

/// Noise-free turbine output in kW: zero outside [cut_in, cut_out], else the
/// aerodynamic cubic capped at rated power.
inline double power_curve(const SyntheticConfig& c, double v) {
    if (v < c.cut_in_speed || v > c.cut_out_speed) return 0.0;
    const double aero_kw = 0.5 * c.air_density * c.power_coefficient * c.rotor_area * (v * v * v) / 1000.0;
    return std::min(aero_kw, c.rated_power);
}

inline Dataset generate_synthetic(const SyntheticConfig& c) {
    using namespace std::chrono;
    c.validate();
    Rng speed_rng(derive_seed(c.seed, 1));
    Rng noise_rng(derive_seed(c.seed, 2));
    Rng direction_rng(derive_seed(c.seed, 3));
    Rng temperature_rng(derive_seed(c.seed, 4));

    const double phi = c.speed_autocorrelation;
    const double innovation = std::sqrt(1.0 - phi * phi);
    const double two_pi = 2.0 * std::numbers::pi;
    const double year_s = 365.0 * 86400.0;

    std::vector<Record> records;
    records.reserve(c.n_samples);
    double z = speed_rng.normal();
    for (std::size_t i = 0; i < c.n_samples; ++i) {
        if (i > 0) z = phi * z + innovation * speed_rng.normal();
        // Weibull inverse CDF applied to the upper-tail probability of z.
        const double tail = std::clamp(0.5 * std::erfc(z / std::numbers::sqrt2), 1e-300, 1.0);
        const double v = c.weibull_scale * std::pow(-std::log(tail), 1.0 / c.weibull_shape);

        Record r;
        r.timestamp = c.start + c.step * static_cast<long long>(i);
        r.wind_speed = v;
        const double noisy = power_curve(c, v) + c.noise_sd * noise_rng.normal();
        r.power = std::clamp(noisy, 0.0, kRatedPowerTolerance * c.rated_power);
        r.wind_direction = direction_rng.uniform(0.0, 360.0);
        if (r.wind_direction >= 360.0) r.wind_direction = 0.0;

        const double t = static_cast<double>(duration_cast<seconds>(r.timestamp - c.start).count());
        const double day_fraction = std::fmod(t, 86400.0) / 86400.0;
        r.temperature = c.temperature_mean + c.temperature_annual_amplitude * std::sin(two_pi * t / year_s) +
                        c.temperature_diurnal_amplitude * std::sin(two_pi * (day_fraction - 0.375)) +
                        c.temperature_noise_sd * temperature_rng.normal();
        records.push_back(r);
    }
    return Dataset(std::move(records), c.rated_power);
}

/// Reads flat `key = value` lines onto `base`. Keys are SyntheticConfig field
/// names; '#' starts a comment. Unknown keys and bad numbers throw InvalidConfig.
inline SyntheticConfig parse_synthetic_config(std::istream& in, SyntheticConfig base = {}) {
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view v = line;
        if (const auto hash = v.find('#'); hash != std::string_view::npos) v = v.substr(0, hash);
        v = detail::trim(v);
        if (v.empty()) continue;
        const auto eq = v.find('=');
        if (eq == std::string_view::npos) throw InvalidConfig("line " + std::to_string(line_no) + ": expected key=value");
        const auto key = detail::trim(v.substr(0, eq));
        const auto text = detail::trim(v.substr(eq + 1));
        double value = 0.0;
        if (!parse_double(text, value))
            throw InvalidConfig("line " + std::to_string(line_no) + ": '" + std::string(text) + "' is not a number");
        auto as_count = [&](const char* what) {
            if (!(value >= 0.0) || value != std::floor(value) || value > 1.8e19)
                throw InvalidConfig(std::string(what) + " must be a non-negative integer");
            return static_cast<std::uint64_t>(value);
        };
        if (key == "n_samples") base.n_samples = as_count("n_samples");
        else if (key == "cut_in_speed") base.cut_in_speed = value;
        else if (key == "rated_speed") base.rated_speed = value;
        else if (key == "cut_out_speed") base.cut_out_speed = value;
        else if (key == "rated_power") base.rated_power = value;
        else if (key == "air_density") base.air_density = value;
        else if (key == "rotor_area") base.rotor_area = value;
        else if (key == "power_coefficient") base.power_coefficient = value;
        else if (key == "noise_sd") base.noise_sd = value;
        else if (key == "seed") {
            // Seeds above 2^53 cannot pass through a double exactly.
            std::uint64_t seed = 0;
            auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), seed);
            if (ec != std::errc{} || ptr != text.data() + text.size()) throw InvalidConfig("seed must be an unsigned integer");
            base.seed = seed;
        }
        else if (key == "weibull_shape") base.weibull_shape = value;
        else if (key == "weibull_scale") base.weibull_scale = value;
        else if (key == "speed_autocorrelation") base.speed_autocorrelation = value;
        else if (key == "temperature_mean") base.temperature_mean = value;
        else if (key == "temperature_annual_amplitude") base.temperature_annual_amplitude = value;
        else if (key == "temperature_diurnal_amplitude") base.temperature_diurnal_amplitude = value;
        else if (key == "temperature_noise_sd") base.temperature_noise_sd = value;
        else throw InvalidConfig("line " + std::to_string(line_no) + ": unknown key '" + std::string(key) + "'");
    }
    return base;
}

// --- splitting -------------------------------------------------------------------

struct SplitSpec {
    double train_fraction = 0.85;
    std::uint64_t seed = 42;

    void validate() const {
        if (!(train_fraction >= 0.5 && train_fraction <= 0.99))
            throw InvalidArgument("train_fraction must lie in [0.5, 0.99], got " + format_double(train_fraction));
    }
};

struct SplitIndices {
    std::vector<std::size_t> train; // ascending
    std::vector<std::size_t> test;  // ascending
};

/// Seeded Fisher-Yates over 0..n-1; the first floor(n * fraction) shuffled indices train.
/// Both halves are returned sorted so each keeps chronological order.
inline SplitIndices split_indices(std::size_t n, const SplitSpec& spec) {
    spec.validate();
    if (n == 0) throw EmptyInput();
    // The epsilon guards products such as 100 * 0.85 landing a hair under the integer.
    const auto n_train = static_cast<std::size_t>(std::floor(static_cast<double>(n) * spec.train_fraction + 1e-9));
    if (n_train == 0 || n_train >= n)
        throw DegenerateSplit(std::to_string(n) + " rows at fraction " + format_double(spec.train_fraction) +
                              " leaves an empty " + (n_train == 0 ? "train" : "test") + " set");
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    Rng rng(spec.seed);
    rng.shuffle(std::span<std::size_t>(idx));
    SplitIndices out;
    out.train.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
    out.test.assign(idx.begin() + static_cast<std::ptrdiff_t>(n_train), idx.end());
    std::sort(out.train.begin(), out.train.end());
    std::sort(out.test.begin(), out.test.end());
    return out;
}

inline std::pair<Dataset, Dataset> split(const Dataset& d, const SplitSpec& spec) {
    const auto parts = split_indices(d.size(), spec);
    return {d.subset(parts.train), d.subset(parts.test)};
}

// --- features ------------------------------------------------------------------

enum class FeatureSet { SpeedOnly, SpeedDirection, SpeedTemperature, SpeedDirectionTemperature };

inline constexpr FeatureSet kAllFeatureSets[] = {FeatureSet::SpeedOnly, FeatureSet::SpeedDirection,
                                                 FeatureSet::SpeedTemperature,
                                                 FeatureSet::SpeedDirectionTemperature};

inline std::string to_string(FeatureSet fs) {
    switch (fs) {
    case FeatureSet::SpeedOnly: return "speed";
    case FeatureSet::SpeedDirection: return "speed+direction";
    case FeatureSet::SpeedTemperature: return "speed+temperature";
    case FeatureSet::SpeedDirectionTemperature: return "speed+direction+temperature";
    }
    return "?";
}

/// Accepts the long names above or the short forms s, sd, st, sdt.
inline std::optional<FeatureSet> parse_feature_set(std::string_view s) {
    for (auto fs : kAllFeatureSets)
        if (s == to_string(fs)) return fs;
    if (s == "s") return FeatureSet::SpeedOnly;
    if (s == "sd") return FeatureSet::SpeedDirection;
    if (s == "st") return FeatureSet::SpeedTemperature;
    if (s == "sdt") return FeatureSet::SpeedDirectionTemperature;
    return std::nullopt;
}

inline std::vector<std::string> feature_names(FeatureSet fs) {
    switch (fs) {
    case FeatureSet::SpeedOnly: return {"wind_speed"};
    case FeatureSet::SpeedDirection: return {"wind_speed", "wind_direction"};
    case FeatureSet::SpeedTemperature: return {"wind_speed", "temperature"};
    case FeatureSet::SpeedDirectionTemperature: return {"wind_speed", "wind_direction", "temperature"};
    }
    return {};
}

/// Row-major n x k feature matrix plus the power target.
class DesignMatrix {
public:
    DesignMatrix() = default;
    DesignMatrix(std::size_t rows, std::vector<std::string> names, std::vector<double> values,
                 std::vector<double> target)
        : rows_(rows), names_(std::move(names)), values_(std::move(values)), target_(std::move(target)) {
        if (values_.size() != rows_ * names_.size()) throw LengthMismatch(values_.size(), rows_ * names_.size());
        if (target_.size() != rows_) throw LengthMismatch(target_.size(), rows_);
    }

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return names_.size(); }
    [[nodiscard]] double operator()(std::size_t i, std::size_t j) const { return values_[i * cols() + j]; }
    [[nodiscard]] std::span<const double> row(std::size_t i) const {
        return {values_.data() + i * cols(), cols()};
    }
    [[nodiscard]] std::vector<double> column(std::size_t j) const {
        std::vector<double> out(rows_);
        for (std::size_t i = 0; i < rows_; ++i) out[i] = (*this)(i, j);
        return out;
    }
    [[nodiscard]] const std::vector<double>& values() const noexcept { return values_; }
    [[nodiscard]] const std::vector<double>& target() const noexcept { return target_; }
    [[nodiscard]] const std::vector<std::string>& feature_names() const noexcept { return names_; }

    friend bool operator==(const DesignMatrix&, const DesignMatrix&) = default;

private:
    std::size_t rows_ = 0;
    std::vector<std::string> names_;
    std::vector<double> values_;
    std::vector<double> target_;
};

/// Columns in the order speed, direction, temperature (those present); target is power.
inline DesignMatrix select_features(const Dataset& d, FeatureSet fs) {
    auto names = feature_names(fs);
    const bool dir = fs == FeatureSet::SpeedDirection || fs == FeatureSet::SpeedDirectionTemperature;
    const bool temp = fs == FeatureSet::SpeedTemperature || fs == FeatureSet::SpeedDirectionTemperature;
    std::vector<double> values;
    values.reserve(d.size() * names.size());
    std::vector<double> target;
    target.reserve(d.size());
    for (const auto& r : d.records()) {
        values.push_back(r.wind_speed);
        if (dir) values.push_back(r.wind_direction);
        if (temp) values.push_back(r.temperature);
        target.push_back(r.power);
    }
    return DesignMatrix(d.size(), std::move(names), std::move(values), std::move(target));
}

// --- scaling ------------------------------------------------------------------------

/// Per-feature affine map onto [0, 1]. A constant feature maps to 0.
struct MinMaxScaler {
    std::vector<double> min;
    std::vector<double> max;

    [[nodiscard]] std::size_t size() const noexcept { return min.size(); }

    [[nodiscard]] double scale(std::size_t j, double x) const {
        const double range = max[j] - min[j];
        return range > 0.0 ? (x - min[j]) / range : 0.0;
    }
    [[nodiscard]] double unscale(std::size_t j, double u) const { return min[j] + u * (max[j] - min[j]); }

    void apply_row(std::span<const double> in, std::span<double> out) const {
        if (in.size() != size()) throw DimensionMismatch(size(), in.size());
        for (std::size_t j = 0; j < in.size(); ++j) out[j] = scale(j, in[j]);
    }

    friend bool operator==(const MinMaxScaler&, const MinMaxScaler&) = default;
};

inline MinMaxScaler identity_scaler(std::size_t k) { return {std::vector<double>(k, 0.0), std::vector<double>(k, 1.0)}; }

inline MinMaxScaler fit_scaler(const DesignMatrix& m) {
    if (m.rows() == 0) throw EmptyInput("cannot fit a scaler on an empty matrix");
    MinMaxScaler s{std::vector<double>(m.cols()), std::vector<double>(m.cols())};
    for (std::size_t j = 0; j < m.cols(); ++j) {
        s.min[j] = s.max[j] = m(0, j);
        for (std::size_t i = 1; i < m.rows(); ++i) {
            s.min[j] = std::min(s.min[j], m(i, j));
            s.max[j] = std::max(s.max[j], m(i, j));
        }
    }
    return s;
}

inline DesignMatrix apply_scaler(const MinMaxScaler& s, const DesignMatrix& m) {
    if (s.size() != m.cols()) throw DimensionMismatch(s.size(), m.cols());
    std::vector<double> v(m.values().size());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) v[i * m.cols() + j] = s.scale(j, m(i, j));
    return DesignMatrix(m.rows(), m.feature_names(), std::move(v), m.target());
}

/// Inverse of apply_scaler for non-constant features (constant ones map back to their minimum).
inline DesignMatrix invert_scaler(const MinMaxScaler& s, const DesignMatrix& m) {
    if (s.size() != m.cols()) throw DimensionMismatch(s.size(), m.cols());
    std::vector<double> v(m.values().size());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) v[i * m.cols() + j] = s.unscale(j, m(i, j));
    return DesignMatrix(m.rows(), m.feature_names(), std::move(v), m.target());
}

} // namespace windcast
