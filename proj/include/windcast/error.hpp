#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace windcast {

/// Broad failure category. The CLI maps these onto exit codes 1, 2 and 3.
enum class ErrorKind { Usage, Data, Numeric };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

class UsageError : public Error {
public:
    explicit UsageError(const std::string& what) : Error(ErrorKind::Usage, what) {}
};

class DataError : public Error {
public:
    explicit DataError(const std::string& what) : Error(ErrorKind::Data, what) {}
};

class NumericError : public Error {
public:
    explicit NumericError(const std::string& what) : Error(ErrorKind::Numeric, what) {}
};

// --- ingest / dataset ---------------------------------------------------

class EmptyInput : public DataError {
public:
    explicit EmptyInput(const std::string& what = "input contains no data rows") : DataError(what) {}
};

class MalformedHeader : public DataError {
public:
    explicit MalformedHeader(const std::string& got)
        : DataError("malformed header: expected 'timestamp,wind_speed,wind_direction,temperature,power', got '" +
                    got + "'") {}
};

class NonMonotonicTimestamps : public DataError {
public:
    explicit NonMonotonicTimestamps(std::size_t row)
        : DataError("timestamps not strictly increasing at row " + std::to_string(row)), row_(row) {}
    [[nodiscard]] std::size_t row() const noexcept { return row_; }

private:
    std::size_t row_;
};

struct RowIssue {
    std::size_t row; // 1-based data row (header excluded)
    std::string reason;
};

class RowParseError : public DataError {
public:
    explicit RowParseError(std::vector<RowIssue> issues) : DataError(describe(issues)), issues_(std::move(issues)) {}

    [[nodiscard]] const std::vector<RowIssue>& issues() const noexcept { return issues_; }
    [[nodiscard]] std::vector<std::size_t> rows() const {
        std::vector<std::size_t> out;
        out.reserve(issues_.size());
        for (const auto& i : issues_) out.push_back(i.row);
        return out;
    }

private:
    static std::string describe(const std::vector<RowIssue>& issues) {
        std::string s = std::to_string(issues.size()) + " invalid row(s):";
        std::size_t shown = 0;
        for (const auto& i : issues) {
            if (shown++ == 10) {
                s += " ...";
                break;
            }
            s += " [row " + std::to_string(i.row) + ": " + i.reason + "]";
        }
        return s;
    }
    std::vector<RowIssue> issues_;
};

class InvalidConfig : public DataError {
public:
    explicit InvalidConfig(const std::string& what) : DataError("invalid config: " + what) {}
};

class DegenerateSplit : public DataError {
public:
    explicit DegenerateSplit(const std::string& what) : DataError("degenerate split: " + what) {}
};

class SeriesTooShort : public DataError {
public:
    explicit SeriesTooShort(const std::string& what) : DataError("series too short: " + what) {}
};

class TooFewRows : public DataError {
public:
    explicit TooFewRows(const std::string& what) : DataError("too few rows: " + what) {}
};

// --- shape / argument mismatches ---------------------------------------

class LengthMismatch : public UsageError {
public:
    LengthMismatch(std::size_t a, std::size_t b)
        : UsageError("length mismatch: " + std::to_string(a) + " vs " + std::to_string(b)) {}
};

class EmptyVector : public UsageError {
public:
    EmptyVector() : UsageError("empty input vector") {}
};

class FeatureMismatch : public UsageError {
public:
    explicit FeatureMismatch(const std::string& what) : UsageError("feature mismatch: " + what) {}
};

class DimensionMismatch : public UsageError {
public:
    DimensionMismatch(std::size_t expected, std::size_t got)
        : UsageError("dimension mismatch: expected " + std::to_string(expected) + ", got " + std::to_string(got)) {}
};

class DegreeOutOfRange : public UsageError {
public:
    explicit DegreeOutOfRange(int degree)
        : UsageError("polynomial degree " + std::to_string(degree) + " outside [2, 5]") {}
};

class InvalidArchitecture : public UsageError {
public:
    explicit InvalidArchitecture(const std::string& what) : UsageError("invalid architecture: " + what) {}
};

class InvalidArgument : public UsageError {
public:
    explicit InvalidArgument(const std::string& what) : UsageError(what) {}
};

class BetzViolation : public UsageError {
public:
    explicit BetzViolation(double cp)
        : UsageError("power coefficient " + std::to_string(cp) + " exceeds the Betz limit 0.59") {}
};

// --- numeric failures ----------------------------------------------------

class ConstantInput : public NumericError {
public:
    explicit ConstantInput(const std::string& column)
        : NumericError("constant input" + (column.empty() ? std::string{} : " in column '" + column + "'")),
          column_(column) {}
    [[nodiscard]] const std::string& column() const noexcept { return column_; }

private:
    std::string column_;
};

class ConstantActual : public NumericError {
public:
    ConstantActual() : NumericError("r_squared undefined: actual values are constant") {}
};

class RankDeficient : public NumericError {
public:
    explicit RankDeficient(std::vector<std::string> columns)
        : NumericError(describe(columns)), columns_(std::move(columns)) {}
    [[nodiscard]] const std::vector<std::string>& columns() const noexcept { return columns_; }

private:
    static std::string describe(const std::vector<std::string>& cols) {
        std::string s = "design matrix is rank deficient; dependent column(s):";
        for (const auto& c : cols) s += " " + c;
        return s;
    }
    std::vector<std::string> columns_;
};

class NonFiniteLoss : public NumericError {
public:
    NonFiniteLoss(std::size_t epoch, double learning_rate)
        : NumericError("non-finite training loss at epoch " + std::to_string(epoch) + " (learning rate " +
                       std::to_string(learning_rate) + ")"),
          epoch_(epoch), learning_rate_(learning_rate) {}
    [[nodiscard]] std::size_t epoch() const noexcept { return epoch_; }
    [[nodiscard]] double learning_rate() const noexcept { return learning_rate_; }

private:
    std::size_t epoch_;
    double learning_rate_;
};

} // namespace windcast
