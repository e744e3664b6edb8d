#pragma once

#include <array>
#include <charconv>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <system_error>

namespace windcast {

namespace detail {
template <typename F>
double pairwise_sum_impl(std::size_t begin, std::size_t end, const F& term) {
    constexpr std::size_t block = 32;
    if (end - begin <= block) {
        double s = 0.0;
        for (std::size_t i = begin; i < end; ++i) s += term(i);
        return s;
    }
    const std::size_t mid = begin + (end - begin) / 2;
    return pairwise_sum_impl(begin, mid, term) + pairwise_sum_impl(mid, end, term);
}
} // namespace detail

/// Pairwise (cascade) summation of term(0) ... term(n-1). Error grows as O(log n) rather than O(n).
template <typename F>
double pairwise_sum(std::size_t n, const F& term) {
    if (n == 0) return 0.0;
    return detail::pairwise_sum_impl(0, n, term);
}

inline double pairwise_sum(std::span<const double> xs) {
    return pairwise_sum(xs.size(), [xs](std::size_t i) { return xs[i]; });
}

/// Shortest decimal text that parses back to exactly the same double.
inline std::string format_double(double x) {
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    if (ec != std::errc{}) return "nan";
    return std::string(buf.data(), ptr);
}

/// Parses a full token as a double; false on trailing garbage or empty input.
inline bool parse_double(std::string_view s, double& out) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    if (s.empty()) return false;
    if (s.front() == '+') s.remove_prefix(1);
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

} // namespace windcast
