#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace revisit {

using UserId = std::uint64_t;
using UrlId = std::uint64_t;
using Seconds = std::int64_t;

/// One timestamped request by one anonymized user to one URL.
/// Identifiers are opaque 64-bit values; raw hosts/IPs never reach this type.
struct VisitEvent {
    UserId user{};
    UrlId url{};
    Seconds t{};  // seconds since epoch, >= 0

    friend bool operator==(const VisitEvent&, const VisitEvent&) = default;
};

struct PairKey {
    UserId user{};
    UrlId url{};

    friend bool operator==(const PairKey&, const PairKey&) = default;
    friend auto operator<=>(const PairKey&, const PairKey&) = default;
};

struct PairKeyHash {
    std::size_t operator()(const PairKey& k) const noexcept {
        // splitmix64-style mix of the two halves
        std::uint64_t x = k.user * 0x9e3779b97f4a7c15ULL ^ k.url;
        x ^= x >> 30;
        x *= 0xbf58476d1ce4e5b9ULL;
        x ^= x >> 27;
        x *= 0x94d049bb133111ebULL;
        x ^= x >> 31;
        return static_cast<std::size_t>(x);
    }
};

/// Observation window, inclusive on both ends.
struct Window {
    Seconds begin{0};
    Seconds end{std::numeric_limits<Seconds>::max()};

    bool contains(Seconds t) const { return t >= begin && t <= end; }
    Seconds length() const { return end - begin; }

    friend bool operator==(const Window&, const Window&) = default;
};

/// Exact integer ratio; carries the mean inter-visit time span/omega_r
/// without rounding.
struct Ratio {
    std::int64_t num{};
    std::int64_t den{};

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

/// Sorted visit times of one (user, url) pair; the unit of all statistics.
/// Invariant after finalization: times nondecreasing.
struct PairTimeline {
    PairKey key{};
    std::vector<Seconds> times;

    std::uint64_t visit_count() const { return times.size(); }
    std::uint64_t return_count() const { return times.empty() ? 0 : times.size() - 1; }
    Seconds span() const { return times.size() < 2 ? 0 : times.back() - times.front(); }

    /// Consecutive differences, each >= 0; sum(intervals) == span exactly.
    std::vector<Seconds> intervals() const {
        std::vector<Seconds> out;
        if (times.size() < 2) return out;
        out.reserve(times.size() - 1);
        for (std::size_t i = 1; i < times.size(); ++i) out.push_back(times[i] - times[i - 1]);
        return out;
    }
};

/// Per-timeline summary. mean_interval is undefined (not zero) for
/// single-visit pairs; the exact rational form is span/omega_returns.
struct TimelineStats {
    std::uint64_t omega_visits{};
    std::uint64_t omega_returns{};
    Seconds span{};
    std::optional<double> mean_interval;      // span / omega_returns, rounded to double
    std::optional<double> tau_omega_product;  // <tau> * omega_visits = span * w_v / w_r

    std::optional<Ratio> mean_interval_exact() const {
        if (omega_returns == 0) return std::nullopt;
        return Ratio{span, static_cast<std::int64_t>(omega_returns)};
    }
};

// Error taxonomy shared across the library.
struct ParamError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct EmptyResultError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DegenerateFitError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct CoverageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace revisit
