#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "revisit/types.hpp"

namespace revisit {

/// Default bin growth: 10 bins per decade, resolving ~5 decades in ~50 bins.
inline constexpr double kDefaultLogBase = 1.2589254117941673;  // 10^(1/10)

struct HistogramSpec {
    double base = kDefaultLogBase;
    double x_min = 0;  // <= 0: smallest positive sample
    double x_max = 0;  // <= 0: just above the largest sample
};

/// Log-binned empirical density. Bin edges sit at x_min * base^k; the last
/// bin is clipped at x_max, so the support is exactly [x_min, x_max).
/// Zero-valued samples are tallied separately and excluded from the density,
/// as are samples below or above the support. Density integrates to 1 over
/// the support whenever any in-support sample exists.
class LogHistogram {
public:
    LogHistogram(double base, double x_min, double x_max);

    void add(double x) { add(x, 1); }
    void add(double x, std::uint64_t count);

    template <typename T>
    void add_all(std::span<const T> samples) {
        for (const T& s : samples) add(static_cast<double>(s));
    }

    /// Bin-wise sum; requires identical support (associative, commutative).
    void merge(const LogHistogram& other);

    double base() const { return base_; }
    double x_min() const { return edges_.front(); }
    double x_max() const { return edges_.back(); }
    std::size_t bin_count() const { return counts_.size(); }
    double lower_edge(std::size_t i) const { return edges_[i]; }
    double upper_edge(std::size_t i) const { return edges_[i + 1]; }
    std::uint64_t count(std::size_t i) const { return counts_[i]; }
    double width(std::size_t i) const { return edges_[i + 1] - edges_[i]; }
    double center(std::size_t i) const { return std::sqrt(edges_[i] * edges_[i + 1]); }

    /// count / (width * total_in_support); 0 for empty histograms.
    double density(std::size_t i) const;

    std::uint64_t total_in_support() const { return total_; }
    std::uint64_t zero_count() const { return zero_; }
    std::uint64_t below_count() const { return below_; }
    std::uint64_t above_count() const { return above_; }

    /// Bin holding x, or nullopt when x is outside the support.
    std::optional<std::size_t> bin_index(double x) const;

private:
    double base_;
    std::vector<double> edges_;      // bin_count() + 1, strictly increasing
    std::vector<std::uint64_t> counts_;
    std::uint64_t total_{0};
    std::uint64_t zero_{0};
    std::uint64_t below_{0};
    std::uint64_t above_{0};
};

/// Builds the histogram and requires at least one in-support sample
/// (EmptyResultError otherwise). Auto support per HistogramSpec.
template <typename T>
LogHistogram log_binned_histogram(std::span<const T> samples, const HistogramSpec& spec = {});

extern template LogHistogram log_binned_histogram<double>(std::span<const double>, const HistogramSpec&);
extern template LogHistogram log_binned_histogram<Seconds>(std::span<const Seconds>, const HistogramSpec&);
extern template LogHistogram log_binned_histogram<std::uint64_t>(std::span<const std::uint64_t>, const HistogramSpec&);

}  // namespace revisit
