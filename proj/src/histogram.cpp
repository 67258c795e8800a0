#include "revisit/histogram.hpp"

#include <algorithm>

namespace revisit {

namespace {
constexpr std::size_t kMaxBins = 1 << 16;
}

LogHistogram::LogHistogram(double base, double x_min, double x_max) : base_(base) {
    if (!(base > 1.0)) throw ParamError("log histogram: base must be > 1");
    if (!(x_min > 0.0) || !(x_min < x_max)) throw ParamError("log histogram: need 0 < x_min < x_max");

    edges_.push_back(x_min);
    for (std::size_t k = 1;; ++k) {
        if (k > kMaxBins) throw ParamError("log histogram: support too wide for base");
        const double edge = x_min * std::pow(base, static_cast<double>(k));
        if (edge >= x_max) {
            edges_.push_back(x_max);
            break;
        }
        edges_.push_back(edge);
    }
    counts_.assign(edges_.size() - 1, 0);
}

std::optional<std::size_t> LogHistogram::bin_index(double x) const {
    if (x < edges_.front() || x >= edges_.back()) return std::nullopt;
    const auto it = std::upper_bound(edges_.begin(), edges_.end(), x);
    return static_cast<std::size_t>(it - edges_.begin()) - 1;
}

void LogHistogram::add(double x, std::uint64_t count) {
    if (x < 0.0) throw ParamError("log histogram: negative sample");
    if (x == 0.0) {
        zero_ += count;
        return;
    }
    if (const auto idx = bin_index(x)) {
        counts_[*idx] += count;
        total_ += count;
    } else if (x < edges_.front()) {
        below_ += count;
    } else {
        above_ += count;
    }
}

void LogHistogram::merge(const LogHistogram& other) {
    if (edges_ != other.edges_) throw ParamError("log histogram merge: supports differ");
    for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
    total_ += other.total_;
    zero_ += other.zero_;
    below_ += other.below_;
    above_ += other.above_;
}

double LogHistogram::density(std::size_t i) const {
    if (total_ == 0) return 0.0;
    return static_cast<double>(counts_[i]) / (width(i) * static_cast<double>(total_));
}

template <typename T>
LogHistogram log_binned_histogram(std::span<const T> samples, const HistogramSpec& spec) {
    double x_min = spec.x_min;
    double x_max = spec.x_max;
    if (x_min <= 0.0 || x_max <= 0.0) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = 0.0;
        for (const T& s : samples) {
            const double x = static_cast<double>(s);
            if (x > 0.0) {
                lo = std::min(lo, x);
                hi = std::max(hi, x);
            }
        }
        if (hi == 0.0) throw EmptyResultError("log histogram: no positive samples");
        if (x_min <= 0.0) x_min = lo;
        // nudge the upper edge so the maximum sample itself is in support
        if (x_max <= 0.0) x_max = hi * (1.0 + 1e-9);
    }

    LogHistogram h(spec.base, x_min, x_max);
    h.add_all(samples);
    if (h.total_in_support() == 0) throw EmptyResultError("log histogram: no samples in support");
    return h;
}

template LogHistogram log_binned_histogram<double>(std::span<const double>, const HistogramSpec&);
template LogHistogram log_binned_histogram<Seconds>(std::span<const Seconds>, const HistogramSpec&);
template LogHistogram log_binned_histogram<std::uint64_t>(std::span<const std::uint64_t>, const HistogramSpec&);

}  // namespace revisit
