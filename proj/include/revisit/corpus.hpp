#pragma once

#include <span>
#include <unordered_map>

#include "revisit/types.hpp"

namespace revisit {

struct CorpusTotals {
    std::uint64_t requests{};
    std::uint64_t pairs{};
    std::uint64_t distinct_users{};
    std::uint64_t distinct_urls{};
    std::uint64_t out_of_window{};  // events tallied and dropped at build time
};

/// Finalized, immutable view of an event stream: per-pair sorted timelines
/// plus per-user and per-url request totals. Safe to share across readers.
struct Corpus {
    Window window{};
    std::unordered_map<PairKey, PairTimeline, PairKeyHash> timelines;
    std::unordered_map<UserId, std::uint64_t, std::hash<UserId>> user_requests;
    std::unordered_map<UrlId, std::uint64_t, std::hash<UrlId>> url_visits;
    CorpusTotals totals{};

    const PairTimeline* find(const PairKey& key) const {
        auto it = timelines.find(key);
        return it == timelines.end() ? nullptr : &it->second;
    }
};

/// Accepts events in any order; sorting happens once at finalize, so corpus
/// construction is permutation-invariant. Builders for disjoint partitions
/// of the same stream merge associatively and commutatively.
class CorpusBuilder {
public:
    explicit CorpusBuilder(Window window);

    void add(const VisitEvent& event);
    void merge(CorpusBuilder&& other);

    /// Sorts every timeline and computes totals. The builder is spent.
    Corpus finalize() &&;

private:
    Window window_;
    std::unordered_map<PairKey, std::vector<Seconds>, PairKeyHash> times_;
    std::uint64_t out_of_window_{0};
};

Corpus build_corpus(std::span<const VisitEvent> events, Window window);

TimelineStats timeline_stats(const PairTimeline& tl);

struct ActivityBin {
    Seconds start{};
    std::uint64_t visits{};

    friend bool operator==(const ActivityBin&, const ActivityBin&) = default;
};

/// Visit counts per fixed-width time bin (bins anchored at t = 0), covering
/// the timeline span with empty bins emitted as zeros. Counts sum to omega_v.
std::vector<ActivityBin> activity_profile(const PairTimeline& tl, Seconds bin);

}  // namespace revisit
