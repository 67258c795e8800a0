#include "revisit/corpus.hpp"

#include <algorithm>

namespace revisit {

CorpusBuilder::CorpusBuilder(Window window) : window_(window) {
    if (window.begin > window.end) throw ParamError("corpus window: t_begin > t_end");
}

void CorpusBuilder::add(const VisitEvent& event) {
    if (!window_.contains(event.t)) {
        ++out_of_window_;
        return;
    }
    times_[PairKey{event.user, event.url}].push_back(event.t);
}

void CorpusBuilder::merge(CorpusBuilder&& other) {
    if (!(window_ == other.window_)) throw ParamError("merging builders with different windows");
    for (auto& [key, ts] : other.times_) {
        auto& dst = times_[key];
        dst.insert(dst.end(), ts.begin(), ts.end());
    }
    out_of_window_ += other.out_of_window_;
    other.times_.clear();
    other.out_of_window_ = 0;
}

Corpus CorpusBuilder::finalize() && {
    Corpus corpus;
    corpus.window = window_;
    corpus.totals.out_of_window = out_of_window_;
    corpus.timelines.reserve(times_.size());
    for (auto& [key, ts] : times_) {
        std::sort(ts.begin(), ts.end());
        const std::uint64_t n = ts.size();
        corpus.user_requests[key.user] += n;
        corpus.url_visits[key.url] += n;
        corpus.totals.requests += n;
        corpus.timelines.emplace(key, PairTimeline{key, std::move(ts)});
    }
    corpus.totals.pairs = corpus.timelines.size();
    corpus.totals.distinct_users = corpus.user_requests.size();
    corpus.totals.distinct_urls = corpus.url_visits.size();
    times_.clear();
    return corpus;
}

Corpus build_corpus(std::span<const VisitEvent> events, Window window) {
    CorpusBuilder builder(window);
    for (const auto& e : events) builder.add(e);
    return std::move(builder).finalize();
}

TimelineStats timeline_stats(const PairTimeline& tl) {
    TimelineStats s;
    s.omega_visits = tl.visit_count();
    s.omega_returns = tl.return_count();
    s.span = tl.span();
    if (s.omega_returns > 0) {
        s.mean_interval = static_cast<double>(s.span) / static_cast<double>(s.omega_returns);
        s.tau_omega_product = static_cast<double>(s.span) * static_cast<double>(s.omega_visits) /
                              static_cast<double>(s.omega_returns);
    }
    return s;
}

std::vector<ActivityBin> activity_profile(const PairTimeline& tl, Seconds bin) {
    if (bin <= 0) throw ParamError("activity_profile: bin must be > 0");
    std::vector<ActivityBin> out;
    if (tl.times.empty()) return out;

    const Seconds first_bin = tl.times.front() / bin;
    const Seconds last_bin = tl.times.back() / bin;
    out.resize(static_cast<std::size_t>(last_bin - first_bin + 1));
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i].start = (first_bin + static_cast<Seconds>(i)) * bin;
    for (Seconds t : tl.times) ++out[static_cast<std::size_t>(t / bin - first_bin)].visits;
    return out;
}

}  // namespace revisit
