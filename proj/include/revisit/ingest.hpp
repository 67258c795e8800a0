#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>
#include <variant>

#include "revisit/types.hpp"

namespace revisit {

/// Keyed anonymization of raw identities. The salt (>= 16 bytes) never leaves
/// this object and is accepted from the environment or a file only -- never a
/// command-line argument, which would leak it into shell history.
class AnonymizationKey {
public:
    static AnonymizationKey from_bytes(std::string_view salt);
    static AnonymizationKey from_env(const char* variable = "REVISIT_SALT");
    /// Whole file is the salt; one trailing newline is ignored.
    static AnonymizationKey from_file(const std::string& path);

    /// Keyed hash of host and user agent, truncated to 64 bits.
    UserId user_id(std::string_view host, std::string_view agent) const;
    /// Keyed hash of the request path, truncated to 64 bits.
    UrlId url_id(std::string_view path) const;

private:
    AnonymizationKey() = default;
    std::array<unsigned char, 32> key_{};
};

struct MalformedLine {
    std::string reason;
};

using ParseResult = std::variant<VisitEvent, MalformedLine>;

/// Canonical pre-anonymized format: `t<TAB>user<TAB>url`, ASCII decimal.
ParseResult parse_tsv(std::string_view line);

enum class UrlMode { Full, PathOnly };

/// De-facto standard combined log line: host, identities, [timestamp with
/// zone], "request", status, size, "referer", "agent". Identity derivation:
/// user = hash(host, agent); url = hash(path), query stripped under PathOnly.
ParseResult parse_combined_log(std::string_view line, const AnonymizationKey& key,
                               UrlMode mode = UrlMode::PathOnly);

enum class LogFormat { Tsv, Combined };

struct IngestReport {
    std::uint64_t lines_read{};
    std::uint64_t events_emitted{};
    std::uint64_t malformed_count{};
    std::uint64_t out_of_window_count{};
};

/// Single pass; malformed lines are counted, never fatal. Every line lands in
/// exactly one report bucket. IoError only when the source itself fails.
IngestReport stream_ingest(std::istream& in, LogFormat format, const AnonymizationKey* key,
                           Window window, const std::function<void(const VisitEvent&)>& sink,
                           UrlMode mode = UrlMode::PathOnly);

}  // namespace revisit
