#ifndef SYNCSCOPE_SYNC_LOG_HPP
#define SYNCSCOPE_SYNC_LOG_HPP

// sync.log line grammar. Every line becomes exactly one event; lines that
// match no known grammar come back as Unrecognised with the text intact.

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

#include "syncscope/endpoint.hpp"
#include "syncscope/keys.hpp"

namespace syncscope {

// Wall-clock time as printed in the log. The log carries no zone, so this
// is kept naive; epoch_seconds() treats it as if it were UTC.
struct NaiveTimestamp {
    int year = 1970, month = 1, day = 1, hour = 0, minute = 0, second = 0;

    std::int64_t epoch_seconds() const {
        using namespace std::chrono;
        const sys_days d{std::chrono::year{year} / month / day};
        return static_cast<std::int64_t>(d.time_since_epoch().count()) * 86400 + hour * 3600 + minute * 60 + second;
    }

    std::string text() const {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%04d-%02d-%02d %02d:%02d:%02d", year, month, day, hour, minute, second);
        return buf;
    }

    static NaiveTimestamp from_epoch_seconds(std::int64_t s) {
        using namespace std::chrono;
        std::int64_t days = s / 86400;
        std::int64_t rem = s % 86400;
        if (rem < 0) {
            rem += 86400;
            --days;
        }
        const year_month_day ymd{sys_days{std::chrono::days{days}}};
        return {int(ymd.year()), int(unsigned(ymd.month())), int(unsigned(ymd.day())), int(rem / 3600),
                int(rem % 3600 / 60), int(rem % 60)};
    }

    friend auto operator<=>(const NaiveTimestamp&, const NaiveTimestamp&) = default;
};

enum class LogEventKind {
    ConfigLoaded,
    FolderLoaded,
    PingReceived,
    PeerFound,
    BroadcastPingSent,
    TrackerRequested,
    Unrecognised
};

inline std::string_view to_string(LogEventKind k) {
    switch (k) {
    case LogEventKind::ConfigLoaded: return "ConfigLoaded";
    case LogEventKind::FolderLoaded: return "FolderLoaded";
    case LogEventKind::PingReceived: return "PingReceived";
    case LogEventKind::PeerFound: return "PeerFound";
    case LogEventKind::BroadcastPingSent: return "BroadcastPingSent";
    case LogEventKind::TrackerRequested: return "TrackerRequested";
    case LogEventKind::Unrecognised: return "Unrecognised";
    }
    return "Unrecognised";
}

struct SyncLogEvent {
    std::optional<NaiveTimestamp> timestamp;
    LogEventKind kind = LogEventKind::Unrecognised;
    std::optional<ShareId> share;
    std::optional<PeerId> peer;
    std::optional<Endpoint> endpoint;
    std::optional<std::string> folder_path;
    std::optional<bool> direct;
    std::optional<bool> broadcast;
    std::optional<std::string> config_version;
    // The line exactly as read, minus its '\n'.
    std::string raw_line;
    std::size_t line_number = 0;

    friend bool operator==(const SyncLogEvent&, const SyncLogEvent&) = default;
};

namespace detail {

struct LogGrammar {
    std::regex stamp{R"(^\[(\d{4})-(\d{2})-(\d{2}) (\d{2}):(\d{2}):(\d{2})\] (.*)$)"};
    std::regex config{R"(^Loading config file version (\S+)$)"};
    std::regex folder{R"(^Loaded folder (.+)$)"};
    std::regex ping{
        R"(^Got ping \(broadcast: (\d+)\) from peer (\d{1,3}\.\d{1,3}\.\d{1,3}\.\d{1,3}:\d{1,5}) \(([0-9A-Fa-f]{40})\) for share ([0-9A-Fa-f]{40})$)"};
    std::regex found{
        R"(^Found peer for folder (.+) ([0-9A-Fa-f]{40}) (\d{1,3}\.\d{1,3}\.\d{1,3}\.\d{1,3}:\d{1,5}) direct:(\d+)$)"};
    std::regex broadcast{R"(^Sending broadcast ping for share ([0-9A-Fa-f]{40})$)"};
    std::regex tracker{R"(^Requesting peers from server$)"};
};

inline const LogGrammar& log_grammar() {
    static const LogGrammar g;
    return g;
}

inline std::optional<NaiveTimestamp> make_timestamp(const std::smatch& m) {
    NaiveTimestamp t{std::stoi(m[1]), std::stoi(m[2]), std::stoi(m[3]),
                     std::stoi(m[4]), std::stoi(m[5]), std::stoi(m[6])};
    const std::chrono::year_month_day ymd{std::chrono::year{t.year}, std::chrono::month{unsigned(t.month)},
                                          std::chrono::day{unsigned(t.day)}};
    if (!ymd.ok() || t.hour > 23 || t.minute > 59 || t.second > 60) return std::nullopt;
    return t;
}

// Fills `ev` from the message part of a line; false if no grammar matches
// or a matched field is out of range.
inline bool parse_log_message(const std::string& msg, SyncLogEvent& ev) {
    const auto& g = log_grammar();
    std::smatch m;
    if (std::regex_match(msg, m, g.config)) {
        ev.kind = LogEventKind::ConfigLoaded;
        ev.config_version = m[1];
        return true;
    }
    if (std::regex_match(msg, m, g.ping)) {
        auto ep = Endpoint::parse(m[2].str());
        if (!ep) return false;
        ev.kind = LogEventKind::PingReceived;
        ev.broadcast = m[1].str() != "0";
        ev.endpoint = ep;
        ev.peer = PeerId::from_hex(m[3].str());
        ev.share = ShareId::from_hex(m[4].str());
        return true;
    }
    if (std::regex_match(msg, m, g.found)) {
        auto ep = Endpoint::parse(m[3].str());
        if (!ep) return false;
        ev.kind = LogEventKind::PeerFound;
        ev.folder_path = m[1];
        ev.peer = PeerId::from_hex(m[2].str());
        ev.endpoint = ep;
        ev.direct = m[4].str() != "0";
        return true;
    }
    if (std::regex_match(msg, m, g.broadcast)) {
        ev.kind = LogEventKind::BroadcastPingSent;
        ev.share = ShareId::from_hex(m[1].str());
        return true;
    }
    if (std::regex_match(msg, m, g.tracker)) {
        ev.kind = LogEventKind::TrackerRequested;
        return true;
    }
    if (std::regex_match(msg, m, g.folder)) {
        ev.kind = LogEventKind::FolderLoaded;
        ev.folder_path = m[1];
        return true;
    }
    return false;
}

} // namespace detail

inline constexpr std::size_t kMaxLogLineLength = 4096;

inline SyncLogEvent parse_sync_log_line(std::string_view raw, std::size_t line_number = 0) {
    SyncLogEvent ev;
    ev.raw_line = std::string(raw);
    ev.line_number = line_number;
    std::string line(raw);
    if (!line.empty() && line.back() == '\r') line.pop_back();

    // std::regex backtracks recursively; very long lines are not log
    // records anyway.
    if (line.size() > kMaxLogLineLength) return ev;
    std::smatch m;
    if (!std::regex_match(line, m, detail::log_grammar().stamp)) return ev;
    auto ts = detail::make_timestamp(m);
    if (!ts) return ev;
    SyncLogEvent parsed = ev;
    parsed.timestamp = ts;
    if (!detail::parse_log_message(m[7].str(), parsed)) {
        // Timestamp is still useful for the timeline even when the message
        // is unknown.
        ev.timestamp = ts;
        return ev;
    }
    return parsed;
}

// Events come back in file order, one per line. A final line without a
// trailing newline is still a line; the empty remainder after a final
// newline is not.
inline std::vector<SyncLogEvent> parse_sync_log(std::string_view input) {
    std::vector<SyncLogEvent> out;
    std::size_t line_no = 0;
    while (!input.empty()) {
        const auto nl = input.find('\n');
        out.push_back(parse_sync_log_line(input.substr(0, nl), ++line_no));
        input.remove_prefix(nl == std::string_view::npos ? input.size() : nl + 1);
    }
    return out;
}

} // namespace syncscope

#endif // SYNCSCOPE_SYNC_LOG_HPP
