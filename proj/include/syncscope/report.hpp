#ifndef SYNCSCOPE_REPORT_HPP
#define SYNCSCOPE_REPORT_HPP

// Case report. Every evidence source is merged into per-share and per-peer
// dossiers plus one timeline.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "syncscope/artifacts.hpp"
#include "syncscope/json_util.hpp"
#include "syncscope/keys.hpp"
#include "syncscope/wire.hpp"

namespace syncscope {

enum class DiscoveryMethod { Lan, Tracker, Relay, KnownHosts };

inline std::string_view to_string(DiscoveryMethod m) {
    switch (m) {
    case DiscoveryMethod::Lan: return "Lan";
    case DiscoveryMethod::Tracker: return "Tracker";
    case DiscoveryMethod::Relay: return "Relay";
    case DiscoveryMethod::KnownHosts: return "KnownHosts";
    }
    return "Lan";
}

enum class EventSource { Log, Pcap, Registry, Filesystem };

inline std::string_view to_string(EventSource s) {
    switch (s) {
    case EventSource::Log: return "Log";
    case EventSource::Pcap: return "Pcap";
    case EventSource::Registry: return "Registry";
    case EventSource::Filesystem: return "Filesystem";
    }
    return "Log";
}

enum class RegistryVerdict { Installed, UninstalledRemnants, NotPresent };

inline std::string_view to_string(RegistryVerdict v) {
    switch (v) {
    case RegistryVerdict::Installed: return "Installed";
    case RegistryVerdict::UninstalledRemnants: return "UninstalledRemnants";
    case RegistryVerdict::NotPresent: return "NotPresent";
    }
    return "NotPresent";
}

// Installed as soon as one install-only key is present; otherwise any
// remaining catalogued key means leftovers from an uninstall.
inline RegistryVerdict registry_verdict(std::span<const RegistryFinding> findings) {
    bool any = false;
    for (const auto& f : findings) {
        if (f.phase == RegistryPhase::Install) return RegistryVerdict::Installed;
        any = true;
    }
    return any ? RegistryVerdict::UninstalledRemnants : RegistryVerdict::NotPresent;
}

// Points at the input record a fact came from: "sync.log:line 3",
// "capture:packet 12", "AppData/sync.dat:share[0]".
using Reference = std::string;

enum class ShareIdSource { SyncIdFile, SyncDatSecret, DbWalName, Log, Capture };

inline std::string_view to_string(ShareIdSource s) {
    switch (s) {
    case ShareIdSource::SyncIdFile: return "SyncIdFile";
    case ShareIdSource::SyncDatSecret: return "SyncDatSecret";
    case ShareIdSource::DbWalName: return "DbWalName";
    case ShareIdSource::Log: return "Log";
    case ShareIdSource::Capture: return "Capture";
    }
    return "Log";
}

struct ShareTotals {
    std::uint64_t direct = 0;
    std::uint64_t relay = 0;
    friend bool operator==(const ShareTotals&, const ShareTotals&) = default;
};

// Gaps between consecutive multicast pings from one sender for one share,
// pooled over senders. Median is the lower median.
struct PingIntervals {
    std::size_t samples = 0;
    std::int64_t min_us = 0;
    std::int64_t median_us = 0;
    std::int64_t max_us = 0;
    friend bool operator==(const PingIntervals&, const PingIntervals&) = default;
};

struct ShareDossier {
    ShareId share_id;
    // How the ShareId was first established.
    ShareIdSource share_id_source = ShareIdSource::SyncIdFile;
    std::optional<SecretKey> secret;
    KeyClass access_class = KeyClass::Unknown;
    std::optional<std::string> folder_path;
    // Directory holding .SyncID, relative to the scanned root.
    std::optional<std::string> share_root;
    std::optional<RelayShareId> relay_share_id;
    std::vector<FileRecord> file_records;
    std::vector<FileRecord> invalidated_files;
    std::set<PeerId> peers_seen;
    std::set<DiscoveryMethod> discovery_methods_observed;
    std::optional<ShareTotals> totals;
    std::optional<PingIntervals> lan_ping_interval;
    std::vector<std::string> notes;
    std::vector<Reference> references;
};

struct PeerDossier {
    PeerId peer_id;
    std::set<Endpoint> endpoints;
    std::set<ShareId> shares;
    std::set<DiscoveryMethod> discovery_methods_observed;
    std::vector<Reference> references;
};

enum class ClockKind { Capture, LogNaive, RecordEpoch };

inline std::string_view to_string(ClockKind c) {
    switch (c) {
    case ClockKind::Capture: return "capture-utc";
    case ClockKind::LogNaive: return "log-local-zone-unknown";
    case ClockKind::RecordEpoch: return "record-epoch";
    }
    return "capture-utc";
}

struct TimelineEvent {
    std::int64_t timestamp_us = 0;
    EventSource source = EventSource::Log;
    ClockKind clock = ClockKind::Capture;
    std::string description;
    std::optional<ShareId> share;
    std::optional<PeerId> peer;
    std::vector<Reference> references;
};

struct CaseReport {
    std::vector<ShareDossier> shares;
    std::vector<PeerDossier> peers;
    std::vector<TimelineEvent> timeline;
    RegistryVerdict registry_verdict = RegistryVerdict::NotPresent;
    std::vector<RegistryFinding> registry_findings;
    std::vector<std::string> warnings;
    std::vector<std::string> notes;
};

struct CaseInputs {
    ArtifactBundle artifacts;
    std::optional<DissectionResult> traffic;
    // Name used for the capture in references and warnings.
    std::string capture_name = "capture";
};

namespace detail {

inline std::vector<std::string> path_components(std::string_view p) {
    std::vector<std::string> out;
    std::string cur;
    auto flush = [&] {
        if (!cur.empty()) out.push_back(lower(cur));
        cur.clear();
    };
    for (char c : p) {
        if (c == '/' || c == '\\') flush();
        else cur += c;
    }
    flush();
    if (!out.empty() && out.front().size() == 2 && out.front()[1] == ':') out.erase(out.begin());
    return out;
}

inline std::size_t common_tail(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    std::size_t n = 0;
    while (n < a.size() && n < b.size() && a[a.size() - 1 - n] == b[b.size() - 1 - n]) ++n;
    return n;
}

template <class T>
void add_unique(std::vector<T>& v, const T& x) {
    if (std::find(v.begin(), v.end(), x) == v.end()) v.push_back(x);
}

inline std::string timestamp_text(std::int64_t us) {
    std::int64_t s = us / 1000000;
    std::int64_t frac = us % 1000000;
    if (frac < 0) {
        frac += 1000000;
        --s;
    }
    std::string t = NaiveTimestamp::from_epoch_seconds(s).text();
    if (frac != 0) {
        char buf[16];
        std::snprintf(buf, sizeof buf, ".%06lld", static_cast<long long>(frac));
        t += buf;
    }
    return t;
}

class Correlator {
public:
    explicit Correlator(const CaseInputs& in) : in_(in) {}

    CaseReport run() {
        take_share_folders();
        take_sync_dat();
        take_db_wal();
        take_logs();
        take_traffic();
        take_registry();
        for (const auto& w : in_.artifacts.warnings) report_.warnings.push_back(w);
        finish();
        return std::move(report_);
    }

private:
    ShareDossier& share(const ShareId& id, ShareIdSource how) {
        auto [it, inserted] = shares_.try_emplace(id);
        if (inserted) {
            it->second.share_id = id;
            it->second.share_id_source = how;
        }
        return it->second;
    }

    PeerDossier& peer(const PeerId& id) {
        auto [it, inserted] = peers_.try_emplace(id);
        if (inserted) it->second.peer_id = id;
        return it->second;
    }

    // Share whose folder path best matches `path` by trailing components.
    std::optional<ShareId> share_for_folder(std::string_view path) const {
        const auto want = path_components(path);
        std::optional<ShareId> best;
        std::size_t best_len = 0;
        for (const auto& [id, d] : shares_) {
            for (const auto* candidate : {&d.folder_path, &d.share_root}) {
                if (!*candidate) continue;
                const std::size_t n = common_tail(want, path_components(**candidate));
                if (n > best_len) {
                    best_len = n;
                    best = id;
                }
            }
        }
        return best;
    }

    void take_share_folders() {
        for (const auto& f : in_.artifacts.share_folders) {
            if (!f.sync_id) continue;
            auto& d = share(*f.sync_id, ShareIdSource::SyncIdFile);
            d.share_root = f.root;
            add_unique(d.references, (f.root.empty() ? std::string() : f.root + "/") + ".SyncID");
        }
    }

    void take_sync_dat() {
        for (const auto& a : in_.artifacts.sync_dat) {
            for (std::size_t i = 0; i < a.data.shares.size(); ++i) {
                const ShareConfig& c = a.data.shares[i];
                const Reference ref = a.path + ":share[" + std::to_string(i) + "]";

                // Attach to the .SyncID folder whose path ends the same way.
                std::optional<ShareId> id;
                std::size_t best_len = 0;
                const auto want = path_components(c.path);
                for (const auto& f : in_.artifacts.share_folders) {
                    if (!f.sync_id) continue;
                    const std::size_t n = common_tail(want, path_components(f.root));
                    if (n > best_len) {
                        best_len = n;
                        id = f.sync_id;
                    }
                }
                ShareIdSource how = ShareIdSource::SyncIdFile;
                if (!id && c.secret) {
                    id = derive_share_id(*c.secret);
                    how = ShareIdSource::SyncDatSecret;
                }
                if (!id) {
                    report_.warnings.push_back(ref + ": no ShareId could be attached to this share entry");
                    continue;
                }
                auto& d = share(*id, how);
                add_unique(d.references, ref);
                if (how == ShareIdSource::SyncDatSecret && d.share_id_source == ShareIdSource::SyncDatSecret)
                    add_unique(d.notes, std::string("ShareId computed as SHA-1 of the secret; no .SyncID file confirms it"));
                if (c.secret) {
                    if (d.secret && d.secret->raw != c.secret->raw) {
                        report_.warnings.push_back(ref + ": secret differs from the one already recorded for the same ShareId");
                    } else if (!d.secret) {
                        d.secret = c.secret;
                        d.access_class = c.secret->key_class;
                        if (how == ShareIdSource::SyncIdFile && derive_share_id(*c.secret) == *id)
                            add_unique(d.notes, "ShareId equals SHA-1 of the secret (" + ref + ")");
                    }
                }
                if (!d.folder_path) d.folder_path = c.path;
                if (!d.relay_share_id && c.pub_key) d.relay_share_id = c.pub_key;
                if (!d.totals) d.totals = ShareTotals{c.direct_total, c.relay_total};
                for (const auto& p : c.peers) {
                    d.peers_seen.insert(p);
                    auto& pd = peer(p);
                    pd.shares.insert(*id);
                    add_unique(pd.references, ref);
                }
                if (c.last_sync_completed != 0) {
                    TimelineEvent ev;
                    ev.timestamp_us = c.last_sync_completed * 1000000;
                    ev.source = EventSource::Filesystem;
                    ev.clock = ClockKind::RecordEpoch;
                    ev.description = "last sync completed";
                    ev.share = *id;
                    ev.references = {ref};
                    events_.push_back(std::move(ev));
                }
            }
        }
    }

    void take_db_wal() {
        for (const auto& a : in_.artifacts.db_wal) {
            if (!a.share) continue;
            auto& d = share(*a.share, ShareIdSource::DbWalName);
            add_unique(d.references, a.path);
            for (const auto& r : a.scan.records) {
                d.file_records.push_back(r);
                if (r.invalidated) d.invalidated_files.push_back(r);
                if (r.owner) {
                    d.peers_seen.insert(*r.owner);
                    auto& pd = peer(*r.owner);
                    pd.shares.insert(*a.share);
                    add_unique(pd.references, a.path + ":offset " + std::to_string(r.offset));
                }
                if (r.mtime != 0) {
                    TimelineEvent ev;
                    ev.timestamp_us = r.mtime * 1000000;
                    ev.source = EventSource::Filesystem;
                    ev.clock = ClockKind::RecordEpoch;
                    ev.description = "file " + (r.rel_path.empty() ? r.filename : r.rel_path) + " modified" +
                                     (r.invalidated ? " (invalidated)" : "");
                    ev.share = *a.share;
                    ev.references = {a.path + ":offset " + std::to_string(r.offset)};
                    events_.push_back(std::move(ev));
                }
            }
        }
    }

    void take_logs() {
        bool any_timestamp = false;
        for (const auto& a : in_.artifacts.logs) {
            if (a.empty)
                report_.notes.push_back(a.path + ": log present but empty; consistent with an uninstall, not proof of one");
            for (const auto& e : a.events) {
                const Reference ref = a.path + ":line " + std::to_string(e.line_number);
                std::optional<ShareId> sid = e.share;
                if (!sid && e.folder_path) sid = share_for_folder(*e.folder_path);
                if (e.share) {
                    auto& d = share(*e.share, ShareIdSource::Log);
                    add_unique(d.references, ref);
                    if (e.kind == LogEventKind::PingReceived)
                        d.discovery_methods_observed.insert(e.broadcast.value_or(false) ? DiscoveryMethod::Lan
                                                                                        : DiscoveryMethod::KnownHosts);
                    if (e.kind == LogEventKind::BroadcastPingSent) d.discovery_methods_observed.insert(DiscoveryMethod::Lan);
                }
                if (e.peer) {
                    auto& pd = peer(*e.peer);
                    add_unique(pd.references, ref);
                    if (e.endpoint) pd.endpoints.insert(*e.endpoint);
                    if (e.kind == LogEventKind::PingReceived)
                        pd.discovery_methods_observed.insert(e.broadcast.value_or(false) ? DiscoveryMethod::Lan
                                                                                         : DiscoveryMethod::KnownHosts);
                    if (sid) {
                        pd.shares.insert(*sid);
                        auto& d = shares_.at(*sid);
                        d.peers_seen.insert(*e.peer);
                        add_unique(d.references, ref);
                    }
                }
                if (!e.timestamp) continue;
                any_timestamp = true;
                TimelineEvent ev;
                ev.timestamp_us = e.timestamp->epoch_seconds() * 1000000;
                ev.source = EventSource::Log;
                ev.clock = ClockKind::LogNaive;
                ev.description = describe(e);
                ev.share = sid;
                ev.peer = e.peer;
                ev.references = {ref};
                events_.push_back(std::move(ev));
            }
        }
        if (any_timestamp)
            report_.notes.push_back("sync.log times carry no zone and are shown as printed; capture times are UTC; "
                                    "no clock-skew correction has been applied between sources");
    }

    static std::string describe(const SyncLogEvent& e) {
        switch (e.kind) {
        case LogEventKind::ConfigLoaded: return "config file version " + e.config_version.value_or("?") + " loaded";
        case LogEventKind::FolderLoaded: return "folder loaded: " + e.folder_path.value_or("");
        case LogEventKind::PingReceived:
            return "ping received from " + e.endpoint->to_string() + (e.broadcast.value_or(false) ? " (broadcast)" : "");
        case LogEventKind::PeerFound:
            return "peer found at " + e.endpoint->to_string() + " for folder " + e.folder_path.value_or("") +
                   (e.direct.value_or(false) ? " (direct)" : " (not direct)");
        case LogEventKind::BroadcastPingSent: return "broadcast ping sent";
        case LogEventKind::TrackerRequested: return "peers requested from tracker";
        case LogEventKind::Unrecognised: return "unrecognised log line";
        }
        return "unrecognised log line";
    }

    void take_traffic() {
        if (!in_.traffic) return;
        const DissectionResult& t = *in_.traffic;
        const std::string& cap = in_.capture_name;
        for (const auto& e : t.errors) report_.warnings.push_back(cap + ": " + e);
        for (const auto& f : t.relay_flows)
            if (f.error) report_.warnings.push_back(cap + ": relay flow " + f.a.to_string() + " <-> " + f.b.to_string() + ": " + *f.error);

        for (const auto& m : t.messages) {
            const Reference ref = cap + ":packet " + std::to_string(m.ctx.index);
            TimelineEvent ev;
            ev.timestamp_us = m.ctx.timestamp_us;
            ev.source = EventSource::Pcap;
            ev.clock = ClockKind::Capture;
            ev.references = {ref};
            const std::string route = m.ctx.src().to_string() + " -> " + m.ctx.dst().to_string();
            bool keep = true;
            std::visit(
                [&](const auto& msg) {
                    using T = std::decay_t<decltype(msg)>;
                    if constexpr (std::is_same_v<T, LanPing>) {
                        auto& d = share(msg.share, ShareIdSource::Capture);
                        d.discovery_methods_observed.insert(msg.multicast ? DiscoveryMethod::Lan : DiscoveryMethod::KnownHosts);
                        if (msg.multicast) ping_times_[{msg.share, m.ctx.src()}].push_back(m.ctx.timestamp_us);
                        add_unique(d.references, ref);
                        ev.description = std::string(msg.multicast ? "LAN ping " : "known-host ping ") + route +
                                         " advertising " + msg.advertised.to_string();
                        ev.share = msg.share;
                        ev.peer = msg.peer;
                    } else if constexpr (std::is_same_v<T, LanPong>) {
                        ev.description = "LAN ping reply " + route;
                        ev.peer = msg.peer;
                    } else if constexpr (std::is_same_v<T, TrackerGetPeers>) {
                        auto& d = share(msg.share, ShareIdSource::Capture);
                        d.discovery_methods_observed.insert(DiscoveryMethod::Tracker);
                        add_unique(d.references, ref);
                        ev.description = "tracker get_peers " + route + " advertising " + msg.la.to_string();
                        ev.share = msg.share;
                        ev.peer = msg.peer;
                    } else if constexpr (std::is_same_v<T, TrackerPeersResponse>) {
                        for (const auto& e : msg.entries) {
                            auto& d = share(e.share, ShareIdSource::Capture);
                            d.discovery_methods_observed.insert(DiscoveryMethod::Tracker);
                            add_unique(d.references, ref);
                        }
                        ev.description = "tracker response " + route + " listing " + std::to_string(msg.entries.size()) + " peer(s)";
                        if (msg.entries.size() == 1) ev.share = msg.entries.front().share;
                    } else if constexpr (std::is_same_v<T, RelayPing>) {
                        ev.description = "relay ping " + route;
                        ev.peer = msg.peer;
                        bool matched = false;
                        for (auto& [id, d] : shares_) {
                            if (d.relay_share_id && *d.relay_share_id == msg.share32) {
                                d.discovery_methods_observed.insert(DiscoveryMethod::Relay);
                                add_unique(d.references, ref);
                                ev.share = id;
                                matched = true;
                            }
                        }
                        if (!matched) add_unique(unmatched_relay_, msg.share32.hex());
                    } else if constexpr (std::is_same_v<T, RelayNonce>) {
                        ev.description = "relay nonce " + route;
                    } else if constexpr (std::is_same_v<T, PublicKeyMessage>) {
                        ev.description = "relay public key " + route;
                    } else {
                        keep = false;
                    }
                },
                m.message);
            if (keep) events_.push_back(std::move(ev));
        }

        for (const auto& o : extract_peer_observations(t.messages)) {
            const Reference ref = cap + ":packet " + std::to_string(o.packet_index);
            auto& pd = peer(o.peer);
            pd.endpoints.insert(o.endpoint);
            add_unique(pd.references, ref);
            std::optional<ShareId> sid = o.share;
            if (!sid && o.share32) {
                for (const auto& [id, d] : shares_)
                    if (d.relay_share_id && *d.relay_share_id == *o.share32) sid = id;
            }
            switch (o.source) {
            case ObservationSource::Lan: pd.discovery_methods_observed.insert(DiscoveryMethod::Lan); break;
            case ObservationSource::Tracker: pd.discovery_methods_observed.insert(DiscoveryMethod::Tracker); break;
            case ObservationSource::Relay: pd.discovery_methods_observed.insert(DiscoveryMethod::Relay); break;
            }
            if (sid) {
                pd.shares.insert(*sid);
                auto& d = share(*sid, ShareIdSource::Capture);
                d.peers_seen.insert(o.peer);
            }
        }
        std::map<ShareId, std::vector<std::int64_t>> gaps;
        for (auto& [key, times] : ping_times_) {
            std::sort(times.begin(), times.end());
            for (std::size_t i = 1; i < times.size(); ++i) gaps[key.first].push_back(times[i] - times[i - 1]);
        }
        for (auto& [id, g] : gaps) {
            if (g.empty()) continue;
            std::sort(g.begin(), g.end());
            shares_.at(id).lan_ping_interval = PingIntervals{g.size(), g.front(), g[(g.size() - 1) / 2], g.back()};
        }
        for (const auto& h : unmatched_relay_)
            report_.notes.push_back(cap + ": relay share " + h + " matches no sync.dat pub_key");
    }

    void take_registry() {
        for (const auto& r : in_.artifacts.registry)
            for (const auto& f : r.findings) report_.registry_findings.push_back(f);
        report_.registry_verdict = registry_verdict(report_.registry_findings);
    }

    void finish() {
        for (auto& [id, d] : shares_) report_.shares.push_back(std::move(d));
        for (auto& [id, p] : peers_) report_.peers.push_back(std::move(p));
        std::stable_sort(events_.begin(), events_.end(), [](const TimelineEvent& a, const TimelineEvent& b) {
            return std::tie(a.timestamp_us, a.source) < std::tie(b.timestamp_us, b.source);
        });
        report_.timeline = std::move(events_);
    }

    const CaseInputs& in_;
    CaseReport report_;
    std::map<ShareId, ShareDossier> shares_;
    std::map<PeerId, PeerDossier> peers_;
    std::vector<TimelineEvent> events_;
    std::vector<std::string> unmatched_relay_;
    std::map<std::pair<ShareId, Endpoint>, std::vector<std::int64_t>> ping_times_;
};

} // namespace detail

inline CaseReport correlate(const CaseInputs& inputs) { return detail::Correlator(inputs).run(); }

inline std::vector<TimelineEvent> build_timeline(const CaseInputs& inputs) { return correlate(inputs).timeline; }

// ---------------------------------------------------------------------------
// Rendering

enum class ReportFormat { Json, Text };

inline constexpr int kReportSchemaVersion = 1;

namespace detail {

template <class Set>
Json names_json(const Set& s) {
    Json a = Json::array();
    for (const auto& x : s) a.push_back(std::string(to_string(x)));
    return a;
}

template <class Set>
Json hex_json(const Set& s) {
    Json a = Json::array();
    for (const auto& x : s) a.push_back(x.hex());
    return a;
}

} // namespace detail

inline Json report_json(const CaseReport& r) {
    Json j;
    j["schema_version"] = kReportSchemaVersion;
    j["registry_verdict"] = std::string(to_string(r.registry_verdict));
    j["shares"] = Json::array();
    for (const auto& d : r.shares) {
        Json s;
        s["share_id"] = d.share_id.hex();
        s["share_id_source"] = std::string(to_string(d.share_id_source));
        s["secret"] = d.secret ? Json(d.secret->raw) : Json(nullptr);
        s["access_class"] = std::string(to_string(d.access_class));
        s["folder_path"] = d.folder_path ? bytes_json(*d.folder_path) : Json(nullptr);
        s["share_root"] = d.share_root ? bytes_json(*d.share_root) : Json(nullptr);
        s["relay_share_id"] = d.relay_share_id ? Json(d.relay_share_id->hex()) : Json(nullptr);
        s["discovery_methods_observed"] = detail::names_json(d.discovery_methods_observed);
        s["peers_seen"] = detail::hex_json(d.peers_seen);
        s["totals"] = d.totals ? Json{{"direct", d.totals->direct}, {"relay", d.totals->relay}} : Json(nullptr);
        if (const auto& p = d.lan_ping_interval)
            s["lan_ping_interval"] = {{"samples", p->samples}, {"min_us", p->min_us}, {"median_us", p->median_us}, {"max_us", p->max_us}};
        else
            s["lan_ping_interval"] = nullptr;
        s["file_records"] = Json::array();
        for (const auto& f : d.file_records) s["file_records"].push_back(file_record_json(f));
        s["invalidated_files"] = Json::array();
        for (const auto& f : d.invalidated_files) s["invalidated_files"].push_back(file_record_json(f));
        s["notes"] = d.notes;
        s["references"] = d.references;
        j["shares"].push_back(std::move(s));
    }
    j["peers"] = Json::array();
    for (const auto& p : r.peers) {
        Json o;
        o["peer_id"] = p.peer_id.hex();
        o["endpoints"] = Json::array();
        for (const auto& e : p.endpoints) o["endpoints"].push_back(e.to_string());
        o["shares"] = detail::hex_json(p.shares);
        o["discovery_methods_observed"] = detail::names_json(p.discovery_methods_observed);
        o["references"] = p.references;
        j["peers"].push_back(std::move(o));
    }
    j["timeline"] = Json::array();
    for (const auto& e : r.timeline) {
        Json o;
        o["timestamp_us"] = e.timestamp_us;
        o["time"] = detail::timestamp_text(e.timestamp_us);
        o["clock"] = std::string(to_string(e.clock));
        o["source"] = std::string(to_string(e.source));
        o["description"] = bytes_json(e.description);
        o["share"] = e.share ? Json(e.share->hex()) : Json(nullptr);
        o["peer"] = e.peer ? Json(e.peer->hex()) : Json(nullptr);
        o["references"] = e.references;
        j["timeline"].push_back(std::move(o));
    }
    j["registry_findings"] = Json::array();
    for (const auto& f : r.registry_findings) j["registry_findings"].push_back(registry_finding_json(f));
    j["warnings"] = r.warnings;
    j["notes"] = r.notes;
    return j;
}

// The text form names each share's hex id once, in the header; the body
// refers to shares as "share #N".
inline std::string report_text(const CaseReport& r) {
    std::map<ShareId, std::size_t> number;
    for (std::size_t i = 0; i < r.shares.size(); ++i) number[r.shares[i].share_id] = i + 1;
    auto share_ref = [&](const ShareId& id) {
        auto it = number.find(id);
        return it == number.end() ? std::string("share ?") : "share #" + std::to_string(it->second);
    };

    std::string out = "Case report (schema " + std::to_string(kReportSchemaVersion) + ")\n";
    out += "Shares:";
    if (r.shares.empty()) out += " none";
    for (std::size_t i = 0; i < r.shares.size(); ++i)
        out += "\n  #" + std::to_string(i + 1) + " " + r.shares[i].share_id.hex();
    out += "\nRegistry verdict: " + std::string(to_string(r.registry_verdict)) + "\n";

    for (std::size_t i = 0; i < r.shares.size(); ++i) {
        const auto& d = r.shares[i];
        out += "\nShare #" + std::to_string(i + 1) + "\n";
        out += "  access class: " + std::string(to_string(d.access_class)) + "\n";
        if (d.folder_path) out += "  folder: " + *d.folder_path + "\n";
        out += "  discovery:";
        if (d.discovery_methods_observed.empty()) out += " none observed";
        for (auto m : d.discovery_methods_observed) out += " " + std::string(to_string(m));
        out += "\n  files: " + std::to_string(d.file_records.size()) + " (" + std::to_string(d.invalidated_files.size()) +
               " invalidated)\n";
        for (const auto& f : d.invalidated_files)
            out += "    invalidated: " + (f.rel_path.empty() ? f.filename : f.rel_path) + "\n";
        out += "  peers seen: " + std::to_string(d.peers_seen.size()) + "\n";
        if (d.totals)
            out += "  totals: direct " + std::to_string(d.totals->direct) + " B, relay " + std::to_string(d.totals->relay) + " B\n";
        if (const auto& p = d.lan_ping_interval) {
            char buf[128];
            std::snprintf(buf, sizeof buf, "  LAN ping interval: median %.3f s over %zu gap(s), range %.3f-%.3f s\n",
                          static_cast<double>(p->median_us) / 1e6, p->samples, static_cast<double>(p->min_us) / 1e6,
                          static_cast<double>(p->max_us) / 1e6);
            out += buf;
        }
        for (const auto& n : d.notes) out += "  note: " + n + "\n";
    }

    if (!r.peers.empty()) out += "\nPeers\n";
    for (const auto& p : r.peers) {
        out += "  " + p.peer_id.hex();
        for (const auto& e : p.endpoints) out += " " + e.to_string();
        for (const auto& s : p.shares) out += " [" + share_ref(s) + "]";
        out += "\n";
    }

    if (!r.timeline.empty()) out += "\nTimeline\n";
    for (const auto& e : r.timeline) {
        out += "  " + detail::timestamp_text(e.timestamp_us) + " " + std::string(to_string(e.source)) + ": " + e.description;
        if (e.share) out += " [" + share_ref(*e.share) + "]";
        out += "\n";
    }

    if (!r.registry_findings.empty()) out += "\nRegistry\n";
    for (const auto& f : r.registry_findings) {
        out += "  [" + std::string(to_string(f.phase)) + "] " + f.key_path;
        if (f.value) out += " = " + *f.value;
        out += "\n";
    }
    if (!r.warnings.empty()) out += "\nWarnings\n";
    for (const auto& w : r.warnings) out += "  " + w + "\n";
    if (!r.notes.empty()) out += "\nNotes\n";
    for (const auto& n : r.notes) out += "  " + n + "\n";
    return out;
}

inline std::string render_report(const CaseReport& r, ReportFormat format) {
    if (format == ReportFormat::Text) return report_text(r);
    return dump_json(report_json(r));
}

// ---------------------------------------------------------------------------
// Dissection output for the `pcap` subcommand

inline Json wire_message_json(const WireMessage& m) {
    Json j;
    j["type"] = std::string(message_kind(m));
    std::visit(
        [&](const auto& msg) {
            using T = std::decay_t<decltype(msg)>;
            if constexpr (std::is_same_v<T, LanPing>) {
                j["la"] = msg.advertised.to_string();
                j["share"] = msg.share.hex();
                j["peer"] = msg.peer ? Json(msg.peer->hex()) : Json(nullptr);
                j["multicast"] = msg.multicast;
                j["extras"] = bvalue_json(BValue(msg.extras));
            } else if constexpr (std::is_same_v<T, LanPong>) {
                j["peer"] = msg.peer.hex();
            } else if constexpr (std::is_same_v<T, TrackerGetPeers>) {
                j["la"] = msg.la.to_string();
                j["peer"] = msg.peer.hex();
                j["share"] = msg.share.hex();
                j["extras"] = bvalue_json(BValue(msg.extras));
            } else if constexpr (std::is_same_v<T, TrackerPeersResponse>) {
                j["entries"] = Json::array();
                for (const auto& e : msg.entries)
                    j["entries"].push_back({{"endpoint", e.endpoint.to_string()}, {"peer", e.peer.hex()}, {"share", e.share.hex()}});
            } else if constexpr (std::is_same_v<T, RelayPing>) {
                j["peer"] = msg.peer.hex();
                j["share32"] = msg.share32.hex();
                j["extras"] = bvalue_json(BValue(msg.extras));
            } else if constexpr (std::is_same_v<T, RelayNonce>) {
                j["nonce"] = msg.nonce.hex();
                j["have"] = hex_upper(msg.have_map);
            } else if constexpr (std::is_same_v<T, PublicKeyMessage>) {
                j["key"] = msg.key.hex();
            } else {
                j["length"] = msg.length;
            }
        },
        m);
    return j;
}

inline Json dissection_json(const Capture& cap, const DissectionResult& d) {
    Json j;
    j["schema_version"] = kReportSchemaVersion;
    j["records"] = cap.total_records;
    j["udp_datagrams"] = cap.packets.size();
    j["skipped_non_udp"] = cap.skipped_non_udp;
    j["skipped_malformed"] = cap.skipped_malformed;
    j["unclassified"] = d.unclassified;
    j["messages"] = Json::array();
    for (const auto& m : d.messages) {
        Json o;
        o["packet"] = m.ctx.index;
        o["timestamp_us"] = m.ctx.timestamp_us;
        o["src"] = m.ctx.src().to_string();
        o["dst"] = m.ctx.dst().to_string();
        o["message"] = wire_message_json(m.message);
        j["messages"].push_back(std::move(o));
    }
    j["relay_flows"] = Json::array();
    for (const auto& f : d.relay_flows) {
        Json o;
        o["a"] = f.a.to_string();
        o["b"] = f.b.to_string();
        o["packets"] = f.packet_indices;
        if (f.session) {
            o["complete"] = f.session->complete();
            o["peer"] = f.session->peer ? Json(f.session->peer->hex()) : Json(nullptr);
            o["share32"] = f.session->share32 ? Json(f.session->share32->hex()) : Json(nullptr);
            o["encrypted_packets"] = f.session->encrypted_packets;
        }
        o["error"] = f.error ? Json(*f.error) : Json(nullptr);
        j["relay_flows"].push_back(std::move(o));
    }
    j["peer_observations"] = Json::array();
    for (const auto& o : extract_peer_observations(d.messages)) {
        j["peer_observations"].push_back({{"peer", o.peer.hex()},
                                          {"share", o.share ? Json(o.share->hex()) : Json(nullptr)},
                                          {"share32", o.share32 ? Json(o.share32->hex()) : Json(nullptr)},
                                          {"endpoint", o.endpoint.to_string()},
                                          {"timestamp_us", o.timestamp_us},
                                          {"packet", o.packet_index},
                                          {"source", std::string(to_string(o.source))}});
    }
    j["errors"] = d.errors;
    return j;
}

} // namespace syncscope

#endif // SYNCSCOPE_REPORT_HPP
