#ifndef SYNCSCOPE_ARTIFACTS_HPP
#define SYNCSCOPE_ARTIFACTS_HPP

// Walks a mounted image (or any directory) and parses every client artifact
// it recognises. Files are recognised by name only, so the mount prefix and
// the user profile layout do not matter.

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "syncscope/db_wal.hpp"
#include "syncscope/json_util.hpp"
#include "syncscope/keys.hpp"
#include "syncscope/registry.hpp"
#include "syncscope/share_folder.hpp"
#include "syncscope/sync_dat.hpp"
#include "syncscope/sync_log.hpp"

namespace syncscope {

class ReadError : public Error {
public:
    explicit ReadError(const std::string& path) : Error("cannot read " + path) {}
};

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw ReadError(p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw ReadError(p.string());
    return ss.str();
}

// Paths below are relative to the scanned root, '/'-separated.

struct SyncDatArtifact {
    std::string path;
    SyncDat data;
};

struct SettingsArtifact {
    std::string path;
    SettingsDat data;
};

struct DbWalArtifact {
    std::string path;
    // From the `<ShareID>.db-wal` file name, when it has that shape.
    std::optional<ShareId> share;
    DbWalScan scan;
};

struct SyncLogArtifact {
    std::string path;
    std::vector<SyncLogEvent> events;
    bool empty = false;
};

struct ShareFolderArtifact {
    // Directory holding .SyncID ("" when it is the scanned root itself).
    std::string root;
    std::optional<ShareId> sync_id;
    std::vector<std::string> ignore_patterns;
    ShareFolderSummary summary;
};

struct RegistryArtifact {
    std::string path;
    std::vector<RegistryFinding> findings;
};

struct ArtifactBundle {
    std::vector<SyncDatArtifact> sync_dat;
    std::vector<SettingsArtifact> settings;
    std::vector<DbWalArtifact> db_wal;
    std::vector<SyncLogArtifact> logs;
    std::vector<ShareFolderArtifact> share_folders;
    std::vector<RegistryArtifact> registry;
    // Other recognised application files (SQLite databases, language file,
    // executable), listed without parsing.
    std::vector<std::string> other_files;
    // Every entry starts with the path of the file it concerns.
    std::vector<std::string> warnings;
};

enum class ArtifactKind { None, SyncDat, SettingsDat, DbWal, SyncLog, SyncId, SyncIgnore, Inventory };

namespace detail {

inline std::string lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

inline bool is_hex40(std::string_view s) {
    return s.size() == 40 && std::all_of(s.begin(), s.end(), [](char c) { return std::isxdigit(static_cast<unsigned char>(c)); });
}

inline bool ends_with(std::string_view s, std::string_view suffix) {
    return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

} // namespace detail

inline ArtifactKind recognise_artifact(std::string_view file_name) {
    const std::string n = detail::lower(file_name);
    if (n == "sync.dat" || n == "sync.dat.old" || n == "sync.dat.new") return ArtifactKind::SyncDat;
    if (n == "settings.dat" || n == "settings.dat.old" || n == "settings.dat.new") return ArtifactKind::SettingsDat;
    if (n == "sync.log") return ArtifactKind::SyncLog;
    if (n == ".syncid") return ArtifactKind::SyncId;
    if (n == ".syncignore") return ArtifactKind::SyncIgnore;
    if (detail::ends_with(n, ".db-wal") && detail::is_hex40(n.substr(0, n.size() - 7))) return ArtifactKind::DbWal;
    for (std::string_view ext : {".db", ".db-shm", ".db-journal"}) {
        if (detail::ends_with(n, ext) && detail::is_hex40(n.substr(0, n.size() - ext.size())))
            return ArtifactKind::Inventory;
    }
    if (n == "sync.lng" || n == "btsync.exe") return ArtifactKind::Inventory;
    return ArtifactKind::None;
}

// Parses one recognised file into the bundle. Parse failures become
// warnings prefixed with the path.
inline void add_artifact(ArtifactBundle& b, ArtifactKind kind, const std::string& path, std::string_view content) {
    auto warn = [&](const std::string& msg) { b.warnings.push_back(path + ": " + msg); };
    try {
        switch (kind) {
        case ArtifactKind::SyncDat: {
            SyncDatArtifact a{path, parse_sync_dat(content)};
            for (const auto& w : a.data.warnings) warn(w);
            b.sync_dat.push_back(std::move(a));
            break;
        }
        case ArtifactKind::SettingsDat: b.settings.push_back({path, parse_settings_dat(content)}); break;
        case ArtifactKind::DbWal: {
            DbWalArtifact a;
            a.path = path;
            const auto slash = path.rfind('/');
            const std::string name = path.substr(slash == std::string::npos ? 0 : slash + 1);
            a.share = ShareId::from_hex(name.substr(0, 40));
            a.scan = parse_db_wal(content);
            for (const auto& w : a.scan.warnings) warn(w);
            b.db_wal.push_back(std::move(a));
            break;
        }
        case ArtifactKind::SyncLog: {
            SyncLogArtifact a{path, parse_sync_log(content), content.empty()};
            b.logs.push_back(std::move(a));
            break;
        }
        case ArtifactKind::Inventory: b.other_files.push_back(path); break;
        case ArtifactKind::SyncId:
        case ArtifactKind::SyncIgnore:
        case ArtifactKind::None: break;
        }
    } catch (const Error& e) {
        warn(e.what());
    }
}

inline void add_registry_export(ArtifactBundle& b, const std::string& path, std::string_view content) {
    try {
        b.registry.push_back({path, parse_registry_export(content)});
    } catch (const Error& e) {
        b.warnings.push_back(path + ": " + e.what());
    }
}

// Directory containing `path`, "" for the root.
inline std::string parent_of(std::string_view path) {
    const auto slash = path.rfind('/');
    return slash == std::string_view::npos ? std::string() : std::string(path.substr(0, slash));
}

inline ArtifactBundle scan_artifacts(const std::filesystem::path& root) {
    namespace fs = std::filesystem;
    std::error_code ec;
    if (!fs::is_directory(root, ec)) throw ReadError(root.string());

    struct Entry {
        std::string rel;
        fs::path full;
        std::uint64_t size;
    };
    std::vector<Entry> files;
    ArtifactBundle bundle;
    fs::recursive_directory_iterator it(root, fs::directory_options::skip_permission_denied, ec);
    if (ec) throw ReadError(root.string());
    for (; it != fs::recursive_directory_iterator(); it.increment(ec)) {
        if (ec) {
            bundle.warnings.push_back(root.generic_string() + ": directory walk stopped: " + ec.message());
            break;
        }
        std::error_code fe;
        if (!it->is_regular_file(fe)) continue;
        const auto size = it->file_size(fe);
        files.push_back({it->path().lexically_relative(root).generic_string(), it->path(), fe ? 0 : size});
    }
    std::sort(files.begin(), files.end(), [](const Entry& a, const Entry& b) { return a.rel < b.rel; });

    std::map<std::string, ShareFolderArtifact> roots;
    for (const auto& f : files) {
        const auto slash = f.rel.rfind('/');
        const std::string name = f.rel.substr(slash == std::string::npos ? 0 : slash + 1);
        const ArtifactKind kind = recognise_artifact(name);
        if (kind == ArtifactKind::None) continue;
        std::string content;
        try {
            content = read_file(f.full);
        } catch (const ReadError&) {
            bundle.warnings.push_back(f.rel + ": unreadable");
            continue;
        }
        if (kind == ArtifactKind::SyncId) {
            auto& r = roots[parent_of(f.rel)];
            r.root = parent_of(f.rel);
            try {
                r.sync_id = parse_sync_id(content);
            } catch (const WrongLength& e) {
                bundle.warnings.push_back(f.rel + ": " + e.what());
            }
        } else if (kind == ArtifactKind::SyncIgnore) {
            auto& r = roots[parent_of(f.rel)];
            r.root = parent_of(f.rel);
            r.ignore_patterns = parse_sync_ignore(content);
        } else {
            add_artifact(bundle, kind, f.rel, content);
        }
    }

    // Directory listing of each share root, for the control-file summary.
    for (auto& [dir, share] : roots) {
        std::vector<FolderEntry> listing;
        const std::string prefix = dir.empty() ? std::string() : dir + "/";
        for (const auto& f : files) {
            if (f.rel.compare(0, prefix.size(), prefix) == 0) listing.push_back({f.rel.substr(prefix.size()), f.size});
        }
        share.summary = scan_share_folder(std::span<const FolderEntry>(listing));
        if (share.summary.is_share_root) bundle.share_folders.push_back(std::move(share));
    }
    return bundle;
}

// ---------------------------------------------------------------------------
// JSON

inline Json share_config_json(const ShareConfig& c) {
    Json j;
    j["path"] = bytes_json(c.path);
    j["secret"] = bytes_json(c.secret_raw);
    j["access_class"] = c.secret ? std::string(to_string(c.secret->key_class)) : std::string("Unknown");
    j["pub_key"] = c.pub_key ? Json(c.pub_key->hex()) : Json(nullptr);
    j["stopped_by_user"] = c.stopped_by_user;
    j["use_dht"] = c.use_dht;
    j["use_lan_broadcast"] = c.use_lan_broadcast;
    j["use_relay"] = c.use_relay;
    j["use_tracker"] = c.use_tracker;
    j["use_known_hosts"] = c.use_known_hosts;
    j["known_hosts"] = Json::array();
    for (const auto& h : c.known_hosts) j["known_hosts"].push_back(bytes_json(h));
    j["peers"] = Json::array();
    for (const auto& p : c.peers) j["peers"].push_back(p.hex());
    j["last_sync_completed"] = c.last_sync_completed;
    j["invites"] = Json::array();
    for (const auto& i : c.invites) j["invites"].push_back(bytes_json(i));
    j["folder_type"] = c.folder_type;
    j["delete_to_trash"] = c.delete_to_trash;
    j["mutex_file_initialized"] = c.mutex_file_initialized;
    j["direct_total"] = c.direct_total;
    j["relay_total"] = c.relay_total;
    j["extras"] = bvalue_json(BValue(c.extras));
    return j;
}

inline Json file_record_json(const FileRecord& r) {
    Json j;
    j["filename"] = bytes_json(r.filename);
    j["path"] = bytes_json(r.rel_path);
    j["invalidated"] = r.invalidated;
    j["main_hash"] = r.main_hash ? Json(r.main_hash->hex()) : Json(nullptr);
    j["mtime"] = r.mtime;
    j["npieces"] = r.npieces;
    j["owner"] = r.owner ? Json(r.owner->hex()) : Json(nullptr);
    j["perm"] = r.perm;
    j["size"] = r.size;
    j["state"] = r.state;
    j["timestamp"] = r.timestamp;
    j["type"] = r.record_type;
    j["pvtime"] = r.pvtime;
    j["sig"] = r.sig ? Json(r.sig->hex()) : Json(nullptr);
    j["offset"] = r.offset;
    return j;
}

inline Json log_event_json(const SyncLogEvent& e) {
    Json j;
    j["line"] = e.line_number;
    j["timestamp"] = e.timestamp ? Json(e.timestamp->text()) : Json(nullptr);
    j["kind"] = std::string(to_string(e.kind));
    if (e.share) j["share"] = e.share->hex();
    if (e.peer) j["peer"] = e.peer->hex();
    if (e.endpoint) j["endpoint"] = e.endpoint->to_string();
    if (e.folder_path) j["folder_path"] = bytes_json(*e.folder_path);
    if (e.direct) j["direct"] = *e.direct;
    if (e.broadcast) j["broadcast"] = *e.broadcast;
    if (e.config_version) j["config_version"] = bytes_json(*e.config_version);
    j["raw_line"] = bytes_json(e.raw_line);
    return j;
}

inline Json registry_finding_json(const RegistryFinding& f) {
    Json j;
    j["key_path"] = bytes_json(f.key_path);
    j["matched_pattern"] = std::string(f.matched_pattern);
    j["phase"] = std::string(to_string(f.phase));
    j["value"] = f.value ? bytes_json(*f.value) : Json(nullptr);
    j["line"] = f.line_number;
    return j;
}

inline Json bundle_json(const ArtifactBundle& b) {
    Json j;
    j["schema_version"] = 1;
    j["sync_dat"] = Json::array();
    for (const auto& a : b.sync_dat) {
        Json e;
        e["path"] = a.path;
        e["fileguard"] = hex_upper(a.data.fileguard);
        e["shares"] = Json::array();
        for (const auto& s : a.data.shares) e["shares"].push_back(share_config_json(s));
        j["sync_dat"].push_back(std::move(e));
    }
    j["settings"] = Json::array();
    for (const auto& a : b.settings) {
        j["settings"].push_back(
            {{"path", a.path}, {"fileguard", hex_upper(a.data.fileguard)}, {"settings", bvalue_json(BValue(a.data.settings))}});
    }
    j["db_wal"] = Json::array();
    for (const auto& a : b.db_wal) {
        Json e;
        e["path"] = a.path;
        e["share"] = a.share ? Json(a.share->hex()) : Json(nullptr);
        e["rejected_blocks"] = a.scan.rejected_blocks;
        e["truncated_blocks"] = a.scan.truncated_blocks;
        e["records"] = Json::array();
        for (const auto& r : a.scan.records) e["records"].push_back(file_record_json(r));
        j["db_wal"].push_back(std::move(e));
    }
    j["logs"] = Json::array();
    for (const auto& a : b.logs) {
        Json e;
        e["path"] = a.path;
        e["empty"] = a.empty;
        e["events"] = Json::array();
        for (const auto& ev : a.events) e["events"].push_back(log_event_json(ev));
        j["logs"].push_back(std::move(e));
    }
    j["share_folders"] = Json::array();
    for (const auto& s : b.share_folders) {
        Json e;
        e["root"] = bytes_json(s.root);
        e["sync_id"] = s.sync_id ? Json(s.sync_id->hex()) : Json(nullptr);
        e["has_sync_ignore"] = s.summary.has_sync_ignore;
        e["has_sync_archive"] = s.summary.has_sync_archive;
        e["ignore_patterns"] = Json::array();
        for (const auto& p : s.ignore_patterns) e["ignore_patterns"].push_back(bytes_json(p));
        e["in_flight"] = Json::array();
        for (const auto& d : s.summary.in_flight)
            e["in_flight"].push_back({{"name", bytes_json(d.name)}, {"target", bytes_json(d.target)}, {"size", d.size}});
        e["archived"] = Json::array();
        for (const auto& a : s.summary.archived) e["archived"].push_back(bytes_json(a));
        j["share_folders"].push_back(std::move(e));
    }
    j["registry"] = Json::array();
    for (const auto& r : b.registry) {
        Json e;
        e["path"] = r.path;
        e["findings"] = Json::array();
        for (const auto& f : r.findings) e["findings"].push_back(registry_finding_json(f));
        j["registry"].push_back(std::move(e));
    }
    j["other_files"] = b.other_files;
    j["warnings"] = b.warnings;
    return j;
}

} // namespace syncscope

#endif // SYNCSCOPE_ARTIFACTS_HPP
