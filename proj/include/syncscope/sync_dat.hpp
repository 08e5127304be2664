#ifndef SYNCSCOPE_SYNC_DAT_HPP
#define SYNCSCOPE_SYNC_DAT_HPP

// sync.dat and settings.dat: bencoded state files guarded by a `fileguard`
// entry. The fileguard is a salted hash whose salt is not known, so it is
// carried through verbatim and never checked.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "syncscope/bencode.hpp"
#include "syncscope/error.hpp"
#include "syncscope/keys.hpp"

namespace syncscope {

class MissingField : public Error {
public:
    MissingField(std::size_t share_index, std::string field)
        : Error("share " + std::to_string(share_index) + ": missing field '" + field + "'"),
          share_index_(share_index), field_(std::move(field)) {}

    std::size_t share_index() const { return share_index_; }
    const std::string& field() const { return field_; }

private:
    std::size_t share_index_;
    std::string field_;
};

struct ShareConfig {
    std::string path;
    std::string secret_raw;
    // Absent when secret_raw fails the format check; a warning says why.
    std::optional<SecretKey> secret;
    std::optional<RelayShareId> pub_key;
    bool stopped_by_user = false;
    bool use_dht = false;
    bool use_lan_broadcast = false;
    bool use_relay = false;
    bool use_tracker = false;
    bool use_known_hosts = false;
    std::vector<std::string> known_hosts;
    std::vector<PeerId> peers;
    std::int64_t last_sync_completed = 0;
    std::vector<std::string> invites;
    std::int64_t folder_type = 0;
    bool delete_to_trash = false;
    bool mutex_file_initialized = false;
    std::uint64_t direct_total = 0;
    std::uint64_t relay_total = 0;
    // Every key not listed above, untouched.
    BDict extras;

    friend bool operator==(const ShareConfig&, const ShareConfig&) = default;
};

struct SyncDat {
    std::vector<ShareConfig> shares;
    std::string fileguard;
    std::vector<std::string> warnings;
};

struct SettingsDat {
    BDict settings;
    std::string fileguard;
};

namespace detail {

inline const std::vector<std::string_view>& share_config_keys() {
    static const std::vector<std::string_view> keys = {
        "path",        "secret",      "pub_key",        "stopped_by_user",
        "use_dht",     "use_lan_broadcast", "use_relay", "use_tracker",
        "use_known_hosts", "known_hosts", "peers",       "last_sync_completed",
        "invites",     "folder_type", "delete_to_trash", "mutex_file_initialized",
        "directTotal", "relayTotal"};
    return keys;
}

class ShareEntryReader {
public:
    ShareEntryReader(const BDict& entry, std::size_t index, std::vector<std::string>& warnings)
        : entry_(entry), index_(index), warnings_(warnings) {}

    const BValue* get(std::string_view key) const {
        auto it = entry_.find(key);
        return it == entry_.end() ? nullptr : &it->second;
    }

    std::string required_string(const char* key) const {
        const BValue* v = get(key);
        if (v == nullptr || !v->is_bytes()) throw MissingField(index_, key);
        return *v->bytes();
    }

    bool flag(const char* key) {
        const BValue* v = get(key);
        if (v == nullptr) return false;
        const auto* i = v->integer();
        if (i == nullptr || (*i != 0 && *i != 1)) {
            warn(std::string("field '") + key + "' is not 0 or 1; treated as 0");
            return false;
        }
        return *i == 1;
    }

    std::int64_t integer(const char* key) {
        const BValue* v = get(key);
        if (v == nullptr) return 0;
        if (const auto* i = v->integer()) return *i;
        warn(std::string("field '") + key + "' is not an integer; treated as 0");
        return 0;
    }

    std::uint64_t counter(const char* key) {
        const std::int64_t v = integer(key);
        if (v < 0) {
            warn(std::string("field '") + key + "' is negative; treated as 0");
            return 0;
        }
        return static_cast<std::uint64_t>(v);
    }

    void warn(const std::string& msg) { warnings_.push_back("share[" + std::to_string(index_) + "]: " + msg); }

private:
    const BDict& entry_;
    std::size_t index_;
    std::vector<std::string>& warnings_;
};

inline void split_hosts(std::string_view text, std::vector<std::string>& out) {
    std::string cur;
    for (char c : text) {
        if (c == ',' || c == ';' || c == ' ' || c == '\n' || c == '\r' || c == '\t') {
            if (!cur.empty()) out.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
}

// `peers` has been seen as bare 20-byte ids; richer dict records and a
// single packed string are accepted too and reduced to the ids.
inline std::vector<PeerId> normalise_peers(const BValue& v, ShareEntryReader& r) {
    std::vector<PeerId> out;
    auto take = [&](std::string_view raw) {
        if (auto id = PeerId::from_bytes(raw)) {
            out.push_back(*id);
        } else {
            r.warn("peer entry of " + std::to_string(raw.size()) + " bytes ignored (expected 20)");
        }
    };
    if (const auto* b = v.bytes()) {
        if (b->size() % PeerId::kSize != 0) {
            r.warn("packed peers field of " + std::to_string(b->size()) + " bytes is not a multiple of 20");
            return out;
        }
        for (std::size_t i = 0; i < b->size(); i += PeerId::kSize)
            take(std::string_view(*b).substr(i, PeerId::kSize));
        return out;
    }
    const auto* l = v.list();
    if (l == nullptr) {
        r.warn("field 'peers' is neither a list nor a byte string");
        return out;
    }
    for (const auto& e : *l) {
        if (const auto* b = e.bytes()) {
            take(*b);
        } else if (e.is_dict()) {
            const BValue* id = nullptr;
            for (const char* k : {"peer", "id", "peer_id", "peerid"})
                if ((id = e.find(k)) != nullptr) break;
            if (id != nullptr && id->is_bytes()) {
                take(*id->bytes());
            } else {
                r.warn("peer record without an id field ignored");
            }
        } else {
            r.warn("peer entry of unexpected type ignored");
        }
    }
    return out;
}

inline ShareConfig read_share_entry(const BDict& entry, std::size_t index, std::vector<std::string>& warnings) {
    ShareEntryReader r(entry, index, warnings);
    ShareConfig cfg;
    cfg.path = r.required_string("path");
    cfg.secret_raw = r.required_string("secret");
    try {
        cfg.secret = classify_secret(cfg.secret_raw);
    } catch (const InvalidKeyFormat& e) {
        r.warn(std::string("secret rejected: ") + e.reason());
    }
    if (const BValue* pk = r.get("pub_key")) {
        if (pk->is_bytes()) {
            cfg.pub_key = RelayShareId::from_bytes(*pk->bytes());
            if (!cfg.pub_key)
                r.warn("pub_key is " + std::to_string(pk->bytes()->size()) + " bytes, expected 32");
        } else {
            r.warn("pub_key is not a byte string");
        }
    }
    cfg.stopped_by_user = r.flag("stopped_by_user");
    cfg.use_dht = r.flag("use_dht");
    cfg.use_lan_broadcast = r.flag("use_lan_broadcast");
    cfg.use_relay = r.flag("use_relay");
    cfg.use_tracker = r.flag("use_tracker");
    cfg.use_known_hosts = r.flag("use_known_hosts");
    if (const BValue* kh = r.get("known_hosts")) {
        if (const auto* s = kh->bytes()) {
            split_hosts(*s, cfg.known_hosts);
        } else if (const auto* l = kh->list()) {
            for (const auto& e : *l) {
                if (const auto* s = e.bytes()) {
                    cfg.known_hosts.push_back(*s);
                } else {
                    cfg.known_hosts.push_back(serialise_bencode(e));
                }
            }
        } else {
            r.warn("field 'known_hosts' has unexpected type");
        }
    }
    if (const BValue* p = r.get("peers")) cfg.peers = normalise_peers(*p, r);
    cfg.last_sync_completed = r.integer("last_sync_completed");
    if (const BValue* inv = r.get("invites")) {
        if (const auto* l = inv->list()) {
            for (const auto& e : *l) cfg.invites.push_back(e.is_bytes() ? *e.bytes() : serialise_bencode(e));
        } else if (const auto* s = inv->bytes()) {
            cfg.invites.push_back(*s);
        } else {
            r.warn("field 'invites' has unexpected type");
        }
    }
    cfg.folder_type = r.integer("folder_type");
    cfg.delete_to_trash = r.flag("delete_to_trash");
    cfg.mutex_file_initialized = r.flag("mutex_file_initialized");
    cfg.direct_total = r.counter("directTotal");
    cfg.relay_total = r.counter("relayTotal");

    const auto& known = share_config_keys();
    for (const auto& [k, v] : entry) {
        if (std::find(known.begin(), known.end(), k) == known.end()) cfg.extras.emplace(k, v);
    }
    return cfg;
}

} // namespace detail

// The share list lives under `folders` (or `shares`) of the top-level
// dictionary; a bare top-level list of entries is accepted as well.
inline SyncDat parse_sync_dat(std::string_view input) {
    SyncDat out;
    const BValue root = parse_bencode(input).value;

    const BList* entries = nullptr;
    if (const auto* l = root.list()) {
        entries = l;
    } else if (root.is_dict()) {
        if (const BValue* fg = root.find("fileguard"); fg != nullptr && fg->is_bytes()) out.fileguard = *fg->bytes();
        for (const char* key : {"folders", "shares"}) {
            if (const BValue* v = root.find(key); v != nullptr && v->is_list()) {
                entries = v->list();
                break;
            }
        }
    } else {
        throw MalformedBencode(0, "sync.dat root is neither a dictionary nor a list");
    }
    if (entries == nullptr) return out;

    for (std::size_t i = 0; i < entries->size(); ++i) {
        const auto* d = (*entries)[i].dict();
        if (d == nullptr) {
            out.warnings.push_back("share[" + std::to_string(i) + "]: entry is not a dictionary; skipped");
            continue;
        }
        out.shares.push_back(detail::read_share_entry(*d, i, out.warnings));
    }
    return out;
}

// Inverse of parse_sync_dat for a well-formed ShareConfig; used to build
// fixtures and to re-emit edited evidence copies.
inline BValue share_config_to_bencode(const ShareConfig& c) {
    BDict d = c.extras;
    d["path"] = c.path;
    d["secret"] = c.secret_raw;
    if (c.pub_key) d["pub_key"] = c.pub_key->raw();
    d["stopped_by_user"] = c.stopped_by_user ? 1 : 0;
    d["use_dht"] = c.use_dht ? 1 : 0;
    d["use_lan_broadcast"] = c.use_lan_broadcast ? 1 : 0;
    d["use_relay"] = c.use_relay ? 1 : 0;
    d["use_tracker"] = c.use_tracker ? 1 : 0;
    d["use_known_hosts"] = c.use_known_hosts ? 1 : 0;
    BList hosts;
    for (const auto& h : c.known_hosts) hosts.emplace_back(h);
    d["known_hosts"] = std::move(hosts);
    BList peers;
    for (const auto& p : c.peers) peers.emplace_back(p.raw());
    d["peers"] = std::move(peers);
    d["last_sync_completed"] = c.last_sync_completed;
    BList invites;
    for (const auto& i : c.invites) invites.emplace_back(i);
    d["invites"] = std::move(invites);
    d["folder_type"] = c.folder_type;
    d["delete_to_trash"] = c.delete_to_trash ? 1 : 0;
    d["mutex_file_initialized"] = c.mutex_file_initialized ? 1 : 0;
    d["directTotal"] = static_cast<std::int64_t>(c.direct_total);
    d["relayTotal"] = static_cast<std::int64_t>(c.relay_total);
    return BValue(std::move(d));
}

inline SettingsDat parse_settings_dat(std::string_view input) {
    BValue root = parse_bencode(input).value;
    auto* d = root.dict();
    if (d == nullptr) throw MalformedBencode(0, "settings.dat root is not a dictionary");
    SettingsDat out;
    if (auto it = d->find("fileguard"); it != d->end()) {
        if (it->second.is_bytes()) out.fileguard = *it->second.bytes();
        d->erase(it);
    }
    out.settings = std::move(*d);
    return out;
}

} // namespace syncscope

#endif // SYNCSCOPE_SYNC_DAT_HPP
