#ifndef SYNCSCOPE_DB_WAL_HPP
#define SYNCSCOPE_DB_WAL_HPP

// Carves per-file records out of a <ShareID>.db-wal file.
//
// The WAL page framing around the records is not modelled. The carver tries
// a bencode parse at every `d` byte and keeps dictionaries that look like
// file records, so damaged or partially overwritten WAL files still yield
// whatever records survive intact.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "syncscope/bencode.hpp"
#include "syncscope/keys.hpp"

namespace syncscope {

struct FileRecord {
    std::string filename;
    bool invalidated = false;
    std::optional<FileHash> main_hash;
    std::int64_t mtime = 0;
    std::int64_t npieces = 0;
    std::optional<PeerId> owner;
    std::string rel_path;
    std::int64_t perm = 0;
    std::int64_t size = 0;
    std::int64_t state = 0;
    std::int64_t timestamp = 0;
    std::int64_t record_type = 0;
    std::int64_t pvtime = 0;
    std::optional<Signature> sig;
    // Byte offset of the record's opening `d` within the scanned input.
    std::size_t offset = 0;

    friend bool operator==(const FileRecord&, const FileRecord&) = default;
};

struct DbWalScan {
    std::vector<FileRecord> records;
    // Record-shaped dictionaries dropped because a field had the wrong type
    // or width.
    std::size_t rejected_blocks = 0;
    // A record cut off by the end of the input (0 or 1).
    std::size_t truncated_blocks = 0;
    std::vector<std::string> warnings;
};

namespace detail {

struct WalKey {
    std::string_view name;
    std::string_view alias;
};

inline constexpr std::array<WalKey, 14> kWalKeys = {{
    {"name", "filename"},
    {"invalidated", ""},
    {"main_hash", "mainhash"},
    {"mtime", ""},
    {"npieces", ""},
    {"owner", ""},
    {"path", ""},
    {"perm", ""},
    {"size", ""},
    {"state", ""},
    {"timestamp", ""},
    {"type", ""},
    {"pvtime", ""},
    {"sig", ""},
}};

inline const BValue* wal_field(const BValue& d, const WalKey& k) {
    if (const BValue* v = d.find(k.name)) return v;
    if (!k.alias.empty()) return d.find(k.alias);
    return nullptr;
}

inline std::size_t wal_key_count(const BValue& d) {
    std::size_t n = 0;
    for (const auto& k : kWalKeys)
        if (wal_field(d, k) != nullptr) ++n;
    return n;
}

inline bool looks_like_record_text(std::string_view tail) {
    for (std::string_view marker : {std::string_view("11:invalidated"), std::string_view("9:main_hash"),
                                    std::string_view("5:owner20:")})
        if (tail.find(marker) != std::string_view::npos) return true;
    return false;
}

// Returns nullopt (with a reason) when a field is present but malformed.
inline std::optional<FileRecord> to_file_record(const BValue& d, std::string& why) {
    FileRecord r;
    auto integer = [&](std::string_view key, std::int64_t& dst) {
        const BValue* v = d.find(key);
        if (v == nullptr) return true;
        if (!v->is_int()) {
            why = std::string(key) + " is not an integer";
            return false;
        }
        dst = *v->integer();
        return true;
    };
    auto bytes = [&](std::string_view key, std::string_view alias, std::string& dst) {
        const BValue* v = d.find(key);
        if (v == nullptr && !alias.empty()) v = d.find(alias);
        if (v == nullptr) return true;
        if (!v->is_bytes()) {
            why = std::string(key) + " is not a byte string";
            return false;
        }
        dst = *v->bytes();
        return true;
    };
    auto fixed = [&](std::string_view key, std::string_view alias, auto& dst, std::size_t width) {
        std::string raw;
        const bool present = d.find(key) != nullptr || (!alias.empty() && d.find(alias) != nullptr);
        if (!bytes(key, alias, raw)) return false;
        if (!present) return true;
        using Id = typename std::decay_t<decltype(dst)>::value_type;
        dst = Id::from_bytes(raw);
        if (!dst) {
            why = std::string(key) + " is " + std::to_string(raw.size()) + " bytes, expected " + std::to_string(width);
            return false;
        }
        return true;
    };

    if (!bytes("name", "filename", r.filename)) return std::nullopt;
    if (!bytes("path", "", r.rel_path)) return std::nullopt;
    std::int64_t inval = 0;
    if (!integer("invalidated", inval)) return std::nullopt;
    if (inval != 0 && inval != 1) {
        why = "invalidated is " + std::to_string(inval) + ", expected 0 or 1";
        return std::nullopt;
    }
    r.invalidated = inval == 1;
    if (!fixed("main_hash", "mainhash", r.main_hash, FileHash::kSize)) return std::nullopt;
    if (!fixed("owner", "", r.owner, PeerId::kSize)) return std::nullopt;
    if (!fixed("sig", "", r.sig, Signature::kSize)) return std::nullopt;
    if (!integer("mtime", r.mtime) || !integer("npieces", r.npieces) || !integer("perm", r.perm) ||
        !integer("size", r.size) || !integer("state", r.state) || !integer("timestamp", r.timestamp) ||
        !integer("type", r.record_type) || !integer("pvtime", r.pvtime))
        return std::nullopt;
    if (r.filename.empty() && !r.rel_path.empty()) {
        const auto slash = r.rel_path.find_last_of("/\\");
        r.filename = slash == std::string::npos ? r.rel_path : r.rel_path.substr(slash + 1);
    }
    return r;
}

} // namespace detail

// A dictionary counts as a file record when it carries at least this many
// of the known record keys.
inline constexpr std::size_t kMinRecordKeys = 3;

inline DbWalScan parse_db_wal(std::string_view input) {
    DbWalScan out;
    bool truncated_seen = false;
    std::size_t i = 0;
    while (i < input.size()) {
        if (input[i] != 'd') {
            ++i;
            continue;
        }
        try {
            auto res = parse_bencode(input.substr(i));
            if (detail::wal_key_count(res.value) >= kMinRecordKeys) {
                std::string why;
                if (auto rec = detail::to_file_record(res.value, why)) {
                    rec->offset = i;
                    out.records.push_back(std::move(*rec));
                    i += res.consumed;
                    continue;
                }
                ++out.rejected_blocks;
                out.warnings.push_back("record at offset " + std::to_string(i) + " rejected: " + why);
                i += res.consumed;
                continue;
            }
        } catch (const MalformedBencode& e) {
            if (e.hit_end() && !truncated_seen && detail::looks_like_record_text(input.substr(i))) {
                truncated_seen = true;
                ++out.truncated_blocks;
                out.warnings.push_back("partial record at offset " + std::to_string(i) + " ignored");
            }
        }
        ++i;
    }
    return out;
}

// Encodes a record the way the carver expects to find it.
inline BValue file_record_to_bencode(const FileRecord& r) {
    BDict d;
    d["name"] = r.filename;
    d["invalidated"] = r.invalidated ? 1 : 0;
    if (r.main_hash) d["main_hash"] = r.main_hash->raw();
    d["mtime"] = r.mtime;
    d["npieces"] = r.npieces;
    if (r.owner) d["owner"] = r.owner->raw();
    d["path"] = r.rel_path;
    d["perm"] = r.perm;
    d["size"] = r.size;
    d["state"] = r.state;
    d["timestamp"] = r.timestamp;
    d["type"] = r.record_type;
    d["pvtime"] = r.pvtime;
    if (r.sig) d["sig"] = r.sig->raw();
    return BValue(std::move(d));
}

} // namespace syncscope

#endif // SYNCSCOPE_DB_WAL_HPP
