#ifndef SYNCSCOPE_BENCODE_HPP
#define SYNCSCOPE_BENCODE_HPP

// Bencoding as used by the sync client on the wire and in its .dat files.
//
//   string   <len>:<bytes>
//   integer  i<signed decimal>e
//   list     l<value>*e
//   dict     d(<string><value>)*e
//
// Byte strings are kept as raw bytes in std::string; nothing here assumes
// any character encoding.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "syncscope/error.hpp"

namespace syncscope {

class BValue;

using BBytes = std::string;
using BList = std::vector<BValue>;
// std::less<std::string> orders by unsigned byte value (char_traits<char>
// compares as unsigned char), which is exactly canonical bencode key order.
using BDict = std::map<std::string, BValue, std::less<>>;

class BValue {
public:
    using Storage = std::variant<BBytes, std::int64_t, BList, BDict>;

    BValue() : data_(BBytes{}) {}
    BValue(BBytes s) : data_(std::move(s)) {}
    BValue(const char* s) : data_(BBytes(s)) {}
    BValue(std::string_view s) : data_(BBytes(s)) {}
    BValue(std::int64_t i) : data_(i) {}
    BValue(int i) : data_(static_cast<std::int64_t>(i)) {}
    BValue(BList l) : data_(std::move(l)) {}
    BValue(BDict d) : data_(std::move(d)) {}

    bool is_bytes() const { return std::holds_alternative<BBytes>(data_); }
    bool is_int() const { return std::holds_alternative<std::int64_t>(data_); }
    bool is_list() const { return std::holds_alternative<BList>(data_); }
    bool is_dict() const { return std::holds_alternative<BDict>(data_); }

    // Typed accessors return nullptr on a type mismatch.
    const BBytes* bytes() const { return std::get_if<BBytes>(&data_); }
    const std::int64_t* integer() const { return std::get_if<std::int64_t>(&data_); }
    const BList* list() const { return std::get_if<BList>(&data_); }
    const BDict* dict() const { return std::get_if<BDict>(&data_); }
    BList* list() { return std::get_if<BList>(&data_); }
    BDict* dict() { return std::get_if<BDict>(&data_); }

    // Dictionary lookup; nullptr when this is not a dict or the key is absent.
    const BValue* find(std::string_view key) const {
        const auto* d = dict();
        if (d == nullptr) return nullptr;
        auto it = d->find(key);
        return it == d->end() ? nullptr : &it->second;
    }

    const Storage& storage() const { return data_; }

    friend bool operator==(const BValue&, const BValue&) = default;

private:
    Storage data_;
};

class MalformedBencode : public Error {
public:
    MalformedBencode(std::size_t offset, std::string reason, bool hit_end = false)
        : Error("malformed bencode at offset " + std::to_string(offset) + ": " + reason),
          offset_(offset), reason_(std::move(reason)), hit_end_(hit_end) {}

    std::size_t offset() const { return offset_; }
    const std::string& reason() const { return reason_; }
    // True when the failure was running off the end of the input, i.e. the
    // data looks like a truncated but otherwise plausible encoding.
    bool hit_end() const { return hit_end_; }

private:
    std::size_t offset_;
    std::string reason_;
    bool hit_end_;
};

struct BParseResult {
    BValue value;
    std::size_t consumed = 0;
};

namespace detail {

inline constexpr int kMaxBencodeDepth = 256;

class BencodeReader {
public:
    explicit BencodeReader(std::string_view in) : in_(in) {}

    BValue value(int depth) {
        if (depth > kMaxBencodeDepth) fail("nesting too deep");
        if (pos_ >= in_.size()) fail("unexpected end of input", true);
        const char c = in_[pos_];
        if (c == 'i') return BValue(integer());
        if (c == 'l') return list(depth);
        if (c == 'd') return dict(depth);
        if (c >= '0' && c <= '9') return BValue(string());
        fail("expected length digit");
    }

    BBytes string() {
        if (pos_ >= in_.size()) fail("unexpected end of input", true);
        if (in_[pos_] < '0' || in_[pos_] > '9') fail("expected length digit");
        std::uint64_t len = 0;
        bool overflow = false;
        while (pos_ < in_.size() && in_[pos_] >= '0' && in_[pos_] <= '9') {
            if (len > (std::numeric_limits<std::uint64_t>::max() - 9) / 10) overflow = true;
            if (!overflow) len = len * 10 + static_cast<std::uint64_t>(in_[pos_] - '0');
            ++pos_;
        }
        if (pos_ >= in_.size()) fail("missing ':' separator", true);
        if (in_[pos_] != ':') fail("missing ':' separator");
        ++pos_;
        if (overflow || len > in_.size() - pos_) fail("length exceeds input", true);
        BBytes out(in_.substr(pos_, static_cast<std::size_t>(len)));
        pos_ += static_cast<std::size_t>(len);
        return out;
    }

    std::int64_t integer() {
        const std::size_t start = pos_;
        ++pos_; // 'i'
        bool negative = false;
        if (pos_ < in_.size() && in_[pos_] == '-') {
            negative = true;
            ++pos_;
        }
        const std::size_t digits_start = pos_;
        // Accumulate as a negative number so INT64_MIN is representable.
        std::int64_t acc = 0;
        constexpr std::int64_t kMin = std::numeric_limits<std::int64_t>::min();
        while (pos_ < in_.size() && in_[pos_] >= '0' && in_[pos_] <= '9') {
            const int d = in_[pos_] - '0';
            if (acc < (kMin + d) / 10) fail_at(start, "integer overflow");
            acc = acc * 10 - d;
            ++pos_;
        }
        if (pos_ >= in_.size()) fail_at(start, "unterminated integer", true);
        if (in_[pos_] != 'e') fail("non-digit in integer");
        const std::size_t ndigits = pos_ - digits_start;
        if (ndigits == 0) fail_at(start, negative ? "bare '-' in integer" : "empty integer");
        if (ndigits > 1 && in_[digits_start] == '0') fail_at(start, "leading zero in integer");
        if (negative && acc == 0) fail_at(start, "negative zero");
        ++pos_; // 'e'
        if (negative) return acc;
        if (acc == kMin) fail_at(start, "integer overflow");
        return -acc;
    }

    BValue list(int depth) {
        const std::size_t start = pos_;
        ++pos_; // 'l'
        BList out;
        for (;;) {
            if (pos_ >= in_.size()) fail_at(start, "unterminated list", true);
            if (in_[pos_] == 'e') break;
            out.push_back(value(depth + 1));
        }
        ++pos_;
        return BValue(std::move(out));
    }

    BValue dict(int depth) {
        const std::size_t start = pos_;
        ++pos_; // 'd'
        BDict out;
        for (;;) {
            if (pos_ >= in_.size()) fail_at(start, "unterminated dictionary", true);
            if (in_[pos_] == 'e') break;
            if (in_[pos_] < '0' || in_[pos_] > '9') fail("dictionary key is not a byte string");
            BBytes key = string();
            BValue v = value(depth + 1);
            // Duplicate keys: the first occurrence wins.
            out.emplace(std::move(key), std::move(v));
        }
        ++pos_;
        return BValue(std::move(out));
    }

    std::size_t pos() const { return pos_; }
    bool at_end() const { return pos_ >= in_.size(); }
    char peek() const { return in_[pos_]; }
    void seek(std::size_t p) { pos_ = p; }

private:
    [[noreturn]] void fail(const char* reason, bool hit_end = false) const {
        throw MalformedBencode(pos_, reason, hit_end);
    }
    [[noreturn]] void fail_at(std::size_t at, const char* reason, bool hit_end = false) const {
        throw MalformedBencode(at, reason, hit_end);
    }

    std::string_view in_;
    std::size_t pos_ = 0;
};

inline void serialise_into(const BValue& v, std::string& out) {
    std::visit(
        [&out](const auto& x) {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, BBytes>) {
                out += std::to_string(x.size());
                out += ':';
                out += x;
            } else if constexpr (std::is_same_v<T, std::int64_t>) {
                out += 'i';
                out += std::to_string(x);
                out += 'e';
            } else if constexpr (std::is_same_v<T, BList>) {
                out += 'l';
                for (const auto& e : x) serialise_into(e, out);
                out += 'e';
            } else {
                out += 'd';
                for (const auto& [k, e] : x) {
                    out += std::to_string(k.size());
                    out += ':';
                    out += k;
                    serialise_into(e, out);
                }
                out += 'e';
            }
        },
        v.storage());
}

} // namespace detail

// Parses the first complete value in `input`. Trailing bytes are left alone;
// `consumed` says where the value ended.
inline BParseResult parse_bencode(std::string_view input) {
    if (input.empty()) throw MalformedBencode(0, "empty input", true);
    detail::BencodeReader r(input);
    BValue v = r.value(0);
    return {std::move(v), r.pos()};
}

// Parses `input` and requires that the value spans all of it.
inline BValue parse_bencode_exact(std::string_view input) {
    auto res = parse_bencode(input);
    if (res.consumed != input.size()) throw MalformedBencode(res.consumed, "trailing data after value");
    return std::move(res.value);
}

// Parses a run of key/value pairs with no enclosing `d...e`, e.g.
// `1:m9:get_peers`. Stops at the first byte that cannot start a key (an `e`
// included) or at end of input. Throws if not even one pair parses.
inline BParseResult parse_bencode_pairs(std::string_view input) {
    detail::BencodeReader r(input);
    BDict out;
    std::size_t good = 0;
    while (!r.at_end() && r.peek() >= '0' && r.peek() <= '9') {
        try {
            BBytes key = r.string();
            BValue v = r.value(1);
            out.emplace(std::move(key), std::move(v));
            good = r.pos();
        } catch (const MalformedBencode&) {
            if (out.empty()) throw;
            break;
        }
    }
    if (out.empty()) throw MalformedBencode(0, "no key/value pair", input.empty());
    return {BValue(std::move(out)), good};
}

// Canonical encoding: dictionary keys in ascending raw-byte order.
inline std::string serialise_bencode(const BValue& v) {
    std::string out;
    detail::serialise_into(v, out);
    return out;
}

inline bool is_printable_ascii(std::string_view s) {
    for (unsigned char c : s)
        if (c < 0x20 || c > 0x7e) return false;
    return true;
}

inline std::string hex_upper(std::string_view bytes) {
    static constexpr char kDigits[] = "0123456789ABCDEF";
    std::string out;
    out.reserve(bytes.size() * 2);
    for (unsigned char c : bytes) {
        out += kDigits[c >> 4];
        out += kDigits[c & 0xf];
    }
    return out;
}

namespace detail {

inline std::string pretty_bytes(std::string_view s) {
    if (!is_printable_ascii(s)) return "<hex " + hex_upper(s) + ">";
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    out += '"';
    return out;
}

inline void pretty_into(const BValue& v, int indent, std::string& out) {
    const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
    const std::string inner(static_cast<std::size_t>(indent + 1) * 2, ' ');
    if (const auto* b = v.bytes()) {
        out += pretty_bytes(*b);
    } else if (const auto* i = v.integer()) {
        out += std::to_string(*i);
    } else if (const auto* l = v.list()) {
        if (l->empty()) {
            out += "[]";
            return;
        }
        out += "[\n";
        for (const auto& e : *l) {
            out += inner;
            pretty_into(e, indent + 1, out);
            out += '\n';
        }
        out += pad + "]";
    } else if (const auto* d = v.dict()) {
        if (d->empty()) {
            out += "{}";
            return;
        }
        out += "{\n";
        for (const auto& [k, e] : *d) {
            out += inner + pretty_bytes(k) + ": ";
            pretty_into(e, indent + 1, out);
            out += '\n';
        }
        out += pad + "}";
    }
}

} // namespace detail

// Human-readable tree; byte strings that are not printable ASCII are shown
// as uppercase hex.
inline std::string to_pretty(const BValue& v) {
    std::string out;
    detail::pretty_into(v, 0, out);
    out += '\n';
    return out;
}

} // namespace syncscope

#endif // SYNCSCOPE_BENCODE_HPP
