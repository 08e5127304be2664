#ifndef SYNCSCOPE_JSON_UTIL_HPP
#define SYNCSCOPE_JSON_UTIL_HPP

#include <cstdint>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "syncscope/bencode.hpp"

namespace syncscope {

using Json = nlohmann::ordered_json;

inline bool is_valid_utf8(std::string_view s) {
    std::size_t i = 0;
    while (i < s.size()) {
        const auto c = static_cast<unsigned char>(s[i]);
        std::size_t n = 0;
        std::uint32_t cp = 0;
        if (c < 0x80) {
            ++i;
            continue;
        } else if ((c & 0xE0) == 0xC0) {
            n = 1;
            cp = c & 0x1F;
        } else if ((c & 0xF0) == 0xE0) {
            n = 2;
            cp = c & 0x0F;
        } else if ((c & 0xF8) == 0xF0) {
            n = 3;
            cp = c & 0x07;
        } else {
            return false;
        }
        if (s.size() - i <= n) return false;
        for (std::size_t k = 1; k <= n; ++k) {
            const auto cc = static_cast<unsigned char>(s[i + k]);
            if ((cc & 0xC0) != 0x80) return false;
            cp = (cp << 6) | (cc & 0x3F);
        }
        // Overlong forms and surrogates are invalid, as is anything past U+10FFFF.
        if ((n == 1 && cp < 0x80) || (n == 2 && cp < 0x800) || (n == 3 && cp < 0x10000) || cp > 0x10FFFF ||
            (cp >= 0xD800 && cp <= 0xDFFF))
            return false;
        i += n + 1;
    }
    return true;
}

// Byte strings that are valid UTF-8 without control characters become JSON
// strings; anything else becomes {"hex": "..."} so the output stays valid.
inline Json bytes_json(std::string_view s) {
    bool text = is_valid_utf8(s);
    for (char c : s) {
        const auto u = static_cast<unsigned char>(c);
        if (u < 0x20 && c != '\t' && c != '\n' && c != '\r') text = false;
    }
    if (text) return Json(std::string(s));
    return Json{{"hex", hex_upper(s)}};
}

// Pretty form used for every JSON document; stray invalid UTF-8 (paths,
// warning text) becomes U+FFFD instead of aborting the dump.
inline std::string dump_json(const Json& j) { return j.dump(2, ' ', false, Json::error_handler_t::replace) + "\n"; }

inline Json bvalue_json(const BValue& v) {
    if (const auto* b = v.bytes()) return bytes_json(*b);
    if (const auto* i = v.integer()) return Json(*i);
    if (const auto* l = v.list()) {
        Json arr = Json::array();
        for (const auto& e : *l) arr.push_back(bvalue_json(e));
        return arr;
    }
    Json obj = Json::object();
    for (const auto& [k, e] : *v.dict()) {
        // Keys that are not text are shown hex-encoded with a prefix.
        const std::string key = bytes_json(k).is_string() ? k : "hex:" + hex_upper(k);
        obj[key] = bvalue_json(e);
    }
    return obj;
}

} // namespace syncscope

#endif // SYNCSCOPE_JSON_UTIL_HPP
