#ifndef SYNCSCOPE_REGISTRY_HPP
#define SYNCSCOPE_REGISTRY_HPP

// Windows .reg export reader and the catalogue of registry keys the client
// leaves behind at install time and after uninstall.

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "syncscope/error.hpp"

namespace syncscope {

enum class RegistryPhase { Install, UninstallRemnant, Either };

inline std::string_view to_string(RegistryPhase p) {
    switch (p) {
    case RegistryPhase::Install: return "Install";
    case RegistryPhase::UninstallRemnant: return "UninstallRemnant";
    case RegistryPhase::Either: return "Either";
    }
    return "Either";
}

struct RegistryFinding {
    std::string key_path;
    std::string matched_pattern;
    RegistryPhase phase = RegistryPhase::Either;
    std::optional<std::string> value;
    std::size_t line_number = 0;

    friend bool operator==(const RegistryFinding&, const RegistryFinding&) = default;
};

class MalformedRegExport : public Error {
public:
    MalformedRegExport(std::size_t line, const std::string& why)
        : Error("malformed registry export at line " + std::to_string(line) + ": " + why), line_(line) {}
    std::size_t line_number() const { return line_; }

private:
    std::size_t line_;
};

inline std::string rot13(std::string_view s) {
    std::string out(s);
    for (char& c : out) {
        if (c >= 'a' && c <= 'z') c = static_cast<char>('a' + (c - 'a' + 13) % 26);
        else if (c >= 'A' && c <= 'Z') c = static_cast<char>('A' + (c - 'A' + 13) % 26);
    }
    return out;
}

// Which values under a catalogued key make it count as evidence.
enum class ValueFilter {
    // The key's existence is enough.
    None,
    // Some value name or string data mentions the client executable.
    MentionsClient,
    // Some value name, after ROT-13, mentions the client (UserAssist).
    Rot13MentionsClient,
};

struct RegistryPattern {
    // Backslash-separated, case-insensitive. Special segments:
    //   <SID>          a user SID (S-1-5-...)
    //   <SID>_Classes  a user's classes hive root
    //   <ControlSet>   ControlSetNNN or CurrentControlSet
    std::string_view pattern;
    RegistryPhase phase;
    ValueFilter filter;
};

// Keys present after installation, those still present after uninstall, and
// the overlap between the two lists (phase Either).
inline const std::vector<RegistryPattern>& registry_catalogue() {
    using P = RegistryPhase;
    using F = ValueFilter;
    static const std::vector<RegistryPattern> catalogue = {
        {R"(HKCR\Applications\BTSync.exe\shell\open\command)", P::Either, F::None},
        {R"(HKCU\Software\Classes\Applications\BTSync.exe\shell\open\command)", P::Either, F::None},
        {R"(HKCU\Software\Microsoft\Windows\CurrentVersion\Run)", P::Either, F::MentionsClient},
        {R"(HKCU\Software\Microsoft\Windows\ShellNoRoam\MUICache)", P::Either, F::MentionsClient},
        {R"(HKLM\SOFTWARE\Microsoft\ESENT\Process\BTSync\DEBUG)", P::Either, F::None},
        {R"(HKLM\SOFTWARE\Microsoft\Windows\CurrentVersion\Uninstall\BitTorrent Sync)", P::Install, F::None},
        {R"(HKLM\SYSTEM\<ControlSet>\Services\SharedAccess\Parameters\FirewallPolicy\StandardProfile\AuthorizedApplications\List)",
         P::Install, F::MentionsClient},
        {R"(HKU\<SID>\Software\Classes\Applications\BTSync.exe)", P::Install, F::None},
        {R"(HKU\<SID>\Software\Classes\Applications\BTSync.exe\shell\open\command)", P::Install, F::None},
        {R"(HKU\<SID>\Software\Microsoft\Windows\CurrentVersion\Run)", P::Install, F::MentionsClient},
        {R"(HKU\<SID>\Software\Microsoft\Windows\ShellNoRoam\MUICache)", P::Install, F::MentionsClient},
        {R"(HKU\<SID>_Classes\Applications\BTSync.exe\shell\open\command)", P::Install, F::None},
        {R"(HKCU\Software\Microsoft\Windows\CurrentVersion\Explorer\UserAssist\{75048700-EF1F-11D0-9888-006097DEACF9}\Count)",
         P::UninstallRemnant, F::Rot13MentionsClient},
        {R"(HKU\<SID>\Software\Microsoft\Windows\CurrentVersion\Explorer\UserAssist\{75048700-EF1F-11D0-9888-006097DEACF9}\Count)",
         P::UninstallRemnant, F::Rot13MentionsClient},
    };
    return catalogue;
}

namespace detail {

inline std::string ascii_lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

inline std::vector<std::string_view> split_key(std::string_view path) {
    std::vector<std::string_view> out;
    while (true) {
        const auto bs = path.find('\\');
        out.push_back(path.substr(0, bs));
        if (bs == std::string_view::npos) break;
        path.remove_prefix(bs + 1);
    }
    return out;
}

inline std::string_view short_root(std::string_view root) {
    const std::string r = ascii_lower(root);
    if (r == "hkey_classes_root" || r == "hkcr") return "hkcr";
    if (r == "hkey_current_user" || r == "hkcu") return "hkcu";
    if (r == "hkey_local_machine" || r == "hklm") return "hklm";
    if (r == "hkey_users" || r == "hku") return "hku";
    if (r == "hkey_current_config" || r == "hkcc") return "hkcc";
    return {};
}

inline bool is_sid(std::string_view s) {
    if (s.size() < 6 || ascii_lower(s.substr(0, 4)) != "s-1-") return false;
    return std::all_of(s.begin() + 4, s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)) || c == '-'; });
}

inline bool segment_matches(std::string_view pat, std::string_view seg) {
    if (pat == "<SID>") return is_sid(seg);
    if (pat == "<SID>_Classes") {
        constexpr std::string_view kSuffix = "_classes";
        return seg.size() > kSuffix.size() && ascii_lower(seg.substr(seg.size() - kSuffix.size())) == kSuffix &&
               is_sid(seg.substr(0, seg.size() - kSuffix.size()));
    }
    if (pat == "<ControlSet>") {
        const std::string s = ascii_lower(seg);
        if (s == "currentcontrolset") return true;
        return s.size() == 13 && s.substr(0, 10) == "controlset" &&
               std::all_of(s.begin() + 10, s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
    }
    return ascii_lower(pat) == ascii_lower(seg);
}

inline bool key_matches(std::string_view pattern, std::string_view key) {
    const auto p = split_key(pattern);
    auto k = split_key(key);
    if (p.size() != k.size() || k.empty()) return false;
    const auto root = short_root(k[0]);
    if (root.empty() || root != ascii_lower(p[0])) return false;
    for (std::size_t i = 1; i < p.size(); ++i)
        if (!segment_matches(p[i], k[i])) return false;
    return true;
}

inline bool mentions_client(std::string_view s) {
    const std::string l = ascii_lower(s);
    return l.find("btsync") != std::string::npos || l.find("bittorrent sync") != std::string::npos;
}

inline void append_utf8(std::string& out, std::uint32_t cp) {
    if (cp < 0x80) {
        out += static_cast<char>(cp);
    } else if (cp < 0x800) {
        out += static_cast<char>(0xC0 | (cp >> 6));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
        out += static_cast<char>(0xE0 | (cp >> 12));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
        out += static_cast<char>(0xF0 | (cp >> 18));
        out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    }
}

// Lone surrogates become U+FFFD; an odd trailing byte is dropped.
inline std::string utf16le_to_utf8(std::string_view in) {
    std::string out;
    for (std::size_t i = 0; i + 1 < in.size(); i += 2) {
        std::uint32_t u = static_cast<unsigned char>(in[i]) | (static_cast<unsigned char>(in[i + 1]) << 8);
        if (u >= 0xD800 && u <= 0xDBFF && i + 3 < in.size()) {
            const std::uint32_t lo = static_cast<unsigned char>(in[i + 2]) | (static_cast<unsigned char>(in[i + 3]) << 8);
            if (lo >= 0xDC00 && lo <= 0xDFFF) {
                append_utf8(out, 0x10000 + ((u - 0xD800) << 10) + (lo - 0xDC00));
                i += 2;
                continue;
            }
        }
        if (u >= 0xD800 && u <= 0xDFFF) u = 0xFFFD;
        append_utf8(out, u);
    }
    return out;
}

struct RegValue {
    std::string name; // empty for the default value (@)
    std::string text; // string form of the data where one exists
};

struct RegKey {
    std::string path;
    std::size_t line = 0;
    bool deleted = false;
    std::vector<RegValue> values;
};

// Reads a quoted .reg string starting at s[pos] == '"'; advances pos past
// the closing quote.
inline std::optional<std::string> read_quoted(std::string_view s, std::size_t& pos) {
    std::string out;
    ++pos;
    while (pos < s.size()) {
        const char c = s[pos++];
        if (c == '"') return out;
        if (c == '\\' && pos < s.size()) {
            const char e = s[pos++];
            out += e;
            continue;
        }
        out += c;
    }
    return std::nullopt;
}

inline std::optional<std::string> hex_bytes(std::string_view s) {
    std::string out;
    int nibbles = 0;
    unsigned acc = 0;
    for (char c : s) {
        if (c == ',' || c == ' ' || c == '\t') {
            if (nibbles == 2) out += static_cast<char>(acc);
            else if (nibbles != 0) return std::nullopt;
            nibbles = 0;
            acc = 0;
            continue;
        }
        const int v = std::isdigit(static_cast<unsigned char>(c))   ? c - '0'
                      : (c >= 'a' && c <= 'f')                     ? c - 'a' + 10
                      : (c >= 'A' && c <= 'F')                     ? c - 'A' + 10
                                                                   : -1;
        if (v < 0 || nibbles == 2) return std::nullopt;
        acc = (acc << 4) | static_cast<unsigned>(v);
        ++nibbles;
    }
    if (nibbles == 2) out += static_cast<char>(acc);
    else if (nibbles != 0) return std::nullopt;
    return out;
}

// Renders value data as text where it has a textual form; types without one
// (dword, binary) yield an empty string.
inline std::optional<std::string> value_text(std::string_view data) {
    if (!data.empty() && data.front() == '"') {
        std::size_t pos = 0;
        auto s = read_quoted(data, pos);
        if (!s) return std::nullopt;
        return s;
    }
    if (data == "-") return std::string();
    if (data.substr(0, 6) == "dword:") return std::string();
    if (data.substr(0, 4) == "hex:" || data.substr(0, 4) == "hex(") {
        std::string_view body;
        int type = 3;
        if (data[3] == ':') {
            body = data.substr(4);
        } else {
            const auto close = data.find("):");
            if (close == std::string_view::npos) return std::nullopt;
            try {
                type = std::stoi(std::string(data.substr(4, close - 4)), nullptr, 16);
            } catch (...) {
                return std::nullopt;
            }
            body = data.substr(close + 2);
        }
        auto bytes = hex_bytes(body);
        if (!bytes) return std::nullopt;
        // REG_SZ / REG_EXPAND_SZ / REG_MULTI_SZ are stored as UTF-16LE.
        if (type == 1 || type == 2 || type == 7) {
            std::string t = utf16le_to_utf8(*bytes);
            std::replace(t.begin(), t.end(), '\0', ' ');
            while (!t.empty() && t.back() == ' ') t.pop_back();
            return t;
        }
        return std::string();
    }
    return std::nullopt;
}

inline std::vector<RegKey> read_reg_export(std::string_view input) {
    std::string decoded;
    if (input.size() >= 2 && static_cast<unsigned char>(input[0]) == 0xFF && static_cast<unsigned char>(input[1]) == 0xFE) {
        decoded = utf16le_to_utf8(input.substr(2));
        input = decoded;
    } else if (input.substr(0, 3) == "\xEF\xBB\xBF") {
        input.remove_prefix(3);
    }

    std::vector<RegKey> keys;
    bool header_seen = false;
    std::size_t line_no = 0;
    while (!input.empty()) {
        auto nl = input.find('\n');
        std::string line(input.substr(0, nl));
        input.remove_prefix(nl == std::string_view::npos ? input.size() : nl + 1);
        ++line_no;
        const std::size_t start_line = line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        // Continuation lines (long hex values) end in a backslash.
        while (!line.empty() && line.back() == '\\' && !input.empty()) {
            line.pop_back();
            nl = input.find('\n');
            std::string_view next = input.substr(0, nl);
            input.remove_prefix(nl == std::string_view::npos ? input.size() : nl + 1);
            ++line_no;
            if (!next.empty() && next.back() == '\r') next.remove_suffix(1);
            while (!next.empty() && (next.front() == ' ' || next.front() == '\t')) next.remove_prefix(1);
            line += next;
        }

        std::string_view l = line;
        while (!l.empty() && (l.back() == ' ' || l.back() == '\t')) l.remove_suffix(1);
        while (!l.empty() && (l.front() == ' ' || l.front() == '\t')) l.remove_prefix(1);
        if (l.empty() || l.front() == ';') continue;

        if (!header_seen) {
            if (l != "Windows Registry Editor Version 5.00" && l != "REGEDIT4")
                throw MalformedRegExport(start_line, "missing export header");
            header_seen = true;
            continue;
        }
        if (l.front() == '[') {
            if (l.back() != ']' || l.size() < 3) throw MalformedRegExport(start_line, "unterminated key header");
            std::string_view path = l.substr(1, l.size() - 2);
            RegKey k;
            if (path.front() == '-') {
                k.deleted = true;
                path.remove_prefix(1);
            }
            k.path = std::string(path);
            k.line = start_line;
            keys.push_back(std::move(k));
            continue;
        }
        if (l.front() == '"' || l.front() == '@') {
            if (keys.empty()) throw MalformedRegExport(start_line, "value outside any key");
            RegValue v;
            std::size_t pos = 0;
            if (l.front() == '"') {
                auto name = read_quoted(l, pos);
                if (!name) throw MalformedRegExport(start_line, "unterminated value name");
                v.name = std::move(*name);
            } else {
                pos = 1;
            }
            while (pos < l.size() && (l[pos] == ' ' || l[pos] == '\t')) ++pos;
            if (pos >= l.size() || l[pos] != '=') throw MalformedRegExport(start_line, "expected '='");
            ++pos;
            while (pos < l.size() && (l[pos] == ' ' || l[pos] == '\t')) ++pos;
            auto text = value_text(l.substr(pos));
            if (!text) throw MalformedRegExport(start_line, "unrecognised value data");
            v.text = std::move(*text);
            keys.back().values.push_back(std::move(v));
            continue;
        }
        throw MalformedRegExport(start_line, "unrecognised line");
    }
    return keys;
}

} // namespace detail

// Every key in the export is tested against the catalogue. Keys that need a
// qualifying value (Run, MUICache, firewall list, UserAssist) produce one
// finding per qualifying value.
inline std::vector<RegistryFinding> parse_registry_export(std::string_view input) {
    std::vector<RegistryFinding> out;
    for (const auto& key : detail::read_reg_export(input)) {
        if (key.deleted) continue;
        for (const auto& pat : registry_catalogue()) {
            if (!detail::key_matches(pat.pattern, key.path)) continue;
            auto emit = [&](std::optional<std::string> value) {
                out.push_back({key.path, std::string(pat.pattern), pat.phase, std::move(value), key.line});
            };
            switch (pat.filter) {
            case ValueFilter::None: {
                std::optional<std::string> def;
                for (const auto& v : key.values)
                    if (v.name.empty() && !v.text.empty()) def = v.text;
                emit(def);
                break;
            }
            case ValueFilter::MentionsClient:
                for (const auto& v : key.values) {
                    if (detail::mentions_client(v.name)) emit(v.name + (v.text.empty() ? "" : " = " + v.text));
                    else if (detail::mentions_client(v.text)) emit(v.text);
                }
                break;
            case ValueFilter::Rot13MentionsClient:
                for (const auto& v : key.values) {
                    std::string decoded = rot13(v.name);
                    if (detail::mentions_client(decoded)) emit(std::move(decoded));
                }
                break;
            }
        }
    }
    return out;
}

} // namespace syncscope

#endif // SYNCSCOPE_REGISTRY_HPP
