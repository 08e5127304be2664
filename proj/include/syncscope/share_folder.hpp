#ifndef SYNCSCOPE_SHARE_FOLDER_HPP
#define SYNCSCOPE_SHARE_FOLDER_HPP

// Control files found in a share's root: .SyncID, .SyncIgnore, .SyncArchive/
// and in-flight `.!sync` delta files.

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "syncscope/error.hpp"
#include "syncscope/keys.hpp"

namespace syncscope {

class WrongLength : public Error {
public:
    WrongLength(std::size_t actual, std::size_t expected)
        : Error("wrong length: " + std::to_string(actual) + " bytes, expected " + std::to_string(expected)),
          actual_(actual) {}
    std::size_t actual() const { return actual_; }

private:
    std::size_t actual_;
};

inline ShareId parse_sync_id(std::string_view input) {
    auto id = ShareId::from_bytes(input);
    if (!id) throw WrongLength(input.size(), ShareId::kSize);
    return *id;
}

// One pattern per line. Blank lines and `#` comment lines are skipped, as is
// a leading UTF-8 byte-order mark.
inline std::vector<std::string> parse_sync_ignore(std::string_view input) {
    if (input.substr(0, 3) == "\xEF\xBB\xBF") input.remove_prefix(3);
    std::vector<std::string> out;
    while (!input.empty()) {
        auto nl = input.find('\n');
        std::string_view line = input.substr(0, nl);
        input.remove_prefix(nl == std::string_view::npos ? input.size() : nl + 1);
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t'))
            line.remove_suffix(1);
        while (!line.empty() && (line.front() == ' ' || line.front() == '\t')) line.remove_prefix(1);
        if (line.empty() || line.front() == '#') continue;
        out.emplace_back(line);
    }
    return out;
}

struct FolderEntry {
    // Path relative to the share root, `/`-separated.
    std::string name;
    std::uint64_t size = 0;
};

struct InFlightDelta {
    std::string name;
    // The file the delta will be renamed to once complete.
    std::string target;
    std::uint64_t size = 0;

    friend bool operator==(const InFlightDelta&, const InFlightDelta&) = default;
};

struct ShareFolderSummary {
    bool has_sync_id = false;
    bool has_sync_ignore = false;
    bool has_sync_archive = false;
    bool is_share_root = false;
    std::vector<InFlightDelta> in_flight;
    // Files under .SyncArchive/: deleted on a remote peer, kept locally.
    std::vector<std::string> archived;
};

namespace detail {

inline bool iequals(std::string_view a, std::string_view b) {
    return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
               return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
           });
}

// ".!sync", ".!sync3" or ".!sync(3)".
inline std::size_t match_sync_suffix(std::string_view s) {
    constexpr std::string_view kTag = ".!sync";
    if (s.substr(0, kTag.size()) != kTag) return 0;
    std::size_t n = kTag.size();
    if (n < s.size() && s[n] == '(') {
        std::size_t j = n + 1;
        while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
        if (j == n + 1 || j >= s.size() || s[j] != ')') return 0;
        return j + 1;
    }
    while (n < s.size() && std::isdigit(static_cast<unsigned char>(s[n]))) ++n;
    return n;
}

// Splits "a.txt.!sync.!sync1" into target "a.txt"; empty when the name is
// not a delta.
inline std::string delta_target(std::string_view base) {
    const auto first = base.find(".!sync");
    if (first == std::string_view::npos || first == 0) return {};
    std::string_view rest = base.substr(first);
    while (!rest.empty()) {
        const std::size_t n = match_sync_suffix(rest);
        if (n == 0) return {};
        rest.remove_prefix(n);
    }
    return std::string(base.substr(0, first));
}

} // namespace detail

inline ShareFolderSummary scan_share_folder(std::span<const FolderEntry> entries) {
    ShareFolderSummary out;
    for (const auto& e : entries) {
        std::string_view name = e.name;
        while (!name.empty() && name.back() == '/') name.remove_suffix(1);
        const auto slash = name.find('/');
        const std::string_view top = name.substr(0, slash);
        if (detail::iequals(top, ".SyncArchive")) {
            out.has_sync_archive = true;
            if (slash != std::string_view::npos && slash + 1 < name.size())
                out.archived.emplace_back(name.substr(slash + 1));
            continue;
        }
        if (slash == std::string_view::npos) {
            if (detail::iequals(name, ".SyncID")) out.has_sync_id = true;
            if (detail::iequals(name, ".SyncIgnore")) out.has_sync_ignore = true;
        }
        const auto last = name.rfind('/');
        const std::string_view base = last == std::string_view::npos ? name : name.substr(last + 1);
        const std::string target = detail::delta_target(base);
        if (!target.empty()) {
            std::string full_target =
                last == std::string_view::npos ? target : std::string(name.substr(0, last + 1)) + target;
            out.in_flight.push_back({std::string(name), std::move(full_target), e.size});
        }
    }
    out.is_share_root = out.has_sync_id;
    return out;
}

inline ShareFolderSummary scan_share_folder(const std::vector<std::string>& names) {
    std::vector<FolderEntry> entries;
    entries.reserve(names.size());
    for (const auto& n : names) entries.push_back({n, 0});
    return scan_share_folder(std::span<const FolderEntry>(entries));
}

} // namespace syncscope

#endif // SYNCSCOPE_SHARE_FOLDER_HPP
