#ifndef SYNCSCOPE_ENDPOINT_HPP
#define SYNCSCOPE_ENDPOINT_HPP

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace syncscope {

// IPv4 address in host order.
struct Ipv4 {
    std::uint32_t value = 0;

    std::string to_string() const {
        return std::to_string(value >> 24) + '.' + std::to_string((value >> 16) & 0xff) + '.' +
               std::to_string((value >> 8) & 0xff) + '.' + std::to_string(value & 0xff);
    }

    static std::optional<Ipv4> parse(std::string_view s) {
        std::uint32_t out = 0;
        std::size_t pos = 0;
        for (int octet = 0; octet < 4; ++octet) {
            if (octet > 0) {
                if (pos >= s.size() || s[pos] != '.') return std::nullopt;
                ++pos;
            }
            std::uint32_t v = 0;
            std::size_t digits = 0;
            while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9' && digits < 3) {
                v = v * 10 + static_cast<std::uint32_t>(s[pos] - '0');
                ++pos;
                ++digits;
            }
            if (digits == 0 || v > 255) return std::nullopt;
            out = (out << 8) | v;
        }
        if (pos != s.size()) return std::nullopt;
        return Ipv4{out};
    }

    friend auto operator<=>(const Ipv4&, const Ipv4&) = default;
};

struct Endpoint {
    Ipv4 ip;
    std::uint16_t port = 0;

    std::string to_string() const { return ip.to_string() + ':' + std::to_string(port); }

    static std::optional<Endpoint> parse(std::string_view s) {
        const auto colon = s.rfind(':');
        if (colon == std::string_view::npos) return std::nullopt;
        auto ip = Ipv4::parse(s.substr(0, colon));
        if (!ip) return std::nullopt;
        auto port_text = s.substr(colon + 1);
        if (port_text.empty() || port_text.size() > 5) return std::nullopt;
        std::uint32_t port = 0;
        for (char c : port_text) {
            if (c < '0' || c > '9') return std::nullopt;
            port = port * 10 + static_cast<std::uint32_t>(c - '0');
        }
        if (port > 65535) return std::nullopt;
        return Endpoint{*ip, static_cast<std::uint16_t>(port)};
    }

    // 4-byte address then 2-byte port, both big-endian.
    std::string to_compact() const {
        std::string out(6, '\0');
        for (int i = 0; i < 4; ++i) out[static_cast<std::size_t>(i)] = static_cast<char>(ip.value >> (24 - 8 * i));
        out[4] = static_cast<char>(port >> 8);
        out[5] = static_cast<char>(port & 0xff);
        return out;
    }

    static std::optional<Endpoint> from_compact(std::string_view b) {
        if (b.size() != 6) return std::nullopt;
        auto u = [&](std::size_t i) { return static_cast<std::uint32_t>(static_cast<unsigned char>(b[i])); };
        return Endpoint{Ipv4{(u(0) << 24) | (u(1) << 16) | (u(2) << 8) | u(3)},
                        static_cast<std::uint16_t>((u(4) << 8) | u(5))};
    }

    friend auto operator<=>(const Endpoint&, const Endpoint&) = default;
};

} // namespace syncscope

#endif // SYNCSCOPE_ENDPOINT_HPP
