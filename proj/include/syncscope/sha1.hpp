#ifndef SYNCSCOPE_SHA1_HPP
#define SYNCSCOPE_SHA1_HPP

#include <array>
#include <cstdint>
#include <string_view>

namespace syncscope {

using Sha1Digest = std::array<std::uint8_t, 20>;

// FIPS 180-4 SHA-1, one-shot.
inline Sha1Digest sha1(std::string_view data) {
    std::uint32_t h[5] = {0x67452301u, 0xEFCDAB89u, 0x98BADCFEu, 0x10325476u, 0xC3D2E1F0u};

    auto rotl = [](std::uint32_t x, int n) { return (x << n) | (x >> (32 - n)); };

    auto block = [&](const std::uint8_t* p) {
        std::uint32_t w[80];
        for (int i = 0; i < 16; ++i)
            w[i] = (std::uint32_t{p[4 * i]} << 24) | (std::uint32_t{p[4 * i + 1]} << 16) |
                   (std::uint32_t{p[4 * i + 2]} << 8) | std::uint32_t{p[4 * i + 3]};
        for (int i = 16; i < 80; ++i) w[i] = rotl(w[i - 3] ^ w[i - 8] ^ w[i - 14] ^ w[i - 16], 1);

        std::uint32_t a = h[0], b = h[1], c = h[2], d = h[3], e = h[4];
        for (int i = 0; i < 80; ++i) {
            std::uint32_t f, k;
            if (i < 20) {
                f = (b & c) | (~b & d);
                k = 0x5A827999u;
            } else if (i < 40) {
                f = b ^ c ^ d;
                k = 0x6ED9EBA1u;
            } else if (i < 60) {
                f = (b & c) | (b & d) | (c & d);
                k = 0x8F1BBCDCu;
            } else {
                f = b ^ c ^ d;
                k = 0xCA62C1D6u;
            }
            const std::uint32_t t = rotl(a, 5) + f + e + k + w[i];
            e = d;
            d = c;
            c = rotl(b, 30);
            b = a;
            a = t;
        }
        h[0] += a;
        h[1] += b;
        h[2] += c;
        h[3] += d;
        h[4] += e;
    };

    const auto* bytes = reinterpret_cast<const std::uint8_t*>(data.data());
    const std::size_t n = data.size();
    std::size_t off = 0;
    for (; off + 64 <= n; off += 64) block(bytes + off);

    // Final one or two blocks: remainder, 0x80, zero pad, 64-bit bit length.
    std::uint8_t tail[128] = {};
    const std::size_t rem = n - off;
    for (std::size_t i = 0; i < rem; ++i) tail[i] = bytes[off + i];
    tail[rem] = 0x80;
    const std::size_t tail_len = rem + 1 + 8 <= 64 ? 64 : 128;
    const std::uint64_t bits = static_cast<std::uint64_t>(n) * 8;
    for (int i = 0; i < 8; ++i) tail[tail_len - 1 - i] = static_cast<std::uint8_t>(bits >> (8 * i));
    block(tail);
    if (tail_len == 128) block(tail + 64);

    Sha1Digest out{};
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 4; ++j) out[4 * i + j] = static_cast<std::uint8_t>(h[i] >> (24 - 8 * j));
    return out;
}

} // namespace syncscope

#endif // SYNCSCOPE_SHA1_HPP
