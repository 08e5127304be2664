#ifndef SYNCSCOPE_KEYS_HPP
#define SYNCSCOPE_KEYS_HPP

// Share secrets and the fixed-width identifiers derived from or tied to them.

#include <algorithm>
#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "syncscope/bencode.hpp"
#include "syncscope/error.hpp"
#include "syncscope/sha1.hpp"

namespace syncscope {

class InvalidIdentifier : public Error {
public:
    using Error::Error;
};

// Fixed-size binary identifier. The tag keeps share ids, peer ids and
// hashes from being mixed up even though they share a width.
template <std::size_t N, class Tag>
class FixedId {
public:
    static constexpr std::size_t kSize = N;

    FixedId() = default;
    explicit FixedId(const std::array<std::uint8_t, N>& b) : bytes_(b) {}

    // Exact-length construction from raw bytes.
    static std::optional<FixedId> from_bytes(std::string_view raw) {
        if (raw.size() != N) return std::nullopt;
        FixedId id;
        std::copy(raw.begin(), raw.end(), reinterpret_cast<char*>(id.bytes_.data()));
        return id;
    }

    // Accepts upper or lower case hex, exactly 2*N digits.
    static FixedId from_hex(std::string_view hex) {
        if (hex.size() != 2 * N)
            throw InvalidIdentifier("expected " + std::to_string(2 * N) + " hex digits, got " +
                                    std::to_string(hex.size()));
        FixedId id;
        for (std::size_t i = 0; i < N; ++i) {
            const int hi = nibble(hex[2 * i]);
            const int lo = nibble(hex[2 * i + 1]);
            if (hi < 0 || lo < 0) throw InvalidIdentifier("non-hex character in identifier");
            id.bytes_[i] = static_cast<std::uint8_t>((hi << 4) | lo);
        }
        return id;
    }

    const std::array<std::uint8_t, N>& bytes() const { return bytes_; }
    std::string raw() const { return std::string(reinterpret_cast<const char*>(bytes_.data()), N); }
    std::string hex() const { return hex_upper(raw()); }

    friend auto operator<=>(const FixedId&, const FixedId&) = default;
    friend bool operator==(const FixedId&, const FixedId&) = default;

private:
    static int nibble(char c) {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        return -1;
    }

    std::array<std::uint8_t, N> bytes_{};
};

struct ShareIdTag;
struct PeerIdTag;
struct RelayShareIdTag;
struct FileHashTag;
struct SignatureTag;
struct NonceTag;
struct PublicKeyTag;

using ShareId = FixedId<20, ShareIdTag>;
using PeerId = FixedId<20, PeerIdTag>;
// The 32-byte share identifier carried in relay pings and stored as
// `pub_key` in sync.dat. Its derivation from the secret is unknown.
using RelayShareId = FixedId<32, RelayShareIdTag>;
using FileHash = FixedId<20, FileHashTag>;
using Signature = FixedId<32, SignatureTag>;
using Nonce = FixedId<16, NonceTag>;
using PublicKey = FixedId<20, PublicKeyTag>;

inline std::string render_share_id(const ShareId& id) { return id.hex(); }
inline ShareId parse_share_id(std::string_view hex) { return ShareId::from_hex(hex); }

enum class KeyClass { ReadWrite, ReadOnly, ReadOnlyLegacy, TwentyFourHour, Encrypted, Unknown };

inline std::string_view to_string(KeyClass c) {
    switch (c) {
    case KeyClass::ReadWrite: return "ReadWrite";
    case KeyClass::ReadOnly: return "ReadOnly";
    case KeyClass::ReadOnlyLegacy: return "ReadOnlyLegacy";
    case KeyClass::TwentyFourHour: return "TwentyFourHour";
    case KeyClass::Encrypted: return "Encrypted";
    case KeyClass::Unknown: return "Unknown";
    }
    return "Unknown";
}

struct SecretKey {
    std::string raw;
    KeyClass key_class = KeyClass::Unknown;

    friend bool operator==(const SecretKey&, const SecretKey&) = default;
};

class InvalidKeyFormat : public Error {
public:
    explicit InvalidKeyFormat(std::string reason)
        : Error("invalid key format: " + reason), reason_(std::move(reason)) {}
    const std::string& reason() const { return reason_; }

private:
    std::string reason_;
};

inline constexpr std::size_t kSecretLength = 33;

inline bool is_base32_char(char c) { return (c >= 'A' && c <= 'Z') || (c >= '2' && c <= '7'); }

// The access class is carried by the first character only. Nothing here
// checks that a read-only key was actually derived from a read/write one.
inline SecretKey classify_secret(std::string_view raw) {
    if (raw.size() != kSecretLength)
        throw InvalidKeyFormat("length " + std::to_string(raw.size()) + ", expected 33");
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (!is_base32_char(raw[i]))
            throw InvalidKeyFormat("character at position " + std::to_string(i) +
                                   " is outside A-Z/2-7");
    }
    KeyClass cls = KeyClass::Unknown;
    switch (raw.front()) {
    case 'A': cls = KeyClass::ReadWrite; break;
    case 'B': cls = KeyClass::ReadOnly; break;
    case 'R': cls = KeyClass::ReadOnlyLegacy; break;
    case 'C': cls = KeyClass::TwentyFourHour; break;
    case 'D': cls = KeyClass::Encrypted; break;
    default: break;
    }
    return SecretKey{std::string(raw), cls};
}

inline std::optional<SecretKey> try_classify_secret(std::string_view raw) noexcept {
    try {
        return classify_secret(raw);
    } catch (const InvalidKeyFormat&) {
        return std::nullopt;
    }
}

// SHA-1 over the raw bytes, no format checks.
inline ShareId derive_share_id_from_bytes(std::string_view raw) { return ShareId(sha1(raw)); }

// SHA-1 of the secret's characters: the DHT registration key.
inline ShareId derive_share_id(const SecretKey& secret) { return derive_share_id_from_bytes(secret.raw); }

} // namespace syncscope

#endif // SYNCSCOPE_KEYS_HPP
