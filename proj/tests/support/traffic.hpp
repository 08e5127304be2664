#ifndef SYNCSCOPE_TESTS_TRAFFIC_HPP
#define SYNCSCOPE_TESTS_TRAFFIC_HPP

// Synthetic client traffic for the dissector tests, with random generators
// for the classifier properties.

#include <random>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "syncscope/wire.hpp"

namespace traffic {

using namespace syncscope;

inline Ipv4 v4(int a, int b, int c, int d) { return Ipv4{oracle::ip(a, b, c, d)}; }

inline PacketContext packet(std::size_t index, std::int64_t ts, Endpoint src, Endpoint dst, std::string payload) {
    PacketContext p;
    p.index = index;
    p.timestamp_us = ts;
    p.src_ip = src.ip;
    p.src_port = src.port;
    p.dst_ip = dst.ip;
    p.dst_port = dst.port;
    p.payload = std::move(payload);
    return p;
}

inline const Endpoint kLocal{v4(192, 168, 0, 10), 27900};
inline const Endpoint kRemote{v4(192, 168, 0, 11), 27900};
inline const Endpoint kMulticast{kLanMulticastGroup, kLanDiscoveryPort};
inline const Endpoint kTracker{v4(54, 225, 100, 8), 3000 + 12};
inline const Endpoint kRelay{v4(67, 215, 229, 106), kRelayPort};
inline const Endpoint kKnownHost{v4(203, 0, 113, 7), 27900};

inline ShareId share() { return ShareId::from_hex(fixtures::kShareHex); }
inline ShareId other_share() { return ShareId::from_hex(fixtures::kOtherShareHex); }
inline PeerId remote_peer() { return PeerId::from_hex(fixtures::kPeerHex); }
inline PeerId local_peer() { return *PeerId::from_bytes(std::string(20, '\x11')); }
inline PeerId tracked_peer() { return *PeerId::from_bytes(std::string(20, '\x22')); }
inline RelayShareId relay_share() { return *RelayShareId::from_bytes(std::string(32, '\x33')); }
inline Nonce nonce() { return *Nonce::from_bytes(std::string(16, '\x44')); }
inline PublicKey pub_key() { return *PublicKey::from_bytes(std::string(20, '\x55')); }

inline constexpr std::int64_t kStart = 1385901824000000; // 2013-12-01 12:43:44 UTC

// The remote peer's multicast ping and our reply, a tracker round trip, a
// relay handshake followed by two data packets, a unicast ping to a
// predefined host and unrelated noise.
inline std::vector<PacketContext> scenario() {
    std::vector<PacketContext> out;
    std::int64_t ts = kStart;
    auto add = [&](Endpoint src, Endpoint dst, std::string payload) {
        out.push_back(packet(out.size(), ts, src, dst, std::move(payload)));
        ts += 250000;
    };

    LanPing ping;
    ping.advertised = kRemote;
    ping.share = share();
    ping.peer = remote_peer();
    add(kRemote, kMulticast, encode_lan_ping(ping));
    add(kLocal, kRemote, encode_lan_pong({local_peer()}));

    add(Endpoint{v4(10, 1, 1, 1), 5353}, Endpoint{v4(10, 1, 1, 2), 5353}, "noise that is not the client");

    TrackerGetPeers req{kLocal, local_peer(), share(), {}};
    add(kLocal, kTracker, encode_tracker_request(req));
    TrackerPeersResponse resp;
    resp.entries.push_back({Endpoint{v4(198, 51, 100, 20), 41000}, tracked_peer(), share()});
    add(kTracker, kLocal, encode_tracker_response(resp));

    add(kLocal, kRelay, encode_relay_ping({local_peer(), relay_share(), {}}));
    add(kRelay, kLocal, encode_relay_nonce({nonce(), "\x01", {}}));
    add(kLocal, kRelay, encode_public_key({pub_key()}));
    add(kLocal, kRelay, std::string(120, '\xA5'));
    add(kRelay, kLocal, std::string(64, '\x5A'));

    LanPing direct;
    direct.advertised = kLocal;
    direct.share = other_share();
    direct.peer = local_peer();
    add(kLocal, kKnownHost, encode_lan_ping(direct));
    return out;
}

inline std::string random_id(std::mt19937_64& rng, std::size_t n) {
    std::string s(n, '\0');
    for (auto& c : s) c = static_cast<char>(rng());
    return s;
}

inline Endpoint random_private_endpoint(std::mt19937_64& rng) {
    return Endpoint{v4(192, 168, static_cast<int>(rng() % 256), 1 + static_cast<int>(rng() % 254)),
                    static_cast<std::uint16_t>(10000 + rng() % 50000)};
}

struct LabelledPacket {
    PacketContext ctx;
    WireMessage message;
};

// A well-formed client packet of a random type, paired with the message it
// was built from.
inline LabelledPacket random_client_packet(std::mt19937_64& rng, std::size_t index) {
    const Endpoint local = random_private_endpoint(rng);
    const ShareId s = *ShareId::from_bytes(random_id(rng, 20));
    const PeerId p = *PeerId::from_bytes(random_id(rng, 20));
    BDict extras;
    if (rng() % 2) extras["x-ext"] = random_id(rng, rng() % 8);
    const std::int64_t ts = kStart + static_cast<std::int64_t>(index) * 1000;
    switch (rng() % 7) {
    case 0: {
        LanPing ping{local, s, p, true, extras};
        return {packet(index, ts, local, kMulticast, encode_lan_ping(ping)), ping};
    }
    case 1: {
        LanPing ping{local, s, p, false, extras};
        return {packet(index, ts, local, kKnownHost, encode_lan_ping(ping)), ping};
    }
    case 2: {
        TrackerGetPeers req{local, p, s, extras};
        return {packet(index, ts, local, kTracker, encode_tracker_request(req)), req};
    }
    case 3: {
        TrackerPeersResponse r;
        for (std::size_t i = 0, n = 1 + rng() % 4; i < n; ++i)
            r.entries.push_back({random_private_endpoint(rng), *PeerId::from_bytes(random_id(rng, 20)), s});
        return {packet(index, ts, kTracker, local, encode_tracker_response(r)), r};
    }
    case 4: {
        RelayPing rp{p, *RelayShareId::from_bytes(random_id(rng, 32)), extras};
        return {packet(index, ts, local, kRelay, encode_relay_ping(rp)), rp};
    }
    case 5: {
        RelayNonce n{*Nonce::from_bytes(random_id(rng, 16)), random_id(rng, rng() % 6), extras};
        return {packet(index, ts, kRelay, local, encode_relay_nonce(n)), n};
    }
    default: {
        PublicKeyMessage k{*PublicKey::from_bytes(random_id(rng, 20))};
        return {packet(index, ts, local, kRelay, encode_public_key(k)), k};
    }
    }
}

// Random datagrams between ordinary hosts on ordinary ports.
inline PacketContext random_noise_packet(std::mt19937_64& rng, std::size_t index) {
    Endpoint src{v4(10, static_cast<int>(rng() % 256), static_cast<int>(rng() % 256), 1 + static_cast<int>(rng() % 254)),
                 static_cast<std::uint16_t>(1024 + rng() % 1000)};
    Endpoint dst{v4(172, 16, static_cast<int>(rng() % 256), 1 + static_cast<int>(rng() % 254)),
                 static_cast<std::uint16_t>(4000 + rng() % 1000)};
    std::string payload = oracle::random_bytes(rng, 200);
    if (rng() % 4 == 0) payload = "BSYNC" + payload; // marker without a ping body
    return packet(index, kStart + static_cast<std::int64_t>(index) * 1000, src, dst, std::move(payload));
}

} // namespace traffic

#endif // SYNCSCOPE_TESTS_TRAFFIC_HPP
