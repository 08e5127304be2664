#ifndef SYNCSCOPE_WIRE_HPP
#define SYNCSCOPE_WIRE_HPP

// Dissector for the client's UDP control traffic: LAN discovery, tracker
// get_peers and its reply, and the relay handshake (ping, nonce exchange,
// public key). Payload bodies after the handshake are encrypted and only
// counted.
//
// Message layout used throughout: an optional "BSYNC" marker somewhere in
// the first bytes, then a bencoded dictionary (or a bare run of key/value
// pairs) carrying the message type under key `m`.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <variant>
#include <vector>

#include "syncscope/bencode.hpp"
#include "syncscope/endpoint.hpp"
#include "syncscope/error.hpp"
#include "syncscope/keys.hpp"
#include "syncscope/pcap.hpp"

namespace syncscope {

inline constexpr Ipv4 kLanMulticastGroup{0xEFC00000u}; // 239.192.0.0
inline constexpr std::uint16_t kLanDiscoveryPort = 3838;
inline constexpr std::uint16_t kRelayPort = 3000;
inline constexpr std::string_view kBsyncMarker = "BSYNC";

inline std::vector<Ipv4> default_tracker_hosts() {
    return {*Ipv4::parse("54.225.100.8"), *Ipv4::parse("54.225.92.50"), *Ipv4::parse("54.225.196.38")};
}

inline std::vector<Ipv4> default_relay_hosts() {
    return {*Ipv4::parse("67.215.229.106"), *Ipv4::parse("67.215.231.242")};
}

// ---------------------------------------------------------------------------
// Messages

struct LanPing {
    Endpoint advertised;
    ShareId share;
    // Not documented for LAN pings; kept when a client includes it.
    std::optional<PeerId> peer;
    // False for a ping sent straight to a predefined host.
    bool multicast = true;
    BDict extras;
    friend bool operator==(const LanPing&, const LanPing&) = default;
};

// The reply to a LAN ping: no marker, the payload is the bare PeerId.
struct LanPong {
    PeerId peer;
    friend bool operator==(const LanPong&, const LanPong&) = default;
};

struct TrackerGetPeers {
    Endpoint la;
    PeerId peer;
    ShareId share;
    BDict extras;
    friend bool operator==(const TrackerGetPeers&, const TrackerGetPeers&) = default;
};

struct TrackerPeerEntry {
    Endpoint endpoint;
    PeerId peer;
    ShareId share;
    friend bool operator==(const TrackerPeerEntry&, const TrackerPeerEntry&) = default;
};

struct TrackerPeersResponse {
    std::vector<TrackerPeerEntry> entries;
    friend bool operator==(const TrackerPeersResponse&, const TrackerPeersResponse&) = default;
};

struct RelayPing {
    PeerId peer;
    RelayShareId share32;
    BDict extras;
    friend bool operator==(const RelayPing&, const RelayPing&) = default;
};

struct RelayNonce {
    Nonce nonce;
    // Piece availability map sent alongside the nonce, raw.
    std::string have_map;
    BDict extras;
    friend bool operator==(const RelayNonce&, const RelayNonce&) = default;
};

struct PublicKeyMessage {
    PublicKey key;
    friend bool operator==(const PublicKeyMessage&, const PublicKeyMessage&) = default;
};

// Opaque post-handshake relay traffic.
struct RelayData {
    std::size_t length = 0;
    friend bool operator==(const RelayData&, const RelayData&) = default;
};

using WireMessage = std::variant<LanPing, LanPong, TrackerGetPeers, TrackerPeersResponse, RelayPing, RelayNonce,
                                 PublicKeyMessage, RelayData>;

inline std::string_view message_kind(const WireMessage& m) {
    static constexpr std::string_view kNames[] = {"LanPing",  "LanPong",    "TrackerGetPeers", "TrackerPeersResponse",
                                                  "RelayPing", "RelayNonce", "PublicKey",       "RelayData"};
    return kNames[m.index()];
}

inline bool is_relay_family(const WireMessage& m) {
    return std::holds_alternative<RelayPing>(m) || std::holds_alternative<RelayNonce>(m) ||
           std::holds_alternative<PublicKeyMessage>(m) || std::holds_alternative<RelayData>(m);
}

// ---------------------------------------------------------------------------
// Errors

class WrongMessageType : public Error {
public:
    explicit WrongMessageType(std::string found)
        : Error("wrong message type '" + found + "'"), found_(std::move(found)) {}
    const std::string& found() const { return found_; }

private:
    std::string found_;
};

class FieldLengthError : public Error {
public:
    FieldLengthError(std::string field, std::size_t expected, std::size_t found)
        : Error("field '" + field + "' is " + std::to_string(found) + " bytes, expected " + std::to_string(expected)),
          field_(std::move(field)), expected_(expected), found_(found) {}
    const std::string& field() const { return field_; }
    std::size_t expected() const { return expected_; }
    std::size_t found() const { return found_; }

private:
    std::string field_;
    std::size_t expected_;
    std::size_t found_;
};

class MissingWireField : public Error {
public:
    explicit MissingWireField(std::string field)
        : Error("message lacks field '" + field + "'"), field_(std::move(field)) {}
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

class EmptyResponse : public Error {
public:
    EmptyResponse() : Error("tracker response lists no peers") {}
};

class OutOfOrderHandshake : public Error {
public:
    explicit OutOfOrderHandshake(std::size_t position)
        : Error("relay handshake out of order at position " + std::to_string(position)), position_(position) {}
    std::size_t position() const { return position_; }

private:
    std::size_t position_;
};

// ---------------------------------------------------------------------------
// Locating the bencoded body

struct LocatedBody {
    BValue value;
    std::size_t offset = 0;
    bool bare_pairs = false;
};

inline constexpr std::size_t kBodySearchWindow = 64;

inline bool has_marker(std::string_view payload, std::string_view marker = kBsyncMarker, std::size_t window = 16) {
    if (marker.empty()) return false;
    const std::string_view head = payload.substr(0, std::min(payload.size(), window + marker.size()));
    const auto at = head.find(marker);
    return at != std::string_view::npos && at < window;
}

// First dictionary that parses at an offset inside the search window, then
// the first list, then the first bare key/value run containing `m`.
inline std::optional<LocatedBody> locate_body(std::string_view payload) {
    const std::size_t limit = std::min(payload.size(), kBodySearchWindow);
    for (char opener : {'d', 'l'}) {
        for (std::size_t off = 0; off < limit; ++off) {
            if (payload[off] != opener) continue;
            try {
                auto res = parse_bencode(payload.substr(off));
                return LocatedBody{std::move(res.value), off, false};
            } catch (const MalformedBencode&) {
            }
        }
    }
    for (std::size_t off = 0; off < limit; ++off) {
        const char c = payload[off];
        if (c < '1' || c > '9') continue;
        try {
            auto res = parse_bencode_pairs(payload.substr(off));
            if (res.value.find("m") != nullptr) return LocatedBody{std::move(res.value), off, true};
        } catch (const MalformedBencode&) {
        }
    }
    return std::nullopt;
}

namespace detail {

inline const BValue& require(const BValue& dict, std::string_view key) {
    const BValue* v = dict.find(key);
    if (v == nullptr) throw MissingWireField(std::string(key));
    return *v;
}

template <class Id>
Id fixed_field(const BValue& dict, std::string_view key) {
    const BValue& v = require(dict, key);
    const auto* b = v.bytes();
    if (b == nullptr) throw FieldLengthError(std::string(key), Id::kSize, 0);
    auto id = Id::from_bytes(*b);
    if (!id) throw FieldLengthError(std::string(key), Id::kSize, b->size());
    return *id;
}

inline Endpoint compact_endpoint(const BValue& dict, std::string_view key) {
    const BValue& v = require(dict, key);
    const auto* b = v.bytes();
    if (b == nullptr) throw FieldLengthError(std::string(key), 6, 0);
    auto ep = Endpoint::from_compact(*b);
    if (!ep) throw FieldLengthError(std::string(key), 6, b->size());
    return *ep;
}

inline std::string message_type(const BValue& dict) {
    const BValue* m = dict.find("m");
    if (m == nullptr || !m->is_bytes()) return {};
    return *m->bytes();
}

inline BDict extras_of(const BValue& dict, std::initializer_list<std::string_view> known) {
    BDict out;
    if (const auto* d = dict.dict()) {
        for (const auto& [k, v] : *d)
            if (std::find(known.begin(), known.end(), k) == known.end()) out.emplace(k, v);
    }
    return out;
}

inline BValue located_dict(std::string_view payload) {
    auto body = locate_body(payload);
    if (!body) throw MalformedBencode(0, "no bencoded body in payload", payload.empty());
    if (!body->value.is_dict()) throw MalformedBencode(body->offset, "payload body is not a dictionary");
    return std::move(body->value);
}

inline std::string with_marker(const BValue& body) {
    std::string out(kBsyncMarker);
    out += '\0';
    out += serialise_bencode(body);
    return out;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Decoders

inline LanPing decode_lan_ping(std::string_view payload) {
    const BValue d = detail::located_dict(payload);
    const std::string m = detail::message_type(d);
    if (m != "ping") throw WrongMessageType(m);
    LanPing p;
    p.advertised = detail::compact_endpoint(d, "la");
    p.share = detail::fixed_field<ShareId>(d, "share");
    if (d.find("peer") != nullptr) p.peer = detail::fixed_field<PeerId>(d, "peer");
    p.extras = detail::extras_of(d, {"m", "la", "share", "peer"});
    return p;
}

inline TrackerGetPeers decode_tracker_request(std::string_view payload) {
    const BValue d = detail::located_dict(payload);
    const std::string m = detail::message_type(d);
    if (m != "get_peers") throw WrongMessageType(m);
    TrackerGetPeers r;
    r.la = detail::compact_endpoint(d, "la");
    r.peer = detail::fixed_field<PeerId>(d, "peer");
    r.share = detail::fixed_field<ShareId>(d, "share");
    r.extras = detail::extras_of(d, {"m", "la", "peer", "share"});
    return r;
}

namespace detail {

inline TrackerPeerEntry peer_entry(const BValue& e) {
    if (const auto* b = e.bytes()) {
        // Packed form: 6-byte endpoint, PeerId, ShareId.
        constexpr std::size_t kPacked = 6 + PeerId::kSize + ShareId::kSize;
        if (b->size() != kPacked) throw FieldLengthError("peers[]", kPacked, b->size());
        const std::string_view s = *b;
        return {*Endpoint::from_compact(s.substr(0, 6)), *PeerId::from_bytes(s.substr(6, 20)),
                *ShareId::from_bytes(s.substr(26, 20))};
    }
    if (!e.is_dict()) throw MalformedBencode(0, "tracker peer entry is neither a dictionary nor a string");
    return {compact_endpoint(e, "la"), fixed_field<PeerId>(e, "peer"), fixed_field<ShareId>(e, "share")};
}

} // namespace detail

inline TrackerPeersResponse decode_tracker_response(std::string_view payload) {
    auto body = locate_body(payload);
    if (!body) throw MalformedBencode(0, "no bencoded body in payload", payload.empty());
    const BList* list = body->value.list();
    if (list == nullptr) {
        const BValue* peers = body->value.find("peers");
        if (peers == nullptr) throw MissingWireField("peers");
        list = peers->list();
        if (list == nullptr) throw MalformedBencode(body->offset, "peers is not a list");
    }
    if (list->empty()) throw EmptyResponse();
    TrackerPeersResponse r;
    for (const auto& e : *list) r.entries.push_back(detail::peer_entry(e));
    return r;
}

// Handshake packet on a relay flow. Bencoded bodies are preferred;
// a bare 16-byte payload is read as a nonce and a bare 20-byte payload as a
// public key. Returns nullopt for anything else (post-handshake data).
inline std::optional<WireMessage> decode_relay_message(std::string_view payload) {
    if (auto body = locate_body(payload); body && body->value.is_dict()) {
        const BValue& d = body->value;
        const std::string m = detail::message_type(d);
        if (m == "ping" && d.find("peer") != nullptr) {
            RelayPing p;
            p.peer = detail::fixed_field<PeerId>(d, "peer");
            p.share32 = detail::fixed_field<RelayShareId>(d, "share");
            p.extras = detail::extras_of(d, {"m", "peer", "share"});
            return p;
        }
        if (d.find("nonce") != nullptr) {
            RelayNonce n;
            n.nonce = detail::fixed_field<Nonce>(d, "nonce");
            for (const char* k : {"have", "map"}) {
                if (const BValue* h = d.find(k); h != nullptr && h->is_bytes()) {
                    n.have_map = *h->bytes();
                    break;
                }
            }
            n.extras = detail::extras_of(d, {"m", "nonce", "have", "map"});
            return n;
        }
        for (const char* k : {"key", "pub_key", "pubkey"}) {
            if (d.find(k) != nullptr) return PublicKeyMessage{detail::fixed_field<PublicKey>(d, k)};
        }
    }
    if (payload.size() == Nonce::kSize) return RelayNonce{*Nonce::from_bytes(payload), {}, {}};
    if (payload.size() == PublicKey::kSize) return PublicKeyMessage{*PublicKey::from_bytes(payload)};
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Encoders (construction side of the round trip; also used for fixtures)

inline std::string encode_lan_ping(const LanPing& p) {
    BDict d = p.extras;
    d["m"] = "ping";
    d["la"] = p.advertised.to_compact();
    d["share"] = p.share.raw();
    if (p.peer) d["peer"] = p.peer->raw();
    return detail::with_marker(BValue(std::move(d)));
}

inline std::string encode_lan_pong(const LanPong& p) { return p.peer.raw(); }

inline std::string encode_tracker_request(const TrackerGetPeers& r) {
    BDict d = r.extras;
    d["m"] = "get_peers";
    d["la"] = r.la.to_compact();
    d["peer"] = r.peer.raw();
    d["share"] = r.share.raw();
    return detail::with_marker(BValue(std::move(d)));
}

inline std::string encode_tracker_response(const TrackerPeersResponse& r) {
    BList peers;
    for (const auto& e : r.entries) {
        BDict d;
        d["la"] = e.endpoint.to_compact();
        d["peer"] = e.peer.raw();
        d["share"] = e.share.raw();
        peers.emplace_back(std::move(d));
    }
    BDict d;
    d["m"] = "peers";
    d["peers"] = std::move(peers);
    return detail::with_marker(BValue(std::move(d)));
}

inline std::string encode_relay_ping(const RelayPing& p) {
    BDict d = p.extras;
    d["m"] = "ping";
    d["peer"] = p.peer.raw();
    d["share"] = p.share32.raw();
    return detail::with_marker(BValue(std::move(d)));
}

inline std::string encode_relay_nonce(const RelayNonce& n) {
    BDict d = n.extras;
    d["m"] = "nonce";
    d["nonce"] = n.nonce.raw();
    d["have"] = n.have_map;
    return detail::with_marker(BValue(std::move(d)));
}

inline std::string encode_public_key(const PublicKeyMessage& k) {
    BDict d;
    d["m"] = "key";
    d["key"] = k.key.raw();
    return detail::with_marker(BValue(std::move(d)));
}

// ---------------------------------------------------------------------------
// Classification

struct HostSets {
    std::set<Ipv4> trackers;
    std::set<Ipv4> relays;
};

inline HostSets default_host_sets() {
    HostSets h;
    for (auto ip : default_tracker_hosts()) h.trackers.insert(ip);
    for (auto ip : default_relay_hosts()) h.relays.insert(ip);
    return h;
}

enum class ClassifyRule { None, LanPing, Relay, Tracker, KnownHostPing, LanPong };

struct ClassifyOutcome {
    ClassifyRule rule = ClassifyRule::None;
    std::optional<WireMessage> message;
    // Set when a rule fired but decoding its payload failed.
    std::optional<std::string> error;
};

namespace detail {

inline bool is_relay_flow(const PacketContext& ctx, const HostSets& hosts) {
    return ctx.dst_port == kRelayPort || ctx.src_port == kRelayPort || hosts.relays.count(ctx.dst_ip) != 0 ||
           hosts.relays.count(ctx.src_ip) != 0;
}

inline bool is_tracker_flow(const PacketContext& ctx, const HostSets& hosts) {
    return hosts.trackers.count(ctx.dst_ip) != 0 || hosts.trackers.count(ctx.src_ip) != 0 ||
           ctx.payload.find("9:get_peers") != std::string::npos;
}

inline bool is_marked_ping(const PacketContext& ctx, std::string_view marker, std::size_t window) {
    if (!has_marker(ctx.payload, marker, window)) return false;
    auto body = locate_body(ctx.payload);
    return body && detail::message_type(body->value) == "ping" && body->value.find("la") != nullptr;
}

template <class F>
ClassifyOutcome guarded(ClassifyRule rule, F&& decode) {
    ClassifyOutcome out;
    out.rule = rule;
    try {
        out.message = decode();
    } catch (const Error& e) {
        out.error = e.what();
    }
    return out;
}

} // namespace detail

// Stateless rules, applied in order; the first whose condition holds
// decides the outcome:
//   1. 239.192.0.0:3838 with the marker           -> LanPing
//   2. port 3000 or a relay host, either direction -> relay family
//   3. a tracker host, or a `get_peers` key        -> tracker family
//   4. marker + ping to any other address          -> LanPing (predefined host)
inline ClassifyOutcome classify_packet_detailed(const PacketContext& ctx, const HostSets& hosts,
                                                std::string_view marker = kBsyncMarker, std::size_t window = 16) {
    if (ctx.dst_ip == kLanMulticastGroup && ctx.dst_port == kLanDiscoveryPort && has_marker(ctx.payload, marker, window)) {
        return detail::guarded(ClassifyRule::LanPing, [&] { return WireMessage(decode_lan_ping(ctx.payload)); });
    }
    if (detail::is_relay_flow(ctx, hosts)) {
        ClassifyOutcome out;
        out.rule = ClassifyRule::Relay;
        try {
            out.message = decode_relay_message(ctx.payload);
        } catch (const Error& e) {
            out.error = e.what();
        }
        return out;
    }
    if (detail::is_tracker_flow(ctx, hosts)) {
        const bool request = ctx.payload.find("get_peers") != std::string::npos;
        if (request)
            return detail::guarded(ClassifyRule::Tracker, [&] { return WireMessage(decode_tracker_request(ctx.payload)); });
        if (hosts.trackers.count(ctx.src_ip) != 0)
            return detail::guarded(ClassifyRule::Tracker, [&] { return WireMessage(decode_tracker_response(ctx.payload)); });
        return {ClassifyRule::Tracker, std::nullopt, std::nullopt};
    }
    if (detail::is_marked_ping(ctx, marker, window)) {
        return detail::guarded(ClassifyRule::KnownHostPing, [&] {
            LanPing p = decode_lan_ping(ctx.payload);
            p.multicast = false;
            return WireMessage(std::move(p));
        });
    }
    return {};
}

inline std::optional<WireMessage> classify_packet(const PacketContext& ctx, const HostSets& hosts) {
    return classify_packet_detailed(ctx, hosts).message;
}

inline std::optional<WireMessage> classify_packet(const PacketContext& ctx, std::span<const Ipv4> tracker_hosts,
                                                  std::span<const Ipv4> relay_hosts) {
    HostSets h;
    h.trackers.insert(tracker_hosts.begin(), tracker_hosts.end());
    h.relays.insert(relay_hosts.begin(), relay_hosts.end());
    return classify_packet(ctx, h);
}

// ---------------------------------------------------------------------------
// Relay handshake

struct TimedMessage {
    std::int64_t timestamp_us = 0;
    WireMessage message;
};

struct RelaySession {
    std::optional<PeerId> peer;
    std::optional<RelayShareId> share32;
    std::optional<Nonce> nonce;
    std::string have_map;
    std::optional<PublicKey> public_key;
    std::int64_t first_us = 0;
    std::int64_t last_us = 0;
    std::size_t encrypted_packets = 0;

    bool complete() const { return peer.has_value() && nonce.has_value() && public_key.has_value(); }
};

// Validates ping -> nonce -> public key ordering. Repeated pings and the
// second side's nonce are fine; a nonce before any ping, a key before any
// nonce, or data before the key is not. Non-relay messages are ignored.
inline RelaySession decode_relay_handshake(std::span<const TimedMessage> messages) {
    enum Stage { Start, Pinged, NonceSeen, Keyed } stage = Start;
    RelaySession s;
    bool any = false;
    for (std::size_t i = 0; i < messages.size(); ++i) {
        const auto& tm = messages[i];
        if (!is_relay_family(tm.message)) continue;
        if (!any) s.first_us = tm.timestamp_us;
        any = true;
        s.first_us = std::min(s.first_us, tm.timestamp_us);
        s.last_us = std::max(s.last_us, tm.timestamp_us);
        if (const auto* p = std::get_if<RelayPing>(&tm.message)) {
            if (!s.peer) {
                s.peer = p->peer;
                s.share32 = p->share32;
            }
            if (stage == Start) stage = Pinged;
        } else if (const auto* n = std::get_if<RelayNonce>(&tm.message)) {
            if (stage == Start) throw OutOfOrderHandshake(i);
            if (!s.nonce) {
                s.nonce = n->nonce;
                s.have_map = n->have_map;
            }
            if (stage == Pinged) stage = NonceSeen;
        } else if (const auto* k = std::get_if<PublicKeyMessage>(&tm.message)) {
            if (stage == Start || stage == Pinged) throw OutOfOrderHandshake(i);
            if (!s.public_key) s.public_key = k->key;
            stage = Keyed;
        } else {
            if (stage != Keyed) throw OutOfOrderHandshake(i);
            ++s.encrypted_packets;
        }
    }
    return s;
}

// ---------------------------------------------------------------------------
// Whole-capture dissection

struct DissectorConfig {
    HostSets hosts = default_host_sets();
    std::string marker = std::string(kBsyncMarker);
    std::size_t marker_window = 16;
};

struct DecodedPacket {
    PacketContext ctx;
    WireMessage message;
};

struct RelayFlow {
    Endpoint a;
    Endpoint b;
    std::vector<std::size_t> packet_indices;
    std::optional<RelaySession> session;
    std::optional<std::string> error;
};

struct DissectionResult {
    std::vector<DecodedPacket> messages;
    std::size_t unclassified = 0;
    // "packet N: reason" for every packet a rule claimed but could not decode.
    std::vector<std::string> errors;
    std::vector<RelayFlow> relay_flows;
};

// Sequential pass over the capture in timestamp order. On top of the
// stateless rules it tracks advertised LAN ping endpoints (so the bare
// 20-byte replies can be recognised) and relay flows (so encrypted data
// after a handshake is attributed to its session).
class Dissector {
public:
    explicit Dissector(DissectorConfig config = {}) : config_(std::move(config)) {}

    std::optional<WireMessage> classify(const PacketContext& ctx) {
        ClassifyOutcome out = classify_packet_detailed(ctx, config_.hosts, config_.marker, config_.marker_window);
        if (out.error) {
            errors_.push_back("packet " + std::to_string(ctx.index) + ": " + *out.error);
            return std::nullopt;
        }
        if (out.message) {
            if (const auto* ping = std::get_if<LanPing>(&*out.message)) {
                advertised_.insert(ping->advertised);
                advertised_.insert(Endpoint{ctx.src_ip, ping->advertised.port});
            }
            if (std::holds_alternative<RelayPing>(*out.message)) relay_flows_.insert(flow_key(ctx));
            return out.message;
        }
        if (out.rule == ClassifyRule::Relay && relay_flows_.count(flow_key(ctx)) != 0 && !ctx.payload.empty())
            return RelayData{ctx.payload.size()};
        if (out.rule == ClassifyRule::None && ctx.payload.size() == PeerId::kSize &&
            advertised_.count(ctx.dst()) != 0)
            return LanPong{*PeerId::from_bytes(ctx.payload)};
        return std::nullopt;
    }

    const std::vector<std::string>& errors() const { return errors_; }

    static std::pair<Endpoint, Endpoint> flow_key(const PacketContext& ctx) {
        auto a = ctx.src();
        auto b = ctx.dst();
        if (b < a) std::swap(a, b);
        return {a, b};
    }

private:
    DissectorConfig config_;
    std::set<Endpoint> advertised_;
    std::set<std::pair<Endpoint, Endpoint>> relay_flows_;
    std::vector<std::string> errors_;
};

inline DissectionResult dissect_packets(std::vector<PacketContext> packets, const DissectorConfig& config = {}) {
    std::stable_sort(packets.begin(), packets.end(), [](const PacketContext& x, const PacketContext& y) {
        return std::tie(x.timestamp_us, x.index) < std::tie(y.timestamp_us, y.index);
    });
    DissectionResult out;
    Dissector d(config);
    std::map<std::pair<Endpoint, Endpoint>, std::size_t> flow_slot;
    std::vector<std::vector<TimedMessage>> flow_messages;
    for (auto& ctx : packets) {
        auto msg = d.classify(ctx);
        if (!msg) {
            ++out.unclassified;
            continue;
        }
        if (is_relay_family(*msg)) {
            const auto key = Dissector::flow_key(ctx);
            auto [it, inserted] = flow_slot.emplace(key, out.relay_flows.size());
            if (inserted) {
                out.relay_flows.push_back(RelayFlow{key.first, key.second, {}, std::nullopt, std::nullopt});
                flow_messages.emplace_back();
            }
            out.relay_flows[it->second].packet_indices.push_back(ctx.index);
            flow_messages[it->second].push_back({ctx.timestamp_us, *msg});
        }
        out.messages.push_back({std::move(ctx), std::move(*msg)});
    }
    for (std::size_t i = 0; i < out.relay_flows.size(); ++i) {
        auto& flow = out.relay_flows[i];
        try {
            flow.session = decode_relay_handshake(flow_messages[i]);
        } catch (const OutOfOrderHandshake& e) {
            flow.error = "packet " + std::to_string(flow.packet_indices[e.position()]) + ": " + e.what();
        }
    }
    out.errors = d.errors();
    return out;
}

inline DissectionResult dissect_capture(const Capture& capture, const DissectorConfig& config = {}) {
    return dissect_packets(capture.packets, config);
}

// ---------------------------------------------------------------------------
// Peer observations

enum class ObservationSource { Lan, Tracker, Relay };

inline std::string_view to_string(ObservationSource s) {
    switch (s) {
    case ObservationSource::Lan: return "Lan";
    case ObservationSource::Tracker: return "Tracker";
    case ObservationSource::Relay: return "Relay";
    }
    return "Lan";
}

struct PeerObservation {
    PeerId peer;
    std::optional<ShareId> share;
    std::optional<RelayShareId> share32;
    Endpoint endpoint;
    std::int64_t timestamp_us = 0;
    std::size_t packet_index = 0;
    ObservationSource source = ObservationSource::Lan;

    friend bool operator==(const PeerObservation&, const PeerObservation&) = default;
};

// One row per PeerId carried by a message, ordered by capture time then
// packet index. LAN pongs inherit the share of the ping they answer.
inline std::vector<PeerObservation> extract_peer_observations(std::span<const DecodedPacket> messages) {
    std::vector<const DecodedPacket*> order;
    order.reserve(messages.size());
    for (const auto& m : messages) order.push_back(&m);
    std::stable_sort(order.begin(), order.end(), [](const DecodedPacket* x, const DecodedPacket* y) {
        return std::tie(x->ctx.timestamp_us, x->ctx.index) < std::tie(y->ctx.timestamp_us, y->ctx.index);
    });

    std::map<Endpoint, ShareId> ping_share;
    std::vector<PeerObservation> out;
    for (const DecodedPacket* m : order) {
        const auto& ctx = m->ctx;
        auto row = [&](const PeerId& peer, std::optional<ShareId> share, Endpoint ep, ObservationSource src) {
            PeerObservation o;
            o.peer = peer;
            o.share = share;
            o.endpoint = ep;
            o.timestamp_us = ctx.timestamp_us;
            o.packet_index = ctx.index;
            o.source = src;
            return o;
        };
        std::visit(
            [&](const auto& msg) {
                using T = std::decay_t<decltype(msg)>;
                if constexpr (std::is_same_v<T, LanPing>) {
                    ping_share[msg.advertised] = msg.share;
                    ping_share[Endpoint{ctx.src_ip, msg.advertised.port}] = msg.share;
                    if (msg.peer) out.push_back(row(*msg.peer, msg.share, ctx.src(), ObservationSource::Lan));
                } else if constexpr (std::is_same_v<T, LanPong>) {
                    std::optional<ShareId> share;
                    if (auto it = ping_share.find(ctx.dst()); it != ping_share.end()) share = it->second;
                    out.push_back(row(msg.peer, share, ctx.src(), ObservationSource::Lan));
                } else if constexpr (std::is_same_v<T, TrackerGetPeers>) {
                    out.push_back(row(msg.peer, msg.share, msg.la, ObservationSource::Tracker));
                } else if constexpr (std::is_same_v<T, TrackerPeersResponse>) {
                    for (const auto& e : msg.entries)
                        out.push_back(row(e.peer, e.share, e.endpoint, ObservationSource::Tracker));
                } else if constexpr (std::is_same_v<T, RelayPing>) {
                    auto o = row(msg.peer, std::nullopt, ctx.src(), ObservationSource::Relay);
                    o.share32 = msg.share32;
                    out.push_back(std::move(o));
                }
            },
            m->message);
    }
    return out;
}

} // namespace syncscope

#endif // SYNCSCOPE_WIRE_HPP
