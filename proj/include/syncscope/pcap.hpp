#ifndef SYNCSCOPE_PCAP_HPP
#define SYNCSCOPE_PCAP_HPP

// Classic libpcap capture reader (not pcapng). Only Ethernet link type is
// accepted; every IPv4/UDP datagram becomes one PacketContext.

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "syncscope/endpoint.hpp"
#include "syncscope/error.hpp"

namespace syncscope {

class NotPcap : public Error {
public:
    explicit NotPcap(const std::string& why) : Error("not a classic pcap capture: " + why) {}
};

class TruncatedPacket : public Error {
public:
    explicit TruncatedPacket(std::size_t index)
        : Error("truncated packet record " + std::to_string(index)), index_(index) {}
    std::size_t index() const { return index_; }

private:
    std::size_t index_;
};

struct PacketContext {
    // Record index within the capture, counting every record.
    std::size_t index = 0;
    // Microseconds since the epoch, capture clock.
    std::int64_t timestamp_us = 0;
    Ipv4 src_ip;
    Ipv4 dst_ip;
    std::uint16_t src_port = 0;
    std::uint16_t dst_port = 0;
    // UDP datagram body, untouched.
    std::string payload;

    Endpoint src() const { return {src_ip, src_port}; }
    Endpoint dst() const { return {dst_ip, dst_port}; }

    friend bool operator==(const PacketContext&, const PacketContext&) = default;
};

struct Capture {
    std::vector<PacketContext> packets;
    std::size_t total_records = 0;
    // Records that were not IPv4/UDP (ARP, TCP, IPv6, fragments).
    std::size_t skipped_non_udp = 0;
    // IPv4/UDP records whose headers did not fit in the captured bytes.
    std::size_t skipped_malformed = 0;
};

inline constexpr std::uint32_t kPcapMagicMicros = 0xA1B2C3D4;
inline constexpr std::uint32_t kPcapMagicNanos = 0xA1B23C4D;
inline constexpr std::uint32_t kLinkTypeEthernet = 1;

namespace detail {

class ByteReader {
public:
    ByteReader(std::string_view data, bool swapped) : data_(data), swapped_(swapped) {}

    std::uint32_t u32(std::size_t at) const {
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= std::uint32_t{static_cast<unsigned char>(data_[at + i])} << (8 * i);
        return swapped_ ? __builtin_bswap32(v) : v;
    }

private:
    std::string_view data_;
    bool swapped_;
};

inline std::uint16_t be16(std::string_view d, std::size_t at) {
    return static_cast<std::uint16_t>((static_cast<unsigned char>(d[at]) << 8) | static_cast<unsigned char>(d[at + 1]));
}

inline std::uint32_t be32(std::string_view d, std::size_t at) {
    return (std::uint32_t{static_cast<unsigned char>(d[at])} << 24) |
           (std::uint32_t{static_cast<unsigned char>(d[at + 1])} << 16) |
           (std::uint32_t{static_cast<unsigned char>(d[at + 2])} << 8) | std::uint32_t{static_cast<unsigned char>(d[at + 3])};
}

enum class FrameResult { Udp, NotUdp, Malformed };

inline FrameResult decode_ethernet(std::string_view frame, PacketContext& ctx) {
    if (frame.size() < 14) return FrameResult::Malformed;
    std::size_t off = 12;
    std::uint16_t ethertype = be16(frame, off);
    off += 2;
    // Up to two 802.1Q / 802.1ad tags.
    for (int tags = 0; tags < 2 && (ethertype == 0x8100 || ethertype == 0x88A8); ++tags) {
        if (frame.size() < off + 4) return FrameResult::Malformed;
        ethertype = be16(frame, off + 2);
        off += 4;
    }
    if (ethertype != 0x0800) return FrameResult::NotUdp;

    const std::string_view ip = frame.substr(off);
    if (ip.size() < 20) return FrameResult::Malformed;
    const unsigned version = static_cast<unsigned char>(ip[0]) >> 4;
    const std::size_t ihl = (static_cast<unsigned char>(ip[0]) & 0x0f) * 4u;
    if (version != 4 || ihl < 20 || ip.size() < ihl) return FrameResult::Malformed;
    const std::uint16_t total_len = be16(ip, 2);
    const std::uint16_t frag = be16(ip, 6);
    if (static_cast<unsigned char>(ip[9]) != 17) return FrameResult::NotUdp;
    // Non-first fragments carry no UDP header; first fragments carry a
    // partial datagram. Neither is dissected.
    if ((frag & 0x1fff) != 0 || (frag & 0x2000) != 0) return FrameResult::NotUdp;

    std::size_t ip_end = ip.size();
    if (total_len >= ihl && total_len < ip_end) ip_end = total_len; // strip Ethernet padding
    const std::string_view udp = ip.substr(ihl, ip_end - ihl);
    if (udp.size() < 8) return FrameResult::Malformed;
    const std::uint16_t udp_len = be16(udp, 4);
    std::size_t body_len = udp.size() - 8;
    if (udp_len >= 8 && static_cast<std::size_t>(udp_len - 8) < body_len) body_len = udp_len - 8u;

    ctx.src_ip = Ipv4{be32(ip, 12)};
    ctx.dst_ip = Ipv4{be32(ip, 16)};
    ctx.src_port = be16(udp, 0);
    ctx.dst_port = be16(udp, 2);
    ctx.payload = std::string(udp.substr(8, body_len));
    return FrameResult::Udp;
}

} // namespace detail

// Upper bound on a single record's captured length; larger values mean the
// file is corrupt rather than holding a jumbo frame.
inline constexpr std::uint32_t kMaxRecordLength = 256u * 1024u * 1024u;

inline Capture read_pcap(std::string_view input) {
    if (input.size() < 24) throw NotPcap("file shorter than the 24-byte global header");
    const detail::ByteReader native(input, false);
    const std::uint32_t magic = native.u32(0);
    bool swapped = false;
    bool nanos = false;
    if (magic == kPcapMagicMicros) {
    } else if (magic == __builtin_bswap32(kPcapMagicMicros)) {
        swapped = true;
    } else if (magic == kPcapMagicNanos) {
        nanos = true;
    } else if (magic == __builtin_bswap32(kPcapMagicNanos)) {
        swapped = true;
        nanos = true;
    } else {
        throw NotPcap("bad magic number");
    }
    const detail::ByteReader r(input, swapped);
    const std::uint32_t link_type = r.u32(20) & 0x0fffffff;
    if (link_type != kLinkTypeEthernet)
        throw NotPcap("unsupported link type " + std::to_string(link_type));

    Capture cap;
    std::size_t off = 24;
    std::size_t index = 0;
    while (off < input.size()) {
        if (input.size() - off < 16) throw TruncatedPacket(index);
        const std::uint32_t ts_sec = r.u32(off);
        const std::uint32_t ts_frac = r.u32(off + 4);
        const std::uint32_t incl = r.u32(off + 8);
        off += 16;
        if (incl > kMaxRecordLength || incl > input.size() - off) throw TruncatedPacket(index);
        const std::string_view frame = input.substr(off, incl);
        off += incl;

        PacketContext ctx;
        ctx.index = index;
        ctx.timestamp_us = static_cast<std::int64_t>(ts_sec) * 1000000 + (nanos ? ts_frac / 1000 : ts_frac);
        switch (detail::decode_ethernet(frame, ctx)) {
        case detail::FrameResult::Udp: cap.packets.push_back(std::move(ctx)); break;
        case detail::FrameResult::NotUdp: ++cap.skipped_non_udp; break;
        case detail::FrameResult::Malformed: ++cap.skipped_malformed; break;
        }
        ++index;
    }
    cap.total_records = index;
    return cap;
}

} // namespace syncscope

#endif // SYNCSCOPE_PCAP_HPP
