#include "lstmad/pcap.hpp"

#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>

#include "lstmad/pipeline.hpp"

namespace lstmad {

namespace {

constexpr std::uint32_t kMagicNative = 0xa1b2c3d4;
constexpr std::uint32_t kMagicSwapped = 0xd4c3b2a1;
constexpr std::uint32_t kLinkEthernet = 1;
constexpr std::size_t kGlobalHeaderLen = 24;
constexpr std::size_t kRecordHeaderLen = 16;

inline std::uint32_t read_u32(std::span<const std::uint8_t> b, std::size_t off,
                              bool swapped) {
    const std::uint32_t v = static_cast<std::uint32_t>(b[off]) |
                            static_cast<std::uint32_t>(b[off + 1]) << 8 |
                            static_cast<std::uint32_t>(b[off + 2]) << 16 |
                            static_cast<std::uint32_t>(b[off + 3]) << 24;
    if (!swapped) return v;
    return (v >> 24) | ((v >> 8) & 0x0000ff00u) | ((v << 8) & 0x00ff0000u) |
           (v << 24);
}

[[noreturn]] void truncated_at(std::size_t offset) {
    throw std::runtime_error("truncated capture at offset " +
                             std::to_string(offset));
}

// Minimal Ethernet -> IPv4 -> TCP walk; any miss means "not a bare SYN".
bool decode_tcp_syn(std::span<const std::uint8_t> pkt) {
    constexpr std::size_t kEthLen = 14;
    if (pkt.size() < kEthLen + 20) return false;
    const std::uint16_t ethertype =
        static_cast<std::uint16_t>(pkt[12]) << 8 | pkt[13];
    if (ethertype != 0x0800) return false;

    const std::uint8_t vihl = pkt[kEthLen];
    if ((vihl >> 4) != 4) return false;
    const std::size_t ihl = static_cast<std::size_t>(vihl & 0x0f) * 4;
    if (ihl < 20 || pkt.size() < kEthLen + ihl) return false;
    if (pkt[kEthLen + 9] != 6) return false; // IP protocol TCP

    const std::size_t tcp_off = kEthLen + ihl;
    if (pkt.size() < tcp_off + 14) return false;
    const std::uint8_t flags = pkt[tcp_off + 13];
    const bool syn = (flags & 0x02) != 0;
    const bool ack = (flags & 0x10) != 0;
    return syn && !ack;
}

} // namespace

std::vector<PacketRecord> parse_pcap(std::span<const std::uint8_t> file_bytes) {
    if (file_bytes.size() < kGlobalHeaderLen) {
        if (file_bytes.size() < 4) truncated_at(0);
        const std::uint32_t magic = read_u32(file_bytes, 0, false);
        if (magic != kMagicNative && magic != kMagicSwapped) {
            throw std::runtime_error("unrecognized capture format");
        }
        truncated_at(4);
    }

    const std::uint32_t magic = read_u32(file_bytes, 0, false);
    bool swapped = false;
    if (magic == kMagicNative) {
        swapped = false;
    } else if (magic == kMagicSwapped) {
        swapped = true;
    } else {
        throw std::runtime_error("unrecognized capture format");
    }

    const std::uint32_t snaplen = read_u32(file_bytes, 16, swapped);
    const std::uint32_t link_type = read_u32(file_bytes, 20, swapped);
    if (link_type != kLinkEthernet) {
        throw std::runtime_error("unsupported link type");
    }

    std::vector<PacketRecord> records;
    std::size_t off = kGlobalHeaderLen;
    while (off < file_bytes.size()) {
        if (file_bytes.size() - off < kRecordHeaderLen) truncated_at(off);
        PacketRecord rec;
        rec.ts_sec = read_u32(file_bytes, off, swapped);
        rec.ts_usec = read_u32(file_bytes, off + 4, swapped);
        rec.captured_len = read_u32(file_bytes, off + 8, swapped);
        rec.original_len = read_u32(file_bytes, off + 12, swapped);
        if (rec.ts_usec >= 1'000'000u) {
            rec.ts_sec += rec.ts_usec / 1'000'000u;
            rec.ts_usec %= 1'000'000u;
        }
        if (rec.captured_len > snaplen) {
            throw std::runtime_error("oversized record at offset " +
                                     std::to_string(off));
        }
        const std::size_t body = off + kRecordHeaderLen;
        if (file_bytes.size() - body < rec.captured_len) truncated_at(off);
        rec.is_tcp_syn = decode_tcp_syn(file_bytes.subspan(body, rec.captured_len));
        records.push_back(rec);
        off = body + rec.captured_len;
    }
    return records;
}

std::vector<PacketRecord> parse_pcap_file(const std::string& path) {
    const std::vector<std::uint8_t> bytes = read_file_bytes(path);
    return parse_pcap(bytes);
}

} // namespace lstmad
