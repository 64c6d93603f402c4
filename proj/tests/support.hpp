// Shared helpers for the test suites: classic-pcap byte crafting (built
// by hand from the on-disk layout, independent of the parser under
// test), scratch directories and small generators.
#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

namespace testsupport {

// ---- classic pcap bytes ------------------------------------------------

inline void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v, bool big) {
    if (big) {
        out.push_back(static_cast<std::uint8_t>(v >> 8));
        out.push_back(static_cast<std::uint8_t>(v));
    } else {
        out.push_back(static_cast<std::uint8_t>(v));
        out.push_back(static_cast<std::uint8_t>(v >> 8));
    }
}

inline void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v, bool big) {
    if (big) {
        out.push_back(static_cast<std::uint8_t>(v >> 24));
        out.push_back(static_cast<std::uint8_t>(v >> 16));
        out.push_back(static_cast<std::uint8_t>(v >> 8));
        out.push_back(static_cast<std::uint8_t>(v));
    } else {
        out.push_back(static_cast<std::uint8_t>(v));
        out.push_back(static_cast<std::uint8_t>(v >> 8));
        out.push_back(static_cast<std::uint8_t>(v >> 16));
        out.push_back(static_cast<std::uint8_t>(v >> 24));
    }
}

inline std::vector<std::uint8_t> pcap_global_header(bool big,
                                                    std::uint32_t snaplen = 65535,
                                                    std::uint32_t network = 1) {
    std::vector<std::uint8_t> out;
    put_u32(out, 0xa1b2c3d4u, big);
    put_u16(out, 2, big); // version major
    put_u16(out, 4, big); // version minor
    put_u32(out, 0, big); // thiszone
    put_u32(out, 0, big); // sigfigs
    put_u32(out, snaplen, big);
    put_u32(out, network, big);
    return out;
}

inline void pcap_append_record(std::vector<std::uint8_t>& out, bool big,
                               std::uint32_t sec, std::uint32_t usec,
                               const std::vector<std::uint8_t>& payload,
                               std::uint32_t orig_len = 0) {
    put_u32(out, sec, big);
    put_u32(out, usec, big);
    put_u32(out, static_cast<std::uint32_t>(payload.size()), big);
    put_u32(out, orig_len != 0 ? orig_len
                               : static_cast<std::uint32_t>(payload.size()),
            big);
    out.insert(out.end(), payload.begin(), payload.end());
}

// Minimal Ethernet II + IPv4 + TCP frame; only the fields the SYN walk
// reads are meaningful.
inline std::vector<std::uint8_t> eth_ipv4_tcp_frame(std::uint8_t tcp_flags,
                                                    std::size_t extra_payload = 0) {
    std::vector<std::uint8_t> f;
    f.insert(f.end(), 6, 0x02); // dst mac
    f.insert(f.end(), 6, 0x04); // src mac
    f.push_back(0x08);          // ethertype IPv4
    f.push_back(0x00);

    f.push_back(0x45); // version 4, IHL 5
    f.push_back(0x00);
    put_u16(f, static_cast<std::uint16_t>(20 + 20 + extra_payload), true);
    put_u16(f, 0x1234, true); // id
    put_u16(f, 0x4000, true); // flags/frag
    f.push_back(64);          // ttl
    f.push_back(6);           // protocol TCP
    put_u16(f, 0, true);      // checksum
    put_u32(f, 0x0a000001, true); // src ip
    put_u32(f, 0x0a000002, true); // dst ip

    put_u16(f, 40000, true); // src port
    put_u16(f, 80, true);    // dst port
    put_u32(f, 1, true);     // seq
    put_u32(f, 0, true);     // ack
    f.push_back(0x50);       // data offset 5
    f.push_back(tcp_flags);
    put_u16(f, 65535, true); // window
    put_u16(f, 0, true);     // checksum
    put_u16(f, 0, true);     // urgent

    f.insert(f.end(), extra_payload, 0xaa);
    return f;
}

// A frame that is not IPv4/TCP (arbitrary ethertype + filler).
inline std::vector<std::uint8_t> eth_other_frame(std::uint16_t ethertype,
                                                 std::size_t len = 46) {
    std::vector<std::uint8_t> f;
    f.insert(f.end(), 6, 0x02);
    f.insert(f.end(), 6, 0x04);
    put_u16(f, ethertype, true);
    f.insert(f.end(), len, 0x00);
    return f;
}

// ---- filesystem scratch space -------------------------------------------

class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::mt19937_64 rng{std::random_device{}()};
        path_ = std::filesystem::temp_directory_path() /
                ("lstmad_" + tag + "_" + std::to_string(rng()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

inline void write_text(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

} // namespace testsupport
