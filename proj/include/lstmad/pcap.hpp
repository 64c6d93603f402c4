#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lstmad/timeseries.hpp"

namespace lstmad {

/// Parse a classic pcap capture (magic 0xa1b2c3d4, either byte order,
/// Ethernet link type). One record per packet, in file order. A packet
/// whose headers cannot be walked down to TCP keeps is_tcp_syn = false
/// but is still returned.
std::vector<PacketRecord> parse_pcap(std::span<const std::uint8_t> file_bytes);

std::vector<PacketRecord> parse_pcap_file(const std::string& path);

} // namespace lstmad
