#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <optional>
#include <string>
#include <vector>

#include "contentcast/errors.hpp"
#include "contentcast/gf256.hpp"

namespace contentcast::pet {

// Priority Encoding Transmission over GF(2^8): L prioritized segments are
// jointly encoded into N packets of Gamma symbols so that segment l is
// recoverable from ANY ceil(rho_l * N) distinct packets. Per segment, each
// run of k_l source symbols is expanded to N symbols by a systematic MDS
// code (Vandermonde generator, evaluation points 0..N-1), one symbol per
// packet at that segment's slot offsets.

inline constexpr std::uint32_t kMaxPackets = 255;  // field-size limit over GF(2^8)
inline constexpr std::uint8_t kWireMagic0 = 0x50;  // 'P'
inline constexpr std::uint8_t kWireMagic1 = 0x45;  // 'E'
inline constexpr std::uint8_t kWireVersion = 1;
inline constexpr std::size_t kWireHeaderBytes = 9;

// Fraction of the N packets sufficient to decode each segment; smaller means
// higher priority.
struct PriorityProfile {
  std::vector<double> rhos;
};

struct SegmentLayout {
  std::uint32_t id = 0;          // caller-chosen segment id (object id, file index, ...)
  std::uint64_t size_bits = 0;   // true payload length; decode strips padding back to this
  std::uint32_t k = 0;           // decode threshold ceil(rho * N)
  std::uint32_t blocks = 0;      // number of k-symbol source blocks == slots per packet
  std::uint32_t slots_offset = 0;  // first symbol offset of this segment in every packet
};

struct PetLayout {
  std::uint32_t n_packets = 0;
  std::uint64_t packet_symbols = 0;  // Gamma
  std::vector<SegmentLayout> segments;
};

struct PetPacket {
  std::uint32_t index = 0;
  std::vector<std::uint8_t> payload;  // exactly Gamma symbols
};

inline void validate_profile(const PriorityProfile& profile) {
  for (double rho : profile.rhos)
    if (!(rho > 0.0) || rho > 1.0)
      throw Error(ErrorCode::BadPriority, "priority index must lie in (0, 1]");
}

inline std::uint32_t decode_threshold(double rho, std::uint32_t n_packets) {
  const auto k = static_cast<std::uint32_t>(std::ceil(rho * static_cast<double>(n_packets)));
  return std::clamp<std::uint32_t>(k, 1, n_packets);
}

inline std::uint64_t segment_symbols(std::uint64_t size_bits) { return (size_bits + 7) / 8; }

// ---------------------------------------------------------------------------
// GF(256) matrix helpers

namespace detail {

// Row-major square matrix inversion by Gauss-Jordan. Returns false when
// singular (cannot happen for Vandermonde submatrices with distinct points).
inline bool invert_matrix(std::vector<std::uint8_t>& m, std::uint32_t n) {
  std::vector<std::uint8_t> inv(static_cast<std::size_t>(n) * n, 0);
  for (std::uint32_t i = 0; i < n; ++i) inv[static_cast<std::size_t>(i) * n + i] = 1;

  for (std::uint32_t col = 0; col < n; ++col) {
    std::uint32_t pivot = col;
    while (pivot < n && m[static_cast<std::size_t>(pivot) * n + col] == 0) ++pivot;
    if (pivot == n) return false;
    if (pivot != col) {
      for (std::uint32_t j = 0; j < n; ++j) {
        std::swap(m[static_cast<std::size_t>(pivot) * n + j], m[static_cast<std::size_t>(col) * n + j]);
        std::swap(inv[static_cast<std::size_t>(pivot) * n + j], inv[static_cast<std::size_t>(col) * n + j]);
      }
    }
    const std::uint8_t piv_inv = gf256::inv(m[static_cast<std::size_t>(col) * n + col]);
    for (std::uint32_t j = 0; j < n; ++j) {
      m[static_cast<std::size_t>(col) * n + j] = gf256::mul(m[static_cast<std::size_t>(col) * n + j], piv_inv);
      inv[static_cast<std::size_t>(col) * n + j] = gf256::mul(inv[static_cast<std::size_t>(col) * n + j], piv_inv);
    }
    for (std::uint32_t row = 0; row < n; ++row) {
      if (row == col) continue;
      const std::uint8_t factor = m[static_cast<std::size_t>(row) * n + col];
      if (factor == 0) continue;
      for (std::uint32_t j = 0; j < n; ++j) {
        m[static_cast<std::size_t>(row) * n + j] ^=
            gf256::mul(factor, m[static_cast<std::size_t>(col) * n + j]);
        inv[static_cast<std::size_t>(row) * n + j] ^=
            gf256::mul(factor, inv[static_cast<std::size_t>(col) * n + j]);
      }
    }
  }
  m = std::move(inv);
  return true;
}

// N x k generator with evaluation points 0..N-1, normalized so the top k x k
// block is the identity (systematic) while every k-row subset stays
// invertible (MDS).
inline std::vector<std::uint8_t> generator_matrix(std::uint32_t n_packets, std::uint32_t k) {
  std::vector<std::uint8_t> vand(static_cast<std::size_t>(n_packets) * k, 0);
  for (std::uint32_t i = 0; i < n_packets; ++i)
    for (std::uint32_t j = 0; j < k; ++j)
      vand[static_cast<std::size_t>(i) * k + j] = gf256::pow(static_cast<std::uint8_t>(i), j);

  std::vector<std::uint8_t> top(static_cast<std::size_t>(k) * k, 0);
  for (std::uint32_t i = 0; i < k; ++i)
    for (std::uint32_t j = 0; j < k; ++j) top[static_cast<std::size_t>(i) * k + j] = vand[static_cast<std::size_t>(i) * k + j];
  if (!invert_matrix(top, k))
    throw Error(ErrorCode::FieldLimit, "generator construction failed (singular Vandermonde block)");

  std::vector<std::uint8_t> gen(static_cast<std::size_t>(n_packets) * k, 0);
  for (std::uint32_t i = 0; i < n_packets; ++i)
    for (std::uint32_t j = 0; j < k; ++j) {
      std::uint8_t acc = 0;
      for (std::uint32_t t = 0; t < k; ++t)
        acc ^= gf256::mul(vand[static_cast<std::size_t>(i) * k + t], top[static_cast<std::size_t>(t) * k + j]);
      gen[static_cast<std::size_t>(i) * k + j] = acc;
    }
  return gen;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Operations

// Layout for the given segment sizes; Gamma is the minimal packet length.
inline PetLayout make_layout(const std::vector<std::uint64_t>& segment_sizes_bits,
                             const PriorityProfile& profile, std::uint32_t n_packets) {
  if (n_packets < 1 || n_packets > kMaxPackets)
    throw Error(ErrorCode::FieldLimit, "packet count must lie in [1, 255]");
  if (segment_sizes_bits.size() != profile.rhos.size())
    throw Error(ErrorCode::BadPriority, "one priority index per segment required");
  validate_profile(profile);

  PetLayout layout;
  layout.n_packets = n_packets;
  std::uint64_t offset = 0;
  for (std::size_t l = 0; l < segment_sizes_bits.size(); ++l) {
    if (segment_sizes_bits[l] == 0)
      throw Error(ErrorCode::InvalidArgument, "segment sizes must be positive");
    SegmentLayout seg;
    seg.id = static_cast<std::uint32_t>(l);
    seg.size_bits = segment_sizes_bits[l];
    seg.k = decode_threshold(profile.rhos[l], n_packets);
    const std::uint64_t symbols = segment_symbols(seg.size_bits);
    seg.blocks = static_cast<std::uint32_t>((symbols + seg.k - 1) / seg.k);
    seg.slots_offset = static_cast<std::uint32_t>(offset);
    offset += seg.blocks;
    layout.segments.push_back(seg);
  }
  layout.packet_symbols = offset;
  return layout;
}

// Minimal Gamma for the proposed encoding, or nullopt when some raw
// threshold ceil(rho * N) would exceed N. With rho <= 1 that cannot happen;
// kept for clarity.
inline std::optional<std::uint64_t> pet_feasible(const std::vector<std::uint64_t>& segment_sizes_bits,
                                                 const PriorityProfile& profile,
                                                 std::uint32_t n_packets) {
  const PetLayout layout = make_layout(segment_sizes_bits, profile, n_packets);
  for (double rho : profile.rhos)
    if (std::ceil(rho * static_cast<double>(n_packets)) > static_cast<double>(n_packets))
      return std::nullopt;
  return layout.packet_symbols;
}

// Jointly encodes the segments into N packets of Gamma symbols. Fixed
// generator construction makes the output identical across runs.
inline std::pair<PetLayout, std::vector<PetPacket>> pet_encode(
    const std::vector<std::vector<std::uint8_t>>& segments, const PriorityProfile& profile,
    std::uint32_t n_packets) {
  std::vector<std::uint64_t> sizes_bits;
  sizes_bits.reserve(segments.size());
  for (const auto& s : segments) sizes_bits.push_back(static_cast<std::uint64_t>(s.size()) * 8);
  const PetLayout layout = make_layout(sizes_bits, profile, n_packets);

  std::vector<PetPacket> packets(n_packets);
  for (std::uint32_t i = 0; i < n_packets; ++i) {
    packets[i].index = i;
    packets[i].payload.assign(layout.packet_symbols, 0);
  }

  for (std::size_t l = 0; l < segments.size(); ++l) {
    const SegmentLayout& seg = layout.segments[l];
    const auto gen = detail::generator_matrix(n_packets, seg.k);
    const auto& src = segments[l];
    for (std::uint32_t b = 0; b < seg.blocks; ++b) {
      // Source block b: k symbols, zero-padded past the segment end.
      for (std::uint32_t i = 0; i < n_packets; ++i) {
        std::uint8_t acc = 0;
        for (std::uint32_t j = 0; j < seg.k; ++j) {
          const std::uint64_t pos = static_cast<std::uint64_t>(b) * seg.k + j;
          const std::uint8_t sym = pos < src.size() ? src[pos] : 0;
          acc ^= gf256::mul(gen[static_cast<std::size_t>(i) * seg.k + j], sym);
        }
        packets[i].payload[seg.slots_offset + b] = acc;
      }
    }
  }
  return {layout, std::move(packets)};
}

struct DecodeResult {
  // One entry per layout segment; nullopt = below threshold, not an error.
  std::vector<std::optional<std::vector<std::uint8_t>>> segments;

  bool all_decoded() const {
    for (const auto& s : segments)
      if (!s) return false;
    return true;
  }
};

// Recovers every segment whose threshold is met by the given packets.
inline DecodeResult pet_decode(const PetLayout& layout, const std::vector<PetPacket>& packets) {
  std::vector<std::uint8_t> seen(layout.n_packets, 0);
  for (const auto& p : packets) {
    if (p.index >= layout.n_packets)
      throw Error(ErrorCode::CorruptPacket, "packet index " + std::to_string(p.index) + " out of range");
    if (p.payload.size() != layout.packet_symbols)
      throw Error(ErrorCode::CorruptPacket, "packet payload length does not match Gamma");
    if (seen[p.index])
      throw Error(ErrorCode::DuplicateIndex, "packet index " + std::to_string(p.index) + " repeated");
    seen[p.index] = 1;
  }

  std::vector<std::uint32_t> indices;
  indices.reserve(packets.size());
  for (std::uint32_t i = 0; i < layout.n_packets; ++i)
    if (seen[i]) indices.push_back(i);
  std::vector<const PetPacket*> by_index(layout.n_packets, nullptr);
  for (const auto& p : packets) by_index[p.index] = &p;

  DecodeResult result;
  result.segments.resize(layout.segments.size());
  for (std::size_t l = 0; l < layout.segments.size(); ++l) {
    const SegmentLayout& seg = layout.segments[l];
    if (indices.size() < seg.k) continue;  // NotYetDecodable

    // Any k received rows of the generator form an invertible system; use the
    // k lowest indices.
    const auto gen = detail::generator_matrix(layout.n_packets, seg.k);
    std::vector<std::uint8_t> sub(static_cast<std::size_t>(seg.k) * seg.k, 0);
    for (std::uint32_t r = 0; r < seg.k; ++r)
      for (std::uint32_t j = 0; j < seg.k; ++j)
        sub[static_cast<std::size_t>(r) * seg.k + j] = gen[static_cast<std::size_t>(indices[r]) * seg.k + j];
    if (!detail::invert_matrix(sub, seg.k))
      throw Error(ErrorCode::CorruptPacket, "received packet set is not invertible");

    const std::uint64_t symbols = segment_symbols(seg.size_bits);
    std::vector<std::uint8_t> out(static_cast<std::size_t>(seg.blocks) * seg.k, 0);
    for (std::uint32_t b = 0; b < seg.blocks; ++b) {
      for (std::uint32_t j = 0; j < seg.k; ++j) {
        std::uint8_t acc = 0;
        for (std::uint32_t r = 0; r < seg.k; ++r) {
          const std::uint8_t sym = by_index[indices[r]]->payload[seg.slots_offset + b];
          acc ^= gf256::mul(sub[static_cast<std::size_t>(j) * seg.k + r], sym);
        }
        out[static_cast<std::size_t>(b) * seg.k + j] = acc;
      }
    }
    out.resize(symbols);  // strip block padding back to the true length
    result.segments[l] = std::move(out);
  }
  return result;
}

// Maps a popularity distribution to priority indices: strictly more popular
// segments get strictly smaller rho (ties equal), rank-linear between
// rho_floor for the most popular and 1 for the least.
inline PriorityProfile assign_priorities(const std::vector<double>& popularities, double rho_floor) {
  if (!(rho_floor > 0.0) || rho_floor > 1.0)
    throw Error(ErrorCode::BadDistribution, "rho_floor must lie in (0, 1]");
  double sum = 0.0;
  for (double p : popularities) {
    if (p < 0.0) throw Error(ErrorCode::BadDistribution, "popularities must be non-negative");
    sum += p;
  }
  if (popularities.empty() || std::abs(sum - 1.0) > 1e-9)
    throw Error(ErrorCode::BadDistribution, "popularities must sum to 1");

  std::vector<double> distinct(popularities);
  std::sort(distinct.begin(), distinct.end(), std::greater<>());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  const std::size_t m = distinct.size();

  PriorityProfile profile;
  profile.rhos.resize(popularities.size());
  for (std::size_t l = 0; l < popularities.size(); ++l) {
    const std::size_t rank = static_cast<std::size_t>(
        std::lower_bound(distinct.begin(), distinct.end(), popularities[l], std::greater<>()) -
        distinct.begin());
    // anchored at 1 for the least popular rank so rho = 1 stays exact
    const double rho = m == 1 ? 1.0
                              : 1.0 - (1.0 - rho_floor) * static_cast<double>(m - 1 - rank) /
                                          static_cast<double>(m - 1);
    profile.rhos[l] = std::clamp(rho, rho_floor, 1.0);
  }
  return profile;
}

// ---------------------------------------------------------------------------
// Packet wire format (bit-exact):
//   0x50 0x45 | version u8 | packet index u8 | N u8 | Gamma u32 big-endian |
//   Gamma payload bytes

inline std::vector<std::uint8_t> serialize_packet(const PetPacket& packet, std::uint32_t n_packets) {
  if (n_packets < 1 || n_packets > kMaxPackets || packet.index >= n_packets)
    throw Error(ErrorCode::FieldLimit, "packet index/count out of range for wire format");
  const std::uint64_t gamma = packet.payload.size();
  if (gamma > 0xffffffffull)
    throw Error(ErrorCode::FieldLimit, "Gamma exceeds the 4-byte wire field");
  std::vector<std::uint8_t> out;
  out.reserve(kWireHeaderBytes + packet.payload.size());
  out.push_back(kWireMagic0);
  out.push_back(kWireMagic1);
  out.push_back(kWireVersion);
  out.push_back(static_cast<std::uint8_t>(packet.index));
  out.push_back(static_cast<std::uint8_t>(n_packets));
  out.push_back(static_cast<std::uint8_t>((gamma >> 24) & 0xff));
  out.push_back(static_cast<std::uint8_t>((gamma >> 16) & 0xff));
  out.push_back(static_cast<std::uint8_t>((gamma >> 8) & 0xff));
  out.push_back(static_cast<std::uint8_t>(gamma & 0xff));
  out.insert(out.end(), packet.payload.begin(), packet.payload.end());
  return out;
}

struct WirePacket {
  PetPacket packet;
  std::uint32_t n_packets = 0;
};

inline WirePacket parse_packet(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < kWireHeaderBytes)
    throw Error(ErrorCode::CorruptPacket, "packet shorter than wire header");
  if (bytes[0] != kWireMagic0 || bytes[1] != kWireMagic1)
    throw Error(ErrorCode::CorruptPacket, "bad packet magic");
  if (bytes[2] != kWireVersion)
    throw Error(ErrorCode::CorruptPacket, "unsupported packet version " + std::to_string(bytes[2]));
  WirePacket wire;
  wire.packet.index = bytes[3];
  wire.n_packets = bytes[4];
  const std::uint64_t gamma = (static_cast<std::uint64_t>(bytes[5]) << 24) |
                              (static_cast<std::uint64_t>(bytes[6]) << 16) |
                              (static_cast<std::uint64_t>(bytes[7]) << 8) | bytes[8];
  if (bytes.size() != kWireHeaderBytes + gamma)
    throw Error(ErrorCode::CorruptPacket, "packet payload length does not match header Gamma");
  if (wire.n_packets == 0 || wire.packet.index >= wire.n_packets)
    throw Error(ErrorCode::CorruptPacket, "packet index out of range");
  wire.packet.payload.assign(bytes.begin() + kWireHeaderBytes, bytes.end());
  return wire;
}

}  // namespace contentcast::pet
