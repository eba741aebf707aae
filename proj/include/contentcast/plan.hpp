#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "contentcast/catalog.hpp"

namespace contentcast {

// What a broadcast carries and what a cache slot holds: either a whole
// content object or one packet of the plan's PET stream.
struct PlanItem {
  enum class Kind : std::uint8_t { Object, PetPacket };
  Kind kind = Kind::Object;
  std::uint32_t id = 0;  // object id, or packet index within the PET stream

  static PlanItem object(std::uint32_t object_id) { return {Kind::Object, object_id}; }
  static PlanItem pet_packet(std::uint32_t packet_index) { return {Kind::PetPacket, packet_index}; }

  friend bool operator==(const PlanItem&, const PlanItem&) = default;
  friend bool operator<(const PlanItem& a, const PlanItem& b) {
    if (a.kind != b.kind) return a.kind < b.kind;
    return a.id < b.id;
  }
};

// One transmission on the shared broadcast channel.
struct BroadcastAction {
  PlanItem item;
  double start_s = 0.0;
  double duration_s = 0.0;

  friend bool operator==(const BroadcastAction&, const BroadcastAction&) = default;
};

// One addressed transmission on the cellular/unicast channel.
struct UnicastAction {
  std::uint32_t user_id = 0;
  std::uint32_t object_id = 0;
  double start_s = 0.0;
  double duration_s = 0.0;

  friend bool operator==(const UnicastAction&, const UnicastAction&) = default;
};

// Cache admission/eviction instruction. user_id == nullopt addresses every
// user (broadcast reception is universal); evict_at_s == nullopt keeps the
// item until the horizon.
struct CacheDirective {
  std::optional<std::uint32_t> user_id;
  PlanItem item;
  double admit_at_s = 0.0;
  std::optional<double> evict_at_s;

  friend bool operator==(const CacheDirective&, const CacheDirective&) = default;
};

// Decode thresholds of the PET stream a plan broadcasts, if any. Segment l
// becomes decodable once a user holds >= k distinct packet indices; payload
// bytes are not simulated, only sizes and thresholds.
struct PetStreamInfo {
  struct SegmentThreshold {
    std::uint32_t object_id = 0;
    std::uint32_t k = 0;

    friend bool operator==(const SegmentThreshold&, const SegmentThreshold&) = default;
  };

  std::uint32_t n_packets = 0;
  std::uint64_t packet_bits = 0;
  std::vector<SegmentThreshold> segments;

  std::optional<std::uint32_t> threshold_for(std::uint32_t object_id) const {
    for (const auto& s : segments)
      if (s.object_id == object_id) return s.k;
    return std::nullopt;
  }

  friend bool operator==(const PetStreamInfo&, const PetStreamInfo&) = default;
};

// A complete timed delivery strategy: what is broadcast, what is unicast to
// whom, and what each user caches. Plans are judged by the achievability
// checker, never rejected for being wasteful.
struct DeliveryPlan {
  std::vector<BroadcastAction> broadcast_actions;
  std::vector<UnicastAction> unicast_actions;
  std::vector<CacheDirective> cache_directives;
  std::optional<PetStreamInfo> pet;

  bool empty() const {
    return broadcast_actions.empty() && unicast_actions.empty() && cache_directives.empty();
  }

  friend bool operator==(const DeliveryPlan&, const DeliveryPlan&) = default;
};

}  // namespace contentcast
