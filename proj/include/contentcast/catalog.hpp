#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "contentcast/errors.hpp"

namespace contentcast {

// Tolerance for event-time comparisons. Plan times are sums of float
// divisions; exact-fit schedules (completion == deadline) must not flip on
// the last ulp.
inline constexpr double kTimeEps = 1e-9;

inline bool time_leq(double a, double b) { return a <= b + kTimeEps; }

// A named content object: the indivisible unit of delivery.
struct ContentObject {
  std::uint32_t id = 0;
  std::uint64_t size_bits = 0;

  friend bool operator==(const ContentObject&, const ContentObject&) = default;
};

// One user's service package: the objects it needs, due at request_time_s.
// object_ids is kept sorted and duplicate-free.
struct ServiceRequest {
  std::uint32_t user_id = 0;
  double request_time_s = 0.0;
  std::vector<std::uint32_t> object_ids;

  friend bool operator==(const ServiceRequest&, const ServiceRequest&) = default;
};

// K x L boolean map of which user wants which object.
struct DiversityMatrix {
  std::size_t rows = 0;  // K users
  std::size_t cols = 0;  // L objects
  std::vector<std::uint8_t> bits;

  bool at(std::size_t user, std::size_t object) const { return bits[user * cols + object] != 0; }
  std::size_t row_sum(std::size_t user) const {
    std::size_t n = 0;
    for (std::size_t l = 0; l < cols; ++l) n += at(user, l) ? 1 : 0;
    return n;
  }

  friend bool operator==(const DiversityMatrix&, const DiversityMatrix&) = default;
};

// Fixed wireless resource: bandwidth B over horizon T at a flat link rate.
struct WirelessBudget {
  double bandwidth_hz = 0.0;
  double horizon_s = 0.0;
  double link_rate_bps_per_hz = 1.0;

  void validate() const {
    if (!(bandwidth_hz > 0.0) || !(horizon_s > 0.0) || !(link_rate_bps_per_hz > 0.0))
      throw Error(ErrorCode::InvalidScenario, "budget fields must be strictly positive");
  }
};

// Per-user cache capacity. Infinite is a distinct state, not a magic number.
class CacheSpec {
 public:
  static CacheSpec infinite() {
    CacheSpec c;
    c.infinite_ = true;
    return c;
  }
  static CacheSpec bits(std::uint64_t capacity) {
    CacheSpec c;
    c.capacity_ = capacity;
    return c;
  }
  static CacheSpec none() { return bits(0); }

  bool is_infinite() const { return infinite_; }
  std::uint64_t capacity_bits() const { return capacity_; }
  bool fits(std::uint64_t occupancy_bits) const { return infinite_ || occupancy_bits <= capacity_; }

  friend bool operator==(const CacheSpec&, const CacheSpec&) = default;

 private:
  bool infinite_ = false;
  std::uint64_t capacity_ = 0;
};

// Outcome of judging a delivery against its requests: who got their whole
// package in time, and the resulting content rate R_C = delivered / (B*T).
struct ContentRateReport {
  std::uint64_t delivered_bits = 0;
  double content_rate = 0.0;
  std::vector<std::uint32_t> satisfied_users;    // sorted
  std::vector<std::uint32_t> unsatisfied_users;  // sorted
};

// ---------------------------------------------------------------------------
// Catalog helpers

inline void validate_catalog(const std::vector<ContentObject>& catalog) {
  const std::size_t n = catalog.size();
  std::vector<std::uint8_t> seen(n, 0);
  for (const auto& obj : catalog) {
    if (obj.size_bits < 1)
      throw Error(ErrorCode::InvalidScenario, "object " + std::to_string(obj.id) + " has size_bits < 1");
    if (obj.id >= n || seen[obj.id])
      throw Error(ErrorCode::InvalidScenario, "object ids must be unique and dense in [0, L)");
    seen[obj.id] = 1;
  }
}

inline std::uint64_t object_size_bits(const std::vector<ContentObject>& catalog, std::uint32_t id) {
  for (const auto& obj : catalog)
    if (obj.id == id) return obj.size_bits;
  throw Error(ErrorCode::UnknownObjectId, "object " + std::to_string(id) + " not in catalog");
}

// Size table indexed by object id; catalog must be valid (dense ids).
inline std::vector<std::uint64_t> size_table(const std::vector<ContentObject>& catalog) {
  std::vector<std::uint64_t> sizes(catalog.size(), 0);
  for (const auto& obj : catalog) sizes[obj.id] = obj.size_bits;
  return sizes;
}

// |y_k|: the package size under the set-union representation.
inline std::uint64_t package_bits(const ServiceRequest& request, const std::vector<std::uint64_t>& sizes) {
  std::uint64_t total = 0;
  for (std::uint32_t id : request.object_ids) {
    if (id >= sizes.size())
      throw Error(ErrorCode::UnknownObjectId, "request references object " + std::to_string(id));
    total += sizes[id];
  }
  return total;
}

inline std::uint64_t package_bits(const ServiceRequest& request, const std::vector<ContentObject>& catalog) {
  return package_bits(request, size_table(catalog));
}

// Number of users K: user ids are required to be dense in [0, K).
inline std::uint32_t num_users(const std::vector<ServiceRequest>& requests) {
  std::uint32_t max_id = 0;
  for (const auto& r : requests) max_id = std::max(max_id, r.user_id);
  if (requests.empty()) return 0;
  const std::uint32_t k = max_id + 1;
  std::vector<std::uint8_t> seen(k, 0);
  for (const auto& r : requests) seen[r.user_id] = 1;
  for (std::uint32_t u = 0; u < k; ++u)
    if (!seen[u]) throw Error(ErrorCode::InvalidScenario, "user ids must be dense in [0, K)");
  return k;
}

// ---------------------------------------------------------------------------
// Operations

// Z_{kl} = 1 iff user k's request set contains object l.
inline DiversityMatrix build_diversity_matrix(const std::vector<ServiceRequest>& requests,
                                              const std::vector<ContentObject>& catalog) {
  validate_catalog(catalog);
  const std::uint32_t k_users = num_users(requests);
  DiversityMatrix z;
  z.rows = k_users;
  z.cols = catalog.size();
  z.bits.assign(z.rows * z.cols, 0);
  for (const auto& r : requests) {
    if (r.object_ids.empty())
      throw Error(ErrorCode::EmptyRequest, "user " + std::to_string(r.user_id) + " requests no objects");
    for (std::uint32_t id : r.object_ids) {
      if (id >= catalog.size())
        throw Error(ErrorCode::UnknownObjectId,
                    "request of user " + std::to_string(r.user_id) + " references object " + std::to_string(id));
      z.bits[r.user_id * z.cols + id] = 1;
    }
  }
  return z;
}

// Content-rate arithmetic over an already-known satisfied set. delivered_bits
// is exact integer accounting; only the final division is floating point.
inline ContentRateReport content_rate(const std::vector<ServiceRequest>& satisfied,
                                      const std::vector<ContentObject>& catalog,
                                      const WirelessBudget& budget) {
  budget.validate();
  const auto sizes = size_table(catalog);
  ContentRateReport report;
  for (const auto& r : satisfied) {
    report.delivered_bits += package_bits(r, sizes);
    report.satisfied_users.push_back(r.user_id);
  }
  std::sort(report.satisfied_users.begin(), report.satisfied_users.end());
  report.satisfied_users.erase(std::unique(report.satisfied_users.begin(), report.satisfied_users.end()),
                               report.satisfied_users.end());
  report.content_rate =
      static_cast<double>(report.delivered_bits) / (budget.bandwidth_hz * budget.horizon_s);
  return report;
}

// B_min = sum_l |x_l| / T: broadcast everything once (at link rate 1 b/s/Hz).
inline double bandwidth_lower_bound(const std::vector<ContentObject>& catalog, double horizon_s) {
  if (!(horizon_s > 0.0)) throw Error(ErrorCode::NonPositiveHorizon, "horizon must be positive");
  std::uint64_t total = 0;
  for (const auto& obj : catalog) total += obj.size_bits;
  return static_cast<double>(total) / horizon_s;
}

// B_max = sum_k |y_k| / T: every package unicast separately.
inline double bandwidth_upper_bound(const std::vector<ServiceRequest>& requests,
                                    const std::vector<ContentObject>& catalog, double horizon_s) {
  if (!(horizon_s > 0.0)) throw Error(ErrorCode::NonPositiveHorizon, "horizon must be positive");
  const auto sizes = size_table(catalog);
  std::uint64_t total = 0;
  for (const auto& r : requests) total += package_bits(r, sizes);
  return static_cast<double>(total) / horizon_s;
}

}  // namespace contentcast
