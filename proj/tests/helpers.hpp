#pragma once

#include <functional>
#include <set>
#include <vector>

#include "contentcast/contentcast.hpp"

namespace cc = contentcast;

namespace test_helpers {

struct TestScenario {
  std::vector<cc::ContentObject> catalog;
  std::vector<cc::ServiceRequest> requests;
  double horizon_s = 0.0;
};

struct ScenarioOptions {
  bool deadlines_at_horizon = false;  // every deadline at the horizon end
  bool ensure_all_requested = true;   // every object appears in some request
  bool ensure_shared = true;          // at least one object wanted by >= 2 users
};

// Random small scenario with integer bit sizes. With the defaults it suits
// the bound-attainment and ordering checks; deadlines are uniform otherwise.
inline TestScenario random_scenario(cc::SplitMix64& rng, const ScenarioOptions& opts = {}) {
  TestScenario s;
  const auto n_objects = static_cast<std::uint32_t>(2 + rng.below(11));  // L in [2, 12]
  const auto n_users = static_cast<std::uint32_t>(2 + rng.below(9));     // K in [2, 10]
  s.horizon_s = 5.0 + cc::SplitMix64(rng.next()).uniform01() * 45.0;
  for (std::uint32_t l = 0; l < n_objects; ++l)
    s.catalog.push_back({l, 100 + rng.below(4901)});

  for (std::uint32_t u = 0; u < n_users; ++u) {
    cc::ServiceRequest r;
    r.user_id = u;
    r.request_time_s = opts.deadlines_at_horizon ? s.horizon_s : rng.uniform_open0(s.horizon_s);
    const auto n_wanted = 1 + rng.below(std::min<std::uint64_t>(4, n_objects));
    std::set<std::uint32_t> wanted;
    while (wanted.size() < n_wanted) wanted.insert(static_cast<std::uint32_t>(rng.below(n_objects)));
    r.object_ids.assign(wanted.begin(), wanted.end());
    s.requests.push_back(std::move(r));
  }
  if (opts.ensure_shared) {
    for (std::uint32_t u : {0u, 1u}) {
      auto& ids = s.requests[u].object_ids;
      if (std::find(ids.begin(), ids.end(), 0u) == ids.end()) ids.insert(ids.begin(), 0u);
    }
  }
  if (opts.ensure_all_requested) {
    std::vector<std::uint8_t> covered(n_objects, 0);
    for (const auto& r : s.requests)
      for (std::uint32_t id : r.object_ids) covered[id] = 1;
    for (std::uint32_t l = 0; l < n_objects; ++l) {
      if (covered[l]) continue;
      auto& ids = s.requests[rng.below(n_users)].object_ids;
      ids.push_back(l);
      std::sort(ids.begin(), ids.end());
    }
  }
  return s;
}

inline std::uint64_t total_catalog_bits(const std::vector<cc::ContentObject>& catalog) {
  std::uint64_t total = 0;
  for (const auto& obj : catalog) total += obj.size_bits;
  return total;
}

inline std::uint64_t total_package_bits(const std::vector<cc::ServiceRequest>& requests,
                                        const std::vector<cc::ContentObject>& catalog) {
  std::uint64_t total = 0;
  for (const auto& r : requests) total += cc::package_bits(r, catalog);
  return total;
}

inline bool any_object_shared(const TestScenario& s) {
  std::vector<std::uint32_t> count(s.catalog.size(), 0);
  for (const auto& r : s.requests)
    for (std::uint32_t id : r.object_ids) ++count[id];
  for (std::uint32_t c : count)
    if (c >= 2) return true;
  return false;
}

// Runs fn and reports the Error code it threw, or nullopt if none.
inline std::optional<cc::ErrorCode> error_code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const cc::Error& e) {
    return e.code();
  }
  return std::nullopt;
}

}  // namespace test_helpers
