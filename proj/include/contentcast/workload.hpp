#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "contentcast/catalog.hpp"
#include "contentcast/errors.hpp"
#include "contentcast/rng.hpp"

namespace contentcast::workload {

// Zipf popularity: p_i proportional to 1/(i+1)^s over ranks i = 0..L-1,
// rank 0 being the most popular. s = 0 degenerates to uniform.
struct ZipfParams {
  double exponent_s = 1.0;
  std::uint32_t n_items = 0;
};

struct TraceConfig {
  std::uint32_t n_users = 0;
  double horizon_s = 0.0;
  std::uint32_t requests_per_user = 1;
  std::uint32_t objects_per_request = 1;
  std::uint64_t seed = 0;
};

inline std::vector<double> zipf_pmf(const ZipfParams& params) {
  if (params.n_items == 0) throw Error(ErrorCode::ZeroItems, "Zipf catalog must be non-empty");
  if (params.exponent_s < 0.0)
    throw Error(ErrorCode::BadDistribution, "Zipf exponent must be non-negative");
  std::vector<double> pmf(params.n_items);
  double norm = 0.0;
  for (std::uint32_t i = 0; i < params.n_items; ++i) {
    pmf[i] = 1.0 / std::pow(static_cast<double>(i + 1), params.exponent_s);
    norm += pmf[i];
  }
  for (double& p : pmf) p /= norm;
  return pmf;
}

// Convenience catalog with dense ids and one size for every object.
inline std::vector<ContentObject> make_uniform_catalog(std::uint32_t n_items,
                                                       std::uint64_t size_bits) {
  std::vector<ContentObject> catalog(n_items);
  for (std::uint32_t i = 0; i < n_items; ++i) catalog[i] = {i, size_bits};
  return catalog;
}

namespace detail {

// Inverse-CDF draw over the still-available items. Walking ranks in
// ascending order makes a draw under a more skewed pmf never pick a larger
// rank than under a flatter one for the same uniform variate, which the
// capacity sweeps rely on for their monotonicity guarantees.
inline std::uint32_t draw_weighted(const std::vector<double>& weights,
                                   const std::vector<std::uint8_t>& taken, double total,
                                   double u01) {
  const double target = u01 * total;
  double acc = 0.0;
  std::uint32_t last_available = 0;
  for (std::uint32_t i = 0; i < weights.size(); ++i) {
    if (taken[i]) continue;
    acc += weights[i];
    last_available = i;
    if (target < acc) return i;
  }
  return last_available;  // guards against accumulated rounding at u ~ 1
}

}  // namespace detail

// Seeded Zipf request trace: every request draws objects_per_request distinct
// objects (weighted, without replacement within the request) and a request
// time uniform over (0, T]. SplitMix64 is the only entropy source, so a seed
// fully determines the trace. Users consume a fixed number of draws each, so
// a trace with K users is a prefix of the trace with K+1 under the same seed.
inline std::vector<ServiceRequest> generate_trace(const std::vector<ContentObject>& catalog,
                                                  const ZipfParams& params,
                                                  const TraceConfig& cfg) {
  if (catalog.size() != params.n_items)
    throw Error(ErrorCode::InvalidScenario, "catalog length must equal n_items");
  if (cfg.objects_per_request > params.n_items)
    throw Error(ErrorCode::TooFewObjects, "objects_per_request exceeds catalog size");
  if (cfg.objects_per_request == 0 || cfg.requests_per_user == 0 || cfg.n_users == 0 ||
      !(cfg.horizon_s > 0.0))
    throw Error(ErrorCode::InvalidArgument, "trace config fields must be positive");

  const std::vector<double> pmf = zipf_pmf(params);
  SplitMix64 rng(cfg.seed);

  std::vector<ServiceRequest> trace;
  trace.reserve(static_cast<std::size_t>(cfg.n_users) * cfg.requests_per_user);
  std::vector<std::uint8_t> taken(params.n_items, 0);
  for (std::uint32_t user = 0; user < cfg.n_users; ++user) {
    for (std::uint32_t r = 0; r < cfg.requests_per_user; ++r) {
      ServiceRequest request;
      request.user_id = user;
      request.request_time_s = rng.uniform_open0(cfg.horizon_s);
      std::fill(taken.begin(), taken.end(), 0);
      double remaining = 1.0;
      for (std::uint32_t d = 0; d < cfg.objects_per_request; ++d) {
        const std::uint32_t pick = detail::draw_weighted(pmf, taken, remaining, rng.uniform01());
        taken[pick] = 1;
        remaining -= pmf[pick];
        request.object_ids.push_back(pick);
      }
      std::sort(request.object_ids.begin(), request.object_ids.end());
      trace.push_back(std::move(request));
    }
  }
  return trace;
}

}  // namespace contentcast::workload
