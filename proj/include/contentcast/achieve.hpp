#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "contentcast/catalog.hpp"
#include "contentcast/plan.hpp"

namespace contentcast {

// Channel capacities a plan is judged against. With shared_channel set, every
// action draws from the broadcast pool (the single-channel model of the
// content-rate definition); otherwise broadcast and cellular are independent
// pools, as in the converged architecture.
struct EvalChannels {
  double broadcast_hz = 0.0;
  double cellular_hz = 0.0;
  double horizon_s = 0.0;
  double link_rate = 1.0;
  bool shared_channel = false;

  double total_hz() const { return shared_channel ? broadcast_hz : broadcast_hz + cellular_hz; }
};

// Everything the checker learns from replaying one plan.
struct PlanEvaluation {
  ContentRateReport report;
  std::vector<std::uint8_t> request_satisfied;  // aligned with the request list
  std::uint64_t cache_hit_bits = 0;             // satisfied packages served from cache/PET
  std::uint64_t unicast_delivered_bits = 0;     // satisfied packages served by unicast
  std::uint64_t broadcast_bits_tx = 0;          // transmitted on the broadcast channel
  std::uint64_t unicast_bits_tx = 0;            // transmitted on the cellular channel
  double peak_broadcast_load_hz = 0.0;
  double peak_cellular_load_hz = 0.0;
};

namespace detail_eval {

struct Interval {
  double start = 0.0;
  double end = 0.0;  // +inf = kept until the horizon
};

inline bool covers(const std::vector<Interval>& intervals, double t) {
  for (const auto& iv : intervals)
    if (time_leq(iv.start, t) && time_leq(t, iv.end)) return true;
  return false;
}

inline void merge_intervals(std::vector<Interval>& intervals) {
  if (intervals.size() < 2) return;
  std::sort(intervals.begin(), intervals.end(),
            [](const Interval& a, const Interval& b) { return a.start < b.start; });
  std::vector<Interval> merged;
  merged.push_back(intervals.front());
  for (std::size_t i = 1; i < intervals.size(); ++i) {
    if (time_leq(intervals[i].start, merged.back().end))
      merged.back().end = std::max(merged.back().end, intervals[i].end);
    else
      merged.push_back(intervals[i]);
  }
  intervals = std::move(merged);
}

// Sweeps the plan's load on one channel; throws when any instant exceeds the
// budget and reports the peak in Hz.
inline double sweep_channel(std::vector<std::pair<double, double>>& events, double budget_hz,
                            const char* channel_name) {
  // removals (negative deltas) first at equal times, so back-to-back actions
  // hand the channel over without a phantom overlap
  std::sort(events.begin(), events.end());
  double load = 0.0;
  double peak = 0.0;
  std::size_t i = 0;
  while (i < events.size()) {
    const double t = events[i].first;
    while (i < events.size() && events[i].first == t) load += events[i++].second;
    peak = std::max(peak, load);
    if (load > budget_hz * (1.0 + 1e-9) + 1e-9)
      throw Error(ErrorCode::PlanExceedsBandwidth,
                  std::string(channel_name) + " load " + std::to_string(load) + " Hz exceeds budget " +
                      std::to_string(budget_hz) + " Hz");
  }
  return peak;
}

}  // namespace detail_eval

// Replays a delivery plan against the requests. A request is met when every
// object of its package is available at its deadline, through a completed
// unicast, a cached whole object, or a met PET threshold; a user is satisfied
// when all of its requests are met and its cache never overflows. Malformed
// plans (bad references, actions outside [0, T], bandwidth overruns) are hard
// errors; everything else is judged, not rejected.
inline PlanEvaluation evaluate_plan(const DeliveryPlan& plan,
                                    const std::vector<ServiceRequest>& requests,
                                    const std::vector<ContentObject>& catalog,
                                    const CacheSpec& cache, const EvalChannels& channels) {
  validate_catalog(catalog);
  if (!(channels.horizon_s > 0.0))
    throw Error(ErrorCode::NonPositiveHorizon, "horizon must be positive");
  const auto sizes = size_table(catalog);
  const std::uint32_t n_users = num_users(requests);
  const double horizon = channels.horizon_s;

  for (const auto& r : requests) {
    if (r.object_ids.empty()) throw Error(ErrorCode::EmptyRequest, "request with no objects");
    if (!(r.request_time_s > 0.0) || !time_leq(r.request_time_s, horizon))
      throw Error(ErrorCode::InvalidScenario, "request time outside (0, T]");
  }

  const auto item_bits = [&](const PlanItem& item) -> std::uint64_t {
    if (item.kind == PlanItem::Kind::Object) {
      if (item.id >= sizes.size())
        throw Error(ErrorCode::InvalidPlan, "plan references unknown object " + std::to_string(item.id));
      return sizes[item.id];
    }
    if (!plan.pet || item.id >= plan.pet->n_packets)
      throw Error(ErrorCode::InvalidPlan, "plan references a PET packet without a matching stream");
    return plan.pet->packet_bits;
  };
  if (plan.pet) {
    for (const auto& seg : plan.pet->segments)
      if (seg.object_id >= sizes.size() || seg.k == 0 || seg.k > plan.pet->n_packets)
        throw Error(ErrorCode::InvalidPlan, "PET stream thresholds are inconsistent");
  }

  const auto check_span = [&](double start, double duration, std::uint64_t bits) {
    if (!(start >= -kTimeEps) || !time_leq(start + duration, horizon))
      throw Error(ErrorCode::InvalidPlan, "action lies outside [0, T]");
    if (duration < 0.0 || (duration <= 0.0 && bits > 0))
      throw Error(ErrorCode::PlanExceedsBandwidth, "action with positive bits needs positive duration");
  };

  // --- channel load sweep --------------------------------------------------
  std::vector<std::pair<double, double>> broadcast_events;
  std::vector<std::pair<double, double>> cellular_events;
  PlanEvaluation eval;

  for (const auto& action : plan.broadcast_actions) {
    const std::uint64_t bits = item_bits(action.item);
    check_span(action.start_s, action.duration_s, bits);
    eval.broadcast_bits_tx += bits;
    if (bits == 0) continue;
    const double rate_hz = static_cast<double>(bits) / (action.duration_s * channels.link_rate);
    broadcast_events.emplace_back(action.start_s, rate_hz);
    broadcast_events.emplace_back(action.start_s + action.duration_s, -rate_hz);
  }
  for (const auto& action : plan.unicast_actions) {
    if (action.user_id >= n_users)
      throw Error(ErrorCode::InvalidPlan, "unicast to unknown user " + std::to_string(action.user_id));
    const std::uint64_t bits = item_bits(PlanItem::object(action.object_id));
    check_span(action.start_s, action.duration_s, bits);
    eval.unicast_bits_tx += bits;
    if (bits == 0) continue;
    const double rate_hz = static_cast<double>(bits) / (action.duration_s * channels.link_rate);
    cellular_events.emplace_back(action.start_s, rate_hz);
    cellular_events.emplace_back(action.start_s + action.duration_s, -rate_hz);
  }

  if (channels.shared_channel) {
    std::vector<std::pair<double, double>> all = broadcast_events;
    all.insert(all.end(), cellular_events.begin(), cellular_events.end());
    detail_eval::sweep_channel(all, channels.broadcast_hz, "shared channel");
    // per-traffic peaks cannot exceed the combined sweep just validated
    eval.peak_cellular_load_hz =
        detail_eval::sweep_channel(cellular_events, channels.broadcast_hz, "shared channel");
    eval.peak_broadcast_load_hz =
        detail_eval::sweep_channel(broadcast_events, channels.broadcast_hz, "shared channel");
  } else {
    eval.peak_broadcast_load_hz =
        detail_eval::sweep_channel(broadcast_events, channels.broadcast_hz, "broadcast channel");
    eval.peak_cellular_load_hz =
        detail_eval::sweep_channel(cellular_events, channels.cellular_hz, "cellular channel");
  }

  // --- arrival times --------------------------------------------------------
  std::map<PlanItem, double> broadcast_done;  // earliest completion per item
  for (const auto& action : plan.broadcast_actions) {
    const double done = action.start_s + action.duration_s;
    auto [it, inserted] = broadcast_done.emplace(action.item, done);
    if (!inserted) it->second = std::min(it->second, done);
  }
  std::map<std::pair<std::uint32_t, std::uint32_t>, double> unicast_done;  // (user, object)
  for (const auto& action : plan.unicast_actions) {
    const double done = action.start_s + action.duration_s;
    auto [it, inserted] = unicast_done.emplace(std::make_pair(action.user_id, action.object_id), done);
    if (!inserted) it->second = std::min(it->second, done);
  }
  const auto unicast_done_by = [&](std::uint32_t user, std::uint32_t object, double t) {
    auto it = unicast_done.find({user, object});
    return it != unicast_done.end() && time_leq(it->second, t);
  };

  // --- per-user cache timelines ---------------------------------------------
  // A directive only takes effect if its item has arrived by the admit time;
  // duplicate admissions of one item merge into a single cached copy.
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<std::map<PlanItem, std::vector<detail_eval::Interval>>> user_cache(n_users);
  for (const auto& directive : plan.cache_directives) {
    item_bits(directive.item);  // validates the reference
    if (directive.user_id && *directive.user_id >= n_users)
      throw Error(ErrorCode::InvalidPlan, "cache directive for unknown user");
    if (!(directive.admit_at_s >= -kTimeEps) || !time_leq(directive.admit_at_s, horizon))
      throw Error(ErrorCode::InvalidPlan, "cache admission outside [0, T]");
    const double evict = directive.evict_at_s ? *directive.evict_at_s : inf;
    if (!(evict > directive.admit_at_s)) continue;  // empty interval, judged as a no-op

    const auto arrived_for = [&](std::uint32_t user) {
      auto it = broadcast_done.find(directive.item);
      if (it != broadcast_done.end() && time_leq(it->second, directive.admit_at_s)) return true;
      if (directive.item.kind != PlanItem::Kind::Object) return false;
      if (unicast_done_by(user, directive.item.id, directive.admit_at_s)) return true;
      // decoding counts as arrival: enough PET packets broadcast by the admit
      // time yield the whole object
      if (plan.pet) {
        if (auto k = plan.pet->threshold_for(directive.item.id)) {
          std::uint32_t done = 0;
          for (std::uint32_t p = 0; p < plan.pet->n_packets && done < *k; ++p) {
            auto pit = broadcast_done.find(PlanItem::pet_packet(p));
            if (pit != broadcast_done.end() && time_leq(pit->second, directive.admit_at_s)) ++done;
          }
          if (done >= *k) return true;
        }
      }
      return false;
    };
    const auto admit = [&](std::uint32_t user) {
      if (!arrived_for(user)) return;  // nothing has arrived to cache
      user_cache[user][directive.item].push_back({directive.admit_at_s, evict});
    };
    if (directive.user_id)
      admit(*directive.user_id);
    else
      for (std::uint32_t u = 0; u < n_users; ++u) admit(u);
  }
  for (auto& per_user : user_cache)
    for (auto& [item, intervals] : per_user) detail_eval::merge_intervals(intervals);

  // Occupancy must stay within M at every instant, else the user is judged
  // unsatisfied (the plan itself remains valid).
  std::vector<std::uint8_t> cache_ok(n_users, 1);
  if (!cache.is_infinite()) {
    for (std::uint32_t u = 0; u < n_users; ++u) {
      std::vector<std::pair<double, std::int64_t>> events;
      for (const auto& [item, intervals] : user_cache[u]) {
        const auto bits = static_cast<std::int64_t>(item_bits(item));
        for (const auto& iv : intervals) {
          events.emplace_back(iv.start, bits);
          if (iv.end != inf) events.emplace_back(iv.end, -bits);
        }
      }
      std::sort(events.begin(), events.end());
      std::int64_t occupancy = 0;
      std::size_t i = 0;
      while (i < events.size() && cache_ok[u]) {
        const double t = events[i].first;
        std::int64_t delta = 0;
        while (i < events.size() && events[i].first == t) delta += events[i++].second;
        occupancy += delta;
        if (occupancy > static_cast<std::int64_t>(cache.capacity_bits())) cache_ok[u] = 0;
      }
    }
  }

  const auto present_at = [&](std::uint32_t user, const PlanItem& item, double t) {
    auto it = user_cache[user].find(item);
    return it != user_cache[user].end() && detail_eval::covers(it->second, t);
  };

  // --- availability & satisfaction ------------------------------------------
  enum class Via { None, Unicast, Cache };
  const auto object_available = [&](std::uint32_t user, std::uint32_t object, double t) {
    if (unicast_done_by(user, object, t)) return Via::Unicast;
    if (present_at(user, PlanItem::object(object), t)) return Via::Cache;
    if (plan.pet) {
      if (auto k = plan.pet->threshold_for(object)) {
        std::uint32_t held = 0;
        for (std::uint32_t p = 0; p < plan.pet->n_packets && held < *k; ++p)
          if (present_at(user, PlanItem::pet_packet(p), t)) ++held;
        if (held >= *k) return Via::Cache;
      }
    }
    return Via::None;
  };

  eval.request_satisfied.assign(requests.size(), 1);
  std::vector<std::uint8_t> user_satisfied(n_users, 1);
  for (std::size_t i = 0; i < requests.size(); ++i) {
    const auto& r = requests[i];
    for (std::uint32_t object : r.object_ids) {
      if (object >= sizes.size())
        throw Error(ErrorCode::UnknownObjectId, "request references object " + std::to_string(object));
      if (object_available(r.user_id, object, r.request_time_s) == Via::None) {
        eval.request_satisfied[i] = 0;
        break;
      }
    }
    if (!eval.request_satisfied[i]) user_satisfied[r.user_id] = 0;
  }
  for (std::uint32_t u = 0; u < n_users; ++u)
    if (!cache_ok[u]) user_satisfied[u] = 0;

  for (std::size_t i = 0; i < requests.size(); ++i) {
    const auto& r = requests[i];
    if (!user_satisfied[r.user_id]) continue;
    eval.report.delivered_bits += package_bits(r, sizes);
    for (std::uint32_t object : r.object_ids) {
      if (object_available(r.user_id, object, r.request_time_s) == Via::Unicast)
        eval.unicast_delivered_bits += sizes[object];
      else
        eval.cache_hit_bits += sizes[object];
    }
  }
  for (std::uint32_t u = 0; u < n_users; ++u)
    (user_satisfied[u] ? eval.report.satisfied_users : eval.report.unsatisfied_users).push_back(u);
  eval.report.content_rate =
      static_cast<double>(eval.report.delivered_bits) / (channels.total_hz() * horizon);
  return eval;
}

// Achievability check: judges the plan on a single shared channel of
// the given budget. Cache overflow marks the affected user unsatisfied;
// exceeding the channel budget is the one hard error.
inline ContentRateReport check_achievable(const DeliveryPlan& plan,
                                          const std::vector<ServiceRequest>& requests,
                                          const std::vector<ContentObject>& catalog,
                                          const CacheSpec& cache, const WirelessBudget& budget) {
  budget.validate();
  EvalChannels channels;
  channels.broadcast_hz = budget.bandwidth_hz;
  channels.cellular_hz = budget.bandwidth_hz;
  channels.horizon_s = budget.horizon_s;
  channels.link_rate = budget.link_rate_bps_per_hz;
  channels.shared_channel = true;
  return evaluate_plan(plan, requests, catalog, cache, channels).report;
}

}  // namespace contentcast
