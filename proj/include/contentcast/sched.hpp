#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <vector>

#include "contentcast/achieve.hpp"
#include "contentcast/catalog.hpp"
#include "contentcast/pet.hpp"
#include "contentcast/plan.hpp"
#include "contentcast/rng.hpp"
#include "contentcast/workload.hpp"

namespace contentcast::sched {

// Whether users of a PET-enabled plan keep raw packets in cache (decode at
// request time) or decode on arrival and keep whole segments.
enum class PetCacheMode { Packets, DecodedSegments };

// The converged (broadcast push + cellular unicast) delivery configuration.
// Broadcast and cellular are independent bandwidth pools.
struct ConvergedConfig {
  double broadcast_bw_hz = 0.0;
  double cellular_bw_hz = 0.0;
  CacheSpec cache = CacheSpec::infinite();
  bool pet_enabled = false;
  double rho_floor = 0.25;
  double push_period_s = 0.0;
  std::uint32_t pet_packets = 16;  // N for the pushed-list encoding
  PetCacheMode pet_cache_mode = PetCacheMode::Packets;
};

struct DuplexBudget {
  double broadcast_hz = 0.0;
  double cellular_hz = 0.0;
  double horizon_s = 0.0;
  double link_rate = 1.0;
};

struct SimReport {
  double content_rate = 0.0;
  std::uint32_t satisfied = 0;
  std::uint32_t n_users = 0;
  std::uint64_t delivered_bits = 0;
  std::uint64_t cache_hit_bits = 0;
  std::uint64_t broadcast_bits = 0;           // transmitted on the broadcast channel
  std::uint64_t unicast_bits = 0;             // transmitted on the cellular channel
  std::uint64_t unicast_delivered_bits = 0;   // of the delivered packages, served by unicast
  double peak_cellular_load_hz = 0.0;
};

namespace detail {

struct UnicastJob {
  double deadline = 0.0;
  std::uint32_t user_id = 0;
  std::vector<std::uint32_t> objects;  // ascending ids
  std::size_t seq = 0;                 // input order, the final tie-break
};

// Earliest-deadline-first on a single cellular channel at full rate. A
// package that cannot finish by its deadline is skipped entirely rather than
// transmitted late, so transmitted bits match delivered bits for satisfied
// users.
inline void schedule_unicast_edf(std::vector<UnicastJob> jobs, const std::vector<std::uint64_t>& sizes,
                                 double cellular_bw_hz, double link_rate, DeliveryPlan& plan) {
  if (!(cellular_bw_hz > 0.0)) return;
  std::sort(jobs.begin(), jobs.end(), [](const UnicastJob& a, const UnicastJob& b) {
    if (a.deadline != b.deadline) return a.deadline < b.deadline;
    if (a.user_id != b.user_id) return a.user_id < b.user_id;
    return a.seq < b.seq;
  });
  const double rate = cellular_bw_hz * link_rate;
  double cursor = 0.0;
  for (const auto& job : jobs) {
    double total = 0.0;
    for (std::uint32_t object : job.objects) total += static_cast<double>(sizes[object]) / rate;
    if (!time_leq(cursor + total, job.deadline)) continue;
    for (std::uint32_t object : job.objects) {
      const double duration = static_cast<double>(sizes[object]) / rate;
      plan.unicast_actions.push_back({job.user_id, object, cursor, duration});
      cursor += duration;
    }
  }
}

}  // namespace detail

// Zero-cache reference plan: every package unicast to its own user.
// Best effort: packages that cannot meet their deadline are left out and the
// checker marks the miss.
inline DeliveryPlan plan_unicast(const std::vector<ServiceRequest>& requests,
                                 const std::vector<ContentObject>& catalog, double cellular_bw_hz,
                                 double link_rate = 1.0) {
  validate_catalog(catalog);
  const auto sizes = size_table(catalog);
  std::vector<detail::UnicastJob> jobs;
  jobs.reserve(requests.size());
  for (std::size_t i = 0; i < requests.size(); ++i)
    jobs.push_back({requests[i].request_time_s, requests[i].user_id, requests[i].object_ids, i});
  DeliveryPlan plan;
  detail::schedule_unicast_edf(std::move(jobs), sizes, cellular_bw_hz, link_rate, plan);
  return plan;
}

// Infinite-cache reference plan: broadcast every catalog object once, back to back
// from t = 0, every user caching everything on arrival. Objects that cannot
// finish inside the horizon are dropped.
inline DeliveryPlan plan_broadcast_all(const std::vector<ContentObject>& catalog,
                                       double broadcast_bw_hz, double horizon_s,
                                       double link_rate = 1.0) {
  validate_catalog(catalog);
  if (!(horizon_s > 0.0)) throw Error(ErrorCode::NonPositiveHorizon, "horizon must be positive");
  DeliveryPlan plan;
  if (!(broadcast_bw_hz > 0.0)) return plan;
  const auto sizes = size_table(catalog);
  const double rate = broadcast_bw_hz * link_rate;
  double cursor = 0.0;
  for (std::uint32_t id = 0; id < sizes.size(); ++id) {
    const double duration = static_cast<double>(sizes[id]) / rate;
    if (!time_leq(cursor + duration, horizon_s)) break;
    plan.broadcast_actions.push_back({PlanItem::object(id), cursor, duration});
    cursor += duration;
    plan.cache_directives.push_back({std::nullopt, PlanItem::object(id), cursor, std::nullopt});
  }
  return plan;
}

namespace detail {

struct PushPlan {
  std::vector<std::uint32_t> objects;        // pushing list, most popular first
  std::optional<pet::PetLayout> pet_layout;  // set when PET-encoded
};

// Greedy pushing list: admit objects by descending popularity while one
// period's transmission fits the broadcast budget and a full copy fits the
// user cache. With PET the admission cost is the encoded stream, recomputed
// per candidate set since thresholds shift as the set grows.
inline PushPlan build_push_list(const std::vector<std::uint64_t>& sizes,
                                const std::vector<double>& popularity, const ConvergedConfig& cfg,
                                double link_rate) {
  PushPlan push;
  const double tx_budget_bits = cfg.broadcast_bw_hz * cfg.push_period_s * link_rate;
  if (!(tx_budget_bits > 0.0)) return push;

  std::vector<std::uint32_t> order(sizes.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    if (popularity[a] != popularity[b]) return popularity[a] > popularity[b];
    return a < b;
  });

  if (!cfg.pet_enabled) {
    std::uint64_t pushed_bits = 0;
    for (std::uint32_t id : order) {
      const std::uint64_t next = pushed_bits + sizes[id];
      if (static_cast<double>(next) > tx_budget_bits || !cfg.cache.fits(next)) break;
      push.objects.push_back(id);
      pushed_bits = next;
    }
    return push;
  }

  std::vector<std::uint32_t> candidate;
  for (std::uint32_t id : order) {
    candidate.push_back(id);
    std::vector<std::uint64_t> seg_sizes;
    std::vector<double> seg_pop;
    double mass = 0.0;
    for (std::uint32_t c : candidate) mass += popularity[c];
    if (!(mass > 0.0)) break;
    for (std::uint32_t c : candidate) {
      seg_sizes.push_back(sizes[c]);
      seg_pop.push_back(popularity[c] / mass);
    }
    const auto profile = pet::assign_priorities(seg_pop, cfg.rho_floor);
    const auto layout = pet::make_layout(seg_sizes, profile, cfg.pet_packets);
    const std::uint64_t stream_bits =
        static_cast<std::uint64_t>(cfg.pet_packets) * layout.packet_symbols * 8;
    std::uint64_t cache_need = stream_bits;
    if (cfg.pet_cache_mode == PetCacheMode::DecodedSegments) {
      cache_need = 0;
      for (std::uint32_t c : candidate) cache_need += sizes[c];
    }
    if (static_cast<double>(stream_bits) > tx_budget_bits || !cfg.cache.fits(cache_need)) break;
    push.objects = candidate;
    push.pet_layout = layout;
  }
  if (push.objects.empty()) push.pet_layout.reset();
  return push;
}

}  // namespace detail

// The converged planner: the most popular contents are pushed over the
// broadcast channel each period (optionally PET-encoded with priorities
// inverse to popularity) and cached by every user; whatever a request cannot
// take from cache at its deadline is unicast earliest-deadline-first.
inline DeliveryPlan plan_converged(const std::vector<ServiceRequest>& requests,
                                   const std::vector<ContentObject>& catalog,
                                   const std::vector<double>& popularity, const ConvergedConfig& cfg,
                                   double horizon_s, double link_rate = 1.0) {
  validate_catalog(catalog);
  if (popularity.size() != catalog.size())
    throw Error(ErrorCode::InvalidArgument, "one popularity entry per object required");
  if (!(cfg.cellular_bw_hz > 0.0))
    throw Error(ErrorCode::InvalidArgument, "cellular bandwidth must be positive");
  if (cfg.broadcast_bw_hz < 0.0)
    throw Error(ErrorCode::InvalidArgument, "broadcast bandwidth must be non-negative");
  if (!(horizon_s > 0.0)) throw Error(ErrorCode::NonPositiveHorizon, "horizon must be positive");
  if (cfg.broadcast_bw_hz > 0.0 && (!(cfg.push_period_s > 0.0) || cfg.push_period_s > horizon_s))
    throw Error(ErrorCode::InvalidArgument, "push period must lie in (0, T]");

  const auto sizes = size_table(catalog);
  DeliveryPlan plan;
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> available_at(sizes.size(), inf);

  const detail::PushPlan push =
      cfg.broadcast_bw_hz > 0.0 ? detail::build_push_list(sizes, popularity, cfg, link_rate)
                                : detail::PushPlan{};

  if (!push.objects.empty()) {
    const double rate = cfg.broadcast_bw_hz * link_rate;
    const bool use_pet = push.pet_layout.has_value();
    std::vector<double> item_durations;
    if (use_pet) {
      const double packet_dur =
          static_cast<double>(push.pet_layout->packet_symbols * 8) / rate;
      item_durations.assign(cfg.pet_packets, packet_dur);
    } else {
      for (std::uint32_t id : push.objects)
        item_durations.push_back(static_cast<double>(sizes[id]) / rate);
    }
    const auto item_at = [&](std::size_t i) {
      return use_pet ? PlanItem::pet_packet(static_cast<std::uint32_t>(i))
                     : PlanItem::object(push.objects[i]);
    };

    // Rebroadcast the full list every period; only the first pass matters to
    // users present from t = 0, later passes model the periodic refresh.
    for (double period_start = 0.0; period_start < horizon_s - kTimeEps;
         period_start += cfg.push_period_s) {
      double cursor = period_start;
      for (std::size_t i = 0; i < item_durations.size(); ++i) {
        if (!time_leq(cursor + item_durations[i], horizon_s)) break;
        plan.broadcast_actions.push_back({item_at(i), cursor, item_durations[i]});
        cursor += item_durations[i];
        if (period_start == 0.0) {
          if (!use_pet || cfg.pet_cache_mode == PetCacheMode::Packets)
            plan.cache_directives.push_back({std::nullopt, item_at(i), cursor, std::nullopt});
        }
      }
    }

    if (use_pet) {
      PetStreamInfo stream;
      stream.n_packets = cfg.pet_packets;
      stream.packet_bits = push.pet_layout->packet_symbols * 8;
      const double packet_dur = static_cast<double>(stream.packet_bits) / rate;
      for (std::size_t l = 0; l < push.objects.size(); ++l) {
        const std::uint32_t k = push.pet_layout->segments[l].k;
        stream.segments.push_back({push.objects[l], k});
        available_at[push.objects[l]] = static_cast<double>(k) * packet_dur;
      }
      plan.pet = std::move(stream);
      if (cfg.pet_cache_mode == PetCacheMode::DecodedSegments)
        for (std::uint32_t id : push.objects)
          plan.cache_directives.push_back(
              {std::nullopt, PlanItem::object(id), available_at[id], std::nullopt});
    } else {
      double cursor = 0.0;
      for (std::uint32_t id : push.objects) {
        cursor += static_cast<double>(sizes[id]) / rate;
        available_at[id] = cursor;
      }
    }
  }

  // Residual demand: whatever the push cannot serve by the deadline goes over
  // the cellular channel, whole packages, earliest deadline first.
  std::vector<detail::UnicastJob> jobs;
  for (std::size_t i = 0; i < requests.size(); ++i) {
    detail::UnicastJob job;
    job.deadline = requests[i].request_time_s;
    job.user_id = requests[i].user_id;
    job.seq = i;
    for (std::uint32_t object : requests[i].object_ids)
      if (!time_leq(available_at[object], requests[i].request_time_s)) job.objects.push_back(object);
    if (!job.objects.empty()) jobs.push_back(std::move(job));
  }
  detail::schedule_unicast_edf(std::move(jobs), sizes, cfg.cellular_bw_hz, link_rate, plan);
  return plan;
}

// Event-driven replay of a plan over independent broadcast/cellular pools.
inline SimReport simulate(const DeliveryPlan& plan, const std::vector<ServiceRequest>& requests,
                          const std::vector<ContentObject>& catalog, const CacheSpec& cache,
                          const DuplexBudget& budget) {
  if (!(budget.horizon_s > 0.0)) throw Error(ErrorCode::NonPositiveHorizon, "horizon must be positive");
  if (budget.broadcast_hz < 0.0 || budget.cellular_hz < 0.0 || !(budget.broadcast_hz + budget.cellular_hz > 0.0))
    throw Error(ErrorCode::InvalidArgument, "channel budgets must be non-negative and not both zero");
  EvalChannels channels;
  channels.broadcast_hz = budget.broadcast_hz;
  channels.cellular_hz = budget.cellular_hz;
  channels.horizon_s = budget.horizon_s;
  channels.link_rate = budget.link_rate;
  channels.shared_channel = false;
  const PlanEvaluation eval = evaluate_plan(plan, requests, catalog, cache, channels);

  SimReport report;
  report.content_rate = eval.report.content_rate;
  report.satisfied = static_cast<std::uint32_t>(eval.report.satisfied_users.size());
  report.n_users = static_cast<std::uint32_t>(eval.report.satisfied_users.size() +
                                              eval.report.unsatisfied_users.size());
  report.delivered_bits = eval.report.delivered_bits;
  report.cache_hit_bits = eval.cache_hit_bits;
  report.broadcast_bits = eval.broadcast_bits_tx;
  report.unicast_bits = eval.unicast_bits_tx;
  report.unicast_delivered_bits = eval.unicast_delivered_bits;
  report.peak_cellular_load_hz = eval.peak_cellular_load_hz;
  return report;
}

// ---------------------------------------------------------------------------
// Capacity probing (the Fig.-7 style experiment)

struct CapacityProbe {
  double success_fraction = 0.95;  // trials that must satisfy every user
  std::uint32_t max_users = 4096;  // doubling cap; returned when never failing
};

namespace detail {

inline bool all_satisfied_trial(const std::vector<ContentObject>& catalog, const ConvergedConfig& cfg,
                                const workload::ZipfParams& params, workload::TraceConfig trace_cfg,
                                double link_rate) {
  const auto trace = workload::generate_trace(catalog, params, trace_cfg);
  const auto pmf = workload::zipf_pmf(params);
  const auto plan = plan_converged(trace, catalog, pmf, cfg, trace_cfg.horizon_s, link_rate);
  const auto report = simulate(plan, trace, catalog, cfg.cache,
                               {cfg.broadcast_bw_hz, cfg.cellular_bw_hz, trace_cfg.horizon_s, link_rate});
  return report.satisfied == report.n_users;
}

}  // namespace detail

// Largest K such that the required fraction of seeded trials satisfies every
// one of K users under the converged planner. Found by doubling then
// bisection; the per-trial seeds derive from the template seed, so the result
// is a pure function of its inputs.
inline std::uint32_t users_per_cell(const std::vector<ContentObject>& catalog,
                                    const ConvergedConfig& cfg, const workload::ZipfParams& params,
                                    const workload::TraceConfig& trace_template,
                                    std::uint32_t confidence_trials, const CapacityProbe& probe = {},
                                    double link_rate = 1.0) {
  if (confidence_trials == 0)
    throw Error(ErrorCode::InvalidArgument, "confidence_trials must be positive");
  std::vector<std::uint64_t> seeds(confidence_trials);
  for (std::uint32_t t = 0; t < confidence_trials; ++t) seeds[t] = derive_seed(trace_template.seed, t);
  const auto needed = static_cast<std::uint32_t>(
      std::ceil(probe.success_fraction * static_cast<double>(confidence_trials) - 1e-9));

  const auto succeeds = [&](std::uint32_t k_users) {
    std::uint32_t ok = 0;
    for (std::uint32_t t = 0; t < confidence_trials; ++t) {
      workload::TraceConfig trace_cfg = trace_template;
      trace_cfg.n_users = k_users;
      trace_cfg.seed = seeds[t];
      if (detail::all_satisfied_trial(catalog, cfg, params, trace_cfg, link_rate)) ++ok;
      if (ok + (confidence_trials - 1 - t) < needed) return false;  // cannot reach the bar
      if (ok >= needed) return true;
    }
    return ok >= needed;
  };

  if (probe.max_users == 0 || !succeeds(1)) return 0;
  std::uint32_t lo = 1;                 // largest known success
  std::optional<std::uint32_t> hi;      // smallest known failure
  std::uint32_t next = 2;
  while (!hi && lo < probe.max_users) {
    const std::uint32_t k = std::min(next, probe.max_users);
    if (succeeds(k))
      lo = k;
    else
      hi = k;
    next = next > probe.max_users / 2 ? probe.max_users : next * 2;
  }
  if (!hi) return lo;  // never failed up to and including the cap
  while (*hi - lo > 1) {
    const std::uint32_t mid = lo + (*hi - lo) / 2;
    (succeeds(mid) ? lo : *hi) = mid;
  }
  return lo;
}

struct TrialStats {
  double mean_content_rate = 0.0;
  double mean_unicast_bits = 0.0;
};

// Deterministic per-trial means at a fixed K, using the same derived seed
// sequence as users_per_cell.
inline TrialStats converged_trial_stats(const std::vector<ContentObject>& catalog,
                                        const ConvergedConfig& cfg, const workload::ZipfParams& params,
                                        const workload::TraceConfig& trace_template,
                                        std::uint32_t n_users, std::uint32_t trials,
                                        double link_rate = 1.0) {
  TrialStats stats;
  if (n_users == 0 || trials == 0) return stats;
  const auto pmf = workload::zipf_pmf(params);
  for (std::uint32_t t = 0; t < trials; ++t) {
    workload::TraceConfig trace_cfg = trace_template;
    trace_cfg.n_users = n_users;
    trace_cfg.seed = derive_seed(trace_template.seed, t);
    const auto trace = workload::generate_trace(catalog, params, trace_cfg);
    const auto plan = plan_converged(trace, catalog, pmf, cfg, trace_cfg.horizon_s, link_rate);
    const auto report = simulate(plan, trace, catalog, cfg.cache,
                                 {cfg.broadcast_bw_hz, cfg.cellular_bw_hz, trace_cfg.horizon_s, link_rate});
    stats.mean_content_rate += report.content_rate;
    stats.mean_unicast_bits += static_cast<double>(report.unicast_bits);
  }
  stats.mean_content_rate /= static_cast<double>(trials);
  stats.mean_unicast_bits /= static_cast<double>(trials);
  return stats;
}

}  // namespace contentcast::sched
