#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "contentcast/catalog.hpp"
#include "contentcast/crowd.hpp"
#include "contentcast/errors.hpp"
#include "contentcast/pet.hpp"
#include "contentcast/sched.hpp"
#include "contentcast/workload.hpp"

namespace contentcast::io {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Plain-text helpers. CSV is pinned down hard: '.' decimal, ',' separator,
// '\n' line endings, mandatory header — reproducibility depends on it.

inline std::string fmt_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  out << content;
  if (!out) throw Error(ErrorCode::IoError, "short write to " + path);
}

inline std::vector<std::uint8_t> read_binary(const std::string& path) {
  const std::string s = read_file(path);
  return std::vector<std::uint8_t>(s.begin(), s.end());
}

inline void write_binary(const std::string& path, const std::vector<std::uint8_t>& bytes) {
  write_file(path, std::string(bytes.begin(), bytes.end()));
}

inline json parse_json(const std::string& text, const std::string& origin) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw Error(ErrorCode::ConfigError, "invalid JSON in " + origin);
  return j;
}

namespace detail {

template <typename T>
T require(const json& j, const char* key, const std::string& origin) {
  if (!j.contains(key))
    throw Error(ErrorCode::ConfigError, origin + ": missing key '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorCode::ConfigError, origin + ": key '" + key + "' has the wrong type");
  }
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorCode::ConfigError, std::string("key '") + key + "' has the wrong type");
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Scenario files

struct Scenario {
  std::vector<ContentObject> catalog;
  std::vector<ServiceRequest> requests;
  WirelessBudget budget;
  CacheSpec cache = CacheSpec::none();
};

inline json cache_to_json(const CacheSpec& cache) {
  if (cache.is_infinite()) return json("inf");
  return json(cache.capacity_bits());
}

inline CacheSpec cache_from_json(const json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "inf") return CacheSpec::infinite();
    throw Error(ErrorCode::ConfigError, "cache_bits must be an integer or \"inf\"");
  }
  if (!j.is_number_unsigned() && !j.is_number_integer())
    throw Error(ErrorCode::ConfigError, "cache_bits must be an integer or \"inf\"");
  const auto v = j.get<std::int64_t>();
  if (v < 0) throw Error(ErrorCode::ConfigError, "cache_bits must be non-negative");
  return CacheSpec::bits(static_cast<std::uint64_t>(v));
}

inline void validate_scenario(const Scenario& scenario) {
  validate_catalog(scenario.catalog);
  scenario.budget.validate();
  num_users(scenario.requests);
  for (const auto& r : scenario.requests) {
    if (r.object_ids.empty())
      throw Error(ErrorCode::EmptyRequest, "user " + std::to_string(r.user_id) + " requests nothing");
    for (std::size_t i = 0; i < r.object_ids.size(); ++i) {
      if (r.object_ids[i] >= scenario.catalog.size())
        throw Error(ErrorCode::UnknownObjectId,
                    "request references object " + std::to_string(r.object_ids[i]));
      if (i > 0 && r.object_ids[i] <= r.object_ids[i - 1])
        throw Error(ErrorCode::InvalidScenario, "request object ids must be strictly increasing");
    }
    if (!(r.request_time_s > 0.0) || !time_leq(r.request_time_s, scenario.budget.horizon_s))
      throw Error(ErrorCode::InvalidScenario, "request time outside (0, T]");
  }
}

inline json scenario_to_json(const Scenario& scenario) {
  json j;
  j["catalog"] = json::array();
  for (const auto& obj : scenario.catalog)
    j["catalog"].push_back({{"id", obj.id}, {"size_bits", obj.size_bits}});
  j["requests"] = json::array();
  for (const auto& r : scenario.requests)
    j["requests"].push_back(
        {{"user_id", r.user_id}, {"t_s", r.request_time_s}, {"objects", r.object_ids}});
  j["budget"] = {{"bandwidth_hz", scenario.budget.bandwidth_hz},
                 {"horizon_s", scenario.budget.horizon_s},
                 {"link_rate", scenario.budget.link_rate_bps_per_hz}};
  j["cache_bits"] = cache_to_json(scenario.cache);
  return j;
}

inline Scenario scenario_from_json(const json& j, const std::string& origin = "scenario") {
  Scenario scenario;
  for (const auto& entry : detail::require<json>(j, "catalog", origin)) {
    ContentObject obj;
    obj.id = detail::require<std::uint32_t>(entry, "id", origin);
    obj.size_bits = detail::require<std::uint64_t>(entry, "size_bits", origin);
    scenario.catalog.push_back(obj);
  }
  for (const auto& entry : detail::require<json>(j, "requests", origin)) {
    ServiceRequest r;
    r.user_id = detail::require<std::uint32_t>(entry, "user_id", origin);
    r.request_time_s = detail::require<double>(entry, "t_s", origin);
    r.object_ids = detail::require<std::vector<std::uint32_t>>(entry, "objects", origin);
    std::sort(r.object_ids.begin(), r.object_ids.end());
    scenario.requests.push_back(std::move(r));
  }
  const json budget = detail::require<json>(j, "budget", origin);
  scenario.budget.bandwidth_hz = detail::require<double>(budget, "bandwidth_hz", origin);
  scenario.budget.horizon_s = detail::require<double>(budget, "horizon_s", origin);
  scenario.budget.link_rate_bps_per_hz = detail::get_or<double>(budget, "link_rate", 1.0);
  if (!j.contains("cache_bits"))
    throw Error(ErrorCode::ConfigError, origin + ": missing key 'cache_bits'");
  scenario.cache = cache_from_json(j.at("cache_bits"));
  validate_scenario(scenario);
  return scenario;
}

inline Scenario load_scenario(const std::string& path) {
  return scenario_from_json(parse_json(read_file(path), path), path);
}

inline void save_scenario(const std::string& path, const Scenario& scenario) {
  write_file(path, scenario_to_json(scenario).dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// Reports

inline constexpr const char* kReportCsvHeader =
    "scenario_id,B,T,M,delivered_bits,content_rate,n_satisfied,n_users";

inline std::string cache_to_csv(const CacheSpec& cache) {
  return cache.is_infinite() ? "inf" : std::to_string(cache.capacity_bits());
}

inline std::string report_csv_row(const std::string& scenario_id, const WirelessBudget& budget,
                                  const CacheSpec& cache, const ContentRateReport& report) {
  std::ostringstream row;
  row << scenario_id << ',' << fmt_double(budget.bandwidth_hz) << ',' << fmt_double(budget.horizon_s)
      << ',' << cache_to_csv(cache) << ',' << report.delivered_bits << ','
      << fmt_double(report.content_rate) << ',' << report.satisfied_users.size() << ','
      << report.satisfied_users.size() + report.unsatisfied_users.size();
  return row.str();
}

inline json report_to_json(const ContentRateReport& report) {
  return json{{"delivered_bits", report.delivered_bits},
              {"content_rate", report.content_rate},
              {"satisfied_users", report.satisfied_users},
              {"unsatisfied_users", report.unsatisfied_users}};
}

inline json sim_report_to_json(const sched::SimReport& report) {
  return json{{"content_rate", report.content_rate},
              {"satisfied", report.satisfied},
              {"n_users", report.n_users},
              {"delivered_bits", report.delivered_bits},
              {"cache_hit_bits", report.cache_hit_bits},
              {"broadcast_bits", report.broadcast_bits},
              {"unicast_bits", report.unicast_bits},
              {"unicast_delivered_bits", report.unicast_delivered_bits},
              {"peak_cellular_load_hz", report.peak_cellular_load_hz}};
}

// ---------------------------------------------------------------------------
// PET layout files

inline json layout_to_json(const pet::PetLayout& layout) {
  json segments = json::array();
  for (const auto& seg : layout.segments)
    segments.push_back({{"id", seg.id},
                        {"size_bits", seg.size_bits},
                        {"k", seg.k},
                        {"slots_offset", seg.slots_offset},
                        {"slots_len", seg.blocks}});
  return json{{"n", layout.n_packets}, {"gamma", layout.packet_symbols}, {"segments", segments}};
}

inline pet::PetLayout layout_from_json(const json& j, const std::string& origin = "layout") {
  pet::PetLayout layout;
  layout.n_packets = detail::require<std::uint32_t>(j, "n", origin);
  layout.packet_symbols = detail::require<std::uint64_t>(j, "gamma", origin);
  for (const auto& entry : detail::require<json>(j, "segments", origin)) {
    pet::SegmentLayout seg;
    seg.id = detail::require<std::uint32_t>(entry, "id", origin);
    seg.size_bits = detail::require<std::uint64_t>(entry, "size_bits", origin);
    seg.k = detail::require<std::uint32_t>(entry, "k", origin);
    seg.slots_offset = detail::require<std::uint32_t>(entry, "slots_offset", origin);
    seg.blocks = detail::require<std::uint32_t>(entry, "slots_len", origin);
    layout.segments.push_back(seg);
  }
  return layout;
}

// ---------------------------------------------------------------------------
// Crowdsourcing records

inline crowd::TaskProfile task_from_json(const json& j, const std::string& origin) {
  crowd::TaskProfile task;
  task.task_id = detail::require<std::uint32_t>(j, "task_id", origin);
  task.object_id = detail::require<std::uint32_t>(j, "object_id", origin);
  task.resource_needed = detail::require<double>(j, "resource_needed", origin);
  task.budget = detail::require<double>(j, "budget", origin);
  for (const auto& tag : detail::get_or<std::vector<std::string>>(j, "preferred_mgmt", {}))
    task.preferred_mgmt.insert(tag);
  return task;
}

inline crowd::SlaOffer offer_from_json(const json& j, const std::string& origin) {
  crowd::SlaOffer offer;
  offer.offer_id = detail::require<std::uint32_t>(j, "offer_id", origin);
  offer.nsp_id = detail::require<std::uint32_t>(j, "nsp_id", origin);
  if (!j.contains("object_id"))
    throw Error(ErrorCode::ConfigError, origin + ": missing key 'object_id'");
  if (j.at("object_id").is_string()) {
    if (j.at("object_id").get<std::string>() != "any")
      throw Error(ErrorCode::ConfigError, origin + ": object_id must be an id or \"any\"");
  } else {
    offer.object_id = detail::require<std::uint32_t>(j, "object_id", origin);
  }
  offer.resources = detail::require<double>(j, "resources", origin);
  offer.expense = detail::require<double>(j, "expense", origin);
  for (const auto& tag : detail::get_or<std::vector<std::string>>(j, "mgmt", {}))
    offer.mgmt.insert(tag);
  return offer;
}

inline json task_to_json(const crowd::TaskProfile& task) {
  return json{{"task_id", task.task_id},
              {"object_id", task.object_id},
              {"resource_needed", task.resource_needed},
              {"budget", task.budget},
              {"preferred_mgmt", task.preferred_mgmt}};
}

inline json offer_to_json(const crowd::SlaOffer& offer) {
  json j{{"offer_id", offer.offer_id},
         {"nsp_id", offer.nsp_id},
         {"resources", offer.resources},
         {"expense", offer.expense},
         {"mgmt", offer.mgmt}};
  if (offer.object_id)
    j["object_id"] = *offer.object_id;
  else
    j["object_id"] = "any";
  return j;
}

inline std::vector<crowd::TaskProfile> load_tasks(const std::string& path) {
  std::vector<crowd::TaskProfile> tasks;
  for (const auto& entry : parse_json(read_file(path), path)) tasks.push_back(task_from_json(entry, path));
  return tasks;
}

inline std::vector<crowd::SlaOffer> load_offers(const std::string& path) {
  std::vector<crowd::SlaOffer> offers;
  for (const auto& entry : parse_json(read_file(path), path)) offers.push_back(offer_from_json(entry, path));
  return offers;
}

inline json assignment_to_json(const crowd::Assignment& assignment) {
  json pairs = json::array();
  for (const auto& p : assignment.pairs)
    pairs.push_back({{"task_id", p.task_id}, {"offer_id", p.offer_id}});
  return json{{"pairs", pairs},
              {"coverage", assignment.pairs.size()},
              {"total_expense", assignment.total_expense}};
}

inline json snapshot_to_json(const crowd::Snapshot& snapshot) {
  json tasks = json::array();
  for (const auto& t : snapshot.tasks) tasks.push_back(task_to_json(t));
  json offers = json::array();
  for (const auto& o : snapshot.offers) offers.push_back(offer_to_json(o));
  return json{{"tasks", tasks}, {"offers", offers}};
}

// JSON Lines message log, one record per line with type in
// {task, offer, withdraw}. Malformed records report their line number.
inline std::vector<crowd::Message> parse_message_log(const std::string& text) {
  std::vector<crowd::Message> log;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string origin = "line " + std::to_string(line_no);
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded())
      throw Error(ErrorCode::MalformedMessage, origin + ": not valid JSON");
    try {
      const auto type = detail::require<std::string>(j, "type", origin);
      if (type == "task") {
        const auto task = task_from_json(j, origin);
        if (!(task.resource_needed > 0.0) || task.budget < 0.0)
          throw Error(ErrorCode::MalformedMessage, origin + ": task fields out of range");
        log.push_back(crowd::TaskMessage{task});
      } else if (type == "offer") {
        const auto offer = offer_from_json(j, origin);
        if (!(offer.resources > 0.0) || offer.expense < 0.0)
          throw Error(ErrorCode::MalformedMessage, origin + ": offer fields out of range");
        log.push_back(crowd::OfferMessage{offer});
      } else if (type == "withdraw") {
        log.push_back(crowd::WithdrawMessage{detail::require<std::uint32_t>(j, "offer_id", origin)});
      } else {
        throw Error(ErrorCode::MalformedMessage, origin + ": unknown message type '" + type + "'");
      }
    } catch (const Error& e) {
      if (e.code() == ErrorCode::MalformedMessage) throw;
      throw Error(ErrorCode::MalformedMessage, origin + ": " + e.what());
    }
  }
  return log;
}

// ---------------------------------------------------------------------------
// Experiment configuration (sweeps, Fig.-7 style exports)

struct ExperimentConfig {
  // workload
  std::uint32_t n_items = 20;
  std::uint64_t size_bits = 2000;
  double zipf_s = 1.0;
  std::uint32_t objects_per_request = 1;
  std::uint32_t requests_per_user = 1;
  double horizon_s = 20.0;
  std::uint64_t seed = 1;
  // sched
  sched::ConvergedConfig sched_cfg;
  // capacity probing
  std::uint32_t trials = 100;
  double success_fraction = 0.95;
  std::uint32_t max_users = 4096;
  // sweep axes
  std::vector<double> sweep_broadcast_hz;
  std::vector<double> sweep_zipf_s;
};

inline sched::ConvergedConfig sched_config_from_json(const json& j, const std::string& origin) {
  sched::ConvergedConfig cfg;
  cfg.broadcast_bw_hz = detail::get_or<double>(j, "broadcast_bw_hz", 0.0);
  cfg.cellular_bw_hz = detail::require<double>(j, "cellular_bw_hz", origin);
  cfg.cache = j.contains("cache_bits") ? cache_from_json(j.at("cache_bits")) : CacheSpec::infinite();
  cfg.pet_enabled = detail::get_or<bool>(j, "pet_enabled", false);
  cfg.rho_floor = detail::get_or<double>(j, "rho_floor", 0.25);
  cfg.push_period_s = detail::get_or<double>(j, "push_period_s", 0.0);
  cfg.pet_packets = detail::get_or<std::uint32_t>(j, "pet_packets", 16);
  const auto mode = detail::get_or<std::string>(j, "pet_cache_mode", "packets");
  if (mode == "packets")
    cfg.pet_cache_mode = sched::PetCacheMode::Packets;
  else if (mode == "decoded")
    cfg.pet_cache_mode = sched::PetCacheMode::DecodedSegments;
  else
    throw Error(ErrorCode::ConfigError, origin + ": pet_cache_mode must be packets or decoded");
  return cfg;
}

inline ExperimentConfig experiment_from_json(const json& j, const std::string& origin) {
  ExperimentConfig cfg;
  const json workload = detail::require<json>(j, "workload", origin);
  cfg.n_items = detail::require<std::uint32_t>(workload, "n_items", origin);
  cfg.size_bits = detail::require<std::uint64_t>(workload, "size_bits", origin);
  cfg.zipf_s = detail::get_or<double>(workload, "zipf_s", 1.0);
  cfg.objects_per_request = detail::get_or<std::uint32_t>(workload, "objects_per_request", 1);
  cfg.requests_per_user = detail::get_or<std::uint32_t>(workload, "requests_per_user", 1);
  cfg.horizon_s = detail::require<double>(workload, "horizon_s", origin);
  cfg.seed = detail::get_or<std::uint64_t>(workload, "seed", 1);

  cfg.sched_cfg = sched_config_from_json(detail::require<json>(j, "sched", origin), origin);
  if (!(cfg.sched_cfg.push_period_s > 0.0)) cfg.sched_cfg.push_period_s = cfg.horizon_s;

  if (j.contains("capacity")) {
    const json capacity = j.at("capacity");
    cfg.trials = detail::get_or<std::uint32_t>(capacity, "trials", cfg.trials);
    cfg.success_fraction = detail::get_or<double>(capacity, "success_fraction", cfg.success_fraction);
    cfg.max_users = detail::get_or<std::uint32_t>(capacity, "max_users", cfg.max_users);
  }
  if (j.contains("sweep")) {
    const json sweep = j.at("sweep");
    cfg.sweep_broadcast_hz = detail::get_or<std::vector<double>>(sweep, "b_broadcast", {});
    cfg.sweep_zipf_s = detail::get_or<std::vector<double>>(sweep, "zipf_s", {});
  }
  return cfg;
}

inline ExperimentConfig load_experiment(const std::string& path) {
  return experiment_from_json(parse_json(read_file(path), path), path);
}

}  // namespace contentcast::io
