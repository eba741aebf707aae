// contentcast: content-centric delivery toolkit.
//
// Subcommands: pet (encode/decode), workload gen, sim (run/sweep), crowd
// (match/negotiate), bounds, fig7. Every randomized path goes through an
// explicit --seed / config seed; identical inputs give byte-identical
// outputs. Exit codes: 0 ok, 2 config error, 3 I/O error, 4 internal
// invariant violation.

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "contentcast/contentcast.hpp"
#include "contentcast/io.hpp"

namespace fs = std::filesystem;
using namespace contentcast;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitInternal = 4;

unsigned thread_cap() {
  const char* env = std::getenv("CONTENTCAST_THREADS");
  unsigned n = 0;
  if (env && *env) n = static_cast<unsigned>(std::strtoul(env, nullptr, 10));
  if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
  return n;
}

// Runs fn(0..n-1) on up to thread_cap() workers. Outputs are indexed, so the
// caller's merge order never depends on scheduling.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  const unsigned workers = std::min<std::size_t>(thread_cap(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::atomic<bool> failed{false};
  std::string first_error;
  std::mutex error_mutex;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
        if (failed.load()) return;
        try {
          fn(i);
        } catch (const std::exception& e) {
          std::scoped_lock lock(error_mutex);
          if (!failed.exchange(true)) first_error = e.what();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failed.load()) throw Error(ErrorCode::ConfigError, "sweep worker failed: " + first_error);
}

std::vector<double> parse_double_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw Error(ErrorCode::ConfigError, what + ": cannot parse '" + item + "'");
    }
  }
  if (out.empty()) throw Error(ErrorCode::ConfigError, what + ": empty list");
  return out;
}

// --vary b_broadcast=<start>:<step>:<end> or b_broadcast=<v1,v2,...>
std::vector<double> parse_vary(const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos || spec.substr(0, eq) != "b_broadcast")
    throw Error(ErrorCode::ConfigError, "--vary supports only b_broadcast=<range>");
  const std::string range = spec.substr(eq + 1);
  if (range.find(':') == std::string::npos) return parse_double_list(range, "--vary");
  const auto parts = [&] {
    std::vector<double> p;
    std::stringstream ss(range);
    std::string item;
    while (std::getline(ss, item, ':')) p.push_back(std::stod(item));
    return p;
  }();
  if (parts.size() != 3 || parts[1] <= 0.0 || parts[2] < parts[0])
    throw Error(ErrorCode::ConfigError, "--vary range must be start:step:end");
  std::vector<double> out;
  for (double v = parts[0]; v <= parts[2] + 1e-9; v += parts[1]) out.push_back(v);
  return out;
}

std::vector<double> empirical_popularity(const std::vector<ServiceRequest>& requests,
                                         std::size_t n_objects) {
  std::vector<double> pop(n_objects, 0.0);
  double total = 0.0;
  for (const auto& r : requests)
    for (std::uint32_t id : r.object_ids) {
      pop[id] += 1.0;
      total += 1.0;
    }
  if (total > 0.0)
    for (auto& p : pop) p /= total;
  return pop;
}

// ---------------------------------------------------------------------------
// pet

int run_pet_encode(const std::vector<std::string>& inputs, const std::string& rho_spec,
                   std::uint32_t n_packets, double rho_floor, const std::string& out_dir) {
  std::vector<std::vector<std::uint8_t>> segments;
  for (const auto& path : inputs) {
    segments.push_back(io::read_binary(path));
    if (segments.back().empty())
      throw Error(ErrorCode::InvalidArgument, path + " is empty; nothing to encode");
  }

  pet::PriorityProfile profile;
  if (rho_spec == "auto") {
    // input order is the popularity order; Zipf(1) weights drive the priorities
    const auto pmf = workload::zipf_pmf({1.0, static_cast<std::uint32_t>(segments.size())});
    profile = pet::assign_priorities(pmf, rho_floor);
  } else {
    profile.rhos = parse_double_list(rho_spec, "--rho");
    if (profile.rhos.size() != segments.size())
      throw Error(ErrorCode::ConfigError, "--rho needs one value per input file");
  }

  const auto [layout, packets] = pet::pet_encode(segments, profile, n_packets);
  fs::create_directories(out_dir);
  io::write_file((fs::path(out_dir) / "layout.json").string(),
                 io::layout_to_json(layout).dump(2) + "\n");
  for (const auto& packet : packets) {
    char name[32];
    std::snprintf(name, sizeof(name), "packet_%03u.pet", packet.index);
    io::write_binary((fs::path(out_dir) / name).string(),
                     pet::serialize_packet(packet, layout.n_packets));
  }
  std::cout << "encoded " << segments.size() << " segments into " << packets.size()
            << " packets of " << layout.packet_symbols << " symbols\n";
  return kExitOk;
}

int run_pet_decode(const std::string& layout_path, const std::vector<std::string>& packet_paths,
                   const std::string& out_dir) {
  const auto layout = io::layout_from_json(io::parse_json(io::read_file(layout_path), layout_path),
                                           layout_path);
  std::vector<pet::PetPacket> packets;
  for (const auto& path : packet_paths) {
    auto wire = pet::parse_packet(io::read_binary(path));
    if (wire.n_packets != layout.n_packets || wire.packet.payload.size() != layout.packet_symbols)
      throw Error(ErrorCode::CorruptPacket, path + " does not belong to this layout");
    packets.push_back(std::move(wire.packet));
  }
  const auto decoded = pet::pet_decode(layout, packets);
  fs::create_directories(out_dir);
  for (std::size_t l = 0; l < layout.segments.size(); ++l) {
    const auto& seg = layout.segments[l];
    if (decoded.segments[l]) {
      char name[32];
      std::snprintf(name, sizeof(name), "segment_%03u.bin", seg.id);
      io::write_binary((fs::path(out_dir) / name).string(), *decoded.segments[l]);
      std::cout << "segment " << seg.id << ": decoded (" << decoded.segments[l]->size()
                << " bytes)\n";
    } else {
      std::cout << "segment " << seg.id << ": pending (needs " << seg.k << " packets, have "
                << packets.size() << ")\n";
    }
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// workload

int run_workload_gen(std::uint32_t n_items, double zipf_s, std::uint32_t n_users, double horizon,
                     std::uint64_t seed, std::uint64_t size_bits, std::uint32_t objects_per_request,
                     std::uint32_t requests_per_user, double bandwidth_hz, double link_rate,
                     const std::string& cache_spec, const std::string& out_path) {
  const auto catalog = workload::make_uniform_catalog(n_items, size_bits);
  const workload::ZipfParams params{zipf_s, n_items};
  const workload::TraceConfig cfg{n_users, horizon, requests_per_user, objects_per_request, seed};
  io::Scenario scenario;
  scenario.catalog = catalog;
  scenario.requests = workload::generate_trace(catalog, params, cfg);
  scenario.budget.horizon_s = horizon;
  scenario.budget.link_rate_bps_per_hz = link_rate;
  scenario.budget.bandwidth_hz =
      bandwidth_hz > 0.0 ? bandwidth_hz
                         : bandwidth_upper_bound(scenario.requests, catalog, horizon);
  const json cache_json = cache_spec == "inf" ? json("inf") : json::parse(cache_spec, nullptr, false);
  if (cache_json.is_discarded())
    throw Error(ErrorCode::ConfigError, "--cache must be a bit count or 'inf'");
  scenario.cache = io::cache_from_json(cache_json);
  io::save_scenario(out_path, scenario);
  std::cout << "wrote " << scenario.requests.size() << " requests over " << n_items
            << " objects to " << out_path << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// sim

struct RunConfig {
  sched::ConvergedConfig sched_cfg;
  std::string planner = "converged";
  bool cache_override = false;
  std::vector<double> popularity;  // empty = empirical from the trace
};

RunConfig run_config_from_json(const json& j, const std::string& origin) {
  RunConfig cfg;
  const json& sched_json = j.contains("sched") ? j.at("sched") : j;
  cfg.sched_cfg = io::sched_config_from_json(sched_json, origin);
  cfg.cache_override = sched_json.contains("cache_bits");
  if (j.contains("planner")) cfg.planner = j.at("planner").get<std::string>();
  if (sched_json.contains("popularity"))
    cfg.popularity = sched_json.at("popularity").get<std::vector<double>>();
  if (cfg.planner != "converged" && cfg.planner != "unicast" && cfg.planner != "broadcast")
    throw Error(ErrorCode::ConfigError, "planner must be converged, unicast or broadcast");
  return cfg;
}

int run_sim_run(const std::string& scenario_path, const std::string& config_path,
                const std::string& out_path, const std::string& csv_path,
                std::string scenario_id) {
  const auto scenario = io::load_scenario(scenario_path);
  auto cfg = run_config_from_json(io::parse_json(io::read_file(config_path), config_path),
                                  config_path);
  if (!cfg.cache_override) cfg.sched_cfg.cache = scenario.cache;
  if (!(cfg.sched_cfg.push_period_s > 0.0)) cfg.sched_cfg.push_period_s = scenario.budget.horizon_s;
  if (scenario_id.empty()) scenario_id = fs::path(scenario_path).stem().string();

  const double horizon = scenario.budget.horizon_s;
  const double link = scenario.budget.link_rate_bps_per_hz;
  DeliveryPlan plan;
  sched::DuplexBudget budget{cfg.sched_cfg.broadcast_bw_hz, cfg.sched_cfg.cellular_bw_hz, horizon,
                             link};
  if (cfg.planner == "unicast") {
    plan = sched::plan_unicast(scenario.requests, scenario.catalog, cfg.sched_cfg.cellular_bw_hz,
                               link);
    budget.broadcast_hz = 0.0;
  } else if (cfg.planner == "broadcast") {
    plan = sched::plan_broadcast_all(scenario.catalog, cfg.sched_cfg.broadcast_bw_hz, horizon, link);
    budget.cellular_hz = 0.0;
  } else {
    const auto popularity = cfg.popularity.empty()
                                ? empirical_popularity(scenario.requests, scenario.catalog.size())
                                : cfg.popularity;
    if (popularity.size() != scenario.catalog.size())
      throw Error(ErrorCode::ConfigError, "popularity needs one entry per object");
    plan = sched::plan_converged(scenario.requests, scenario.catalog, popularity, cfg.sched_cfg,
                                 horizon, link);
  }
  const auto report = sched::simulate(plan, scenario.requests, scenario.catalog,
                                      cfg.sched_cfg.cache, budget);

  json out = io::sim_report_to_json(report);
  out["scenario_id"] = scenario_id;
  out["planner"] = cfg.planner;
  out["B_broadcast_hz"] = budget.broadcast_hz;
  out["B_cellular_hz"] = budget.cellular_hz;
  out["T_s"] = horizon;
  out["M_bits"] = io::cache_to_json(cfg.sched_cfg.cache);
  io::write_file(out_path, out.dump(2) + "\n");

  if (!csv_path.empty()) {
    // only the set sizes flow into the CSV row
    ContentRateReport cr;
    cr.delivered_bits = report.delivered_bits;
    cr.content_rate = report.content_rate;
    cr.satisfied_users.resize(report.satisfied);
    cr.unsatisfied_users.resize(report.n_users - report.satisfied);
    const WirelessBudget total{budget.broadcast_hz + budget.cellular_hz, horizon, link};
    io::write_file(csv_path, std::string(io::kReportCsvHeader) + "\n" +
                                 io::report_csv_row(scenario_id, total, cfg.sched_cfg.cache, cr) +
                                 "\n");
  }
  std::cout << "content_rate " << io::fmt_double(report.content_rate) << ", satisfied "
            << report.satisfied << "/" << report.n_users << "\n";
  return kExitOk;
}

struct SweepPoint {
  double zipf_s = 0.0;
  double broadcast_hz = 0.0;
  std::uint32_t k_supported = 0;
  sched::TrialStats stats;
};

std::vector<SweepPoint> run_capacity_sweep(const io::ExperimentConfig& cfg) {
  if (cfg.sweep_broadcast_hz.empty() || cfg.sweep_zipf_s.empty())
    throw Error(ErrorCode::ConfigError, "sweep needs b_broadcast values and zipf_s values");
  const auto catalog = workload::make_uniform_catalog(cfg.n_items, cfg.size_bits);
  const workload::TraceConfig trace_template{0, cfg.horizon_s, cfg.requests_per_user,
                                             cfg.objects_per_request, cfg.seed};
  const sched::CapacityProbe probe{cfg.success_fraction, cfg.max_users};

  std::vector<SweepPoint> points;
  for (double s : cfg.sweep_zipf_s)
    for (double b : cfg.sweep_broadcast_hz) points.push_back({s, b, 0, {}});

  parallel_for(points.size(), [&](std::size_t i) {
    auto& point = points[i];
    sched::ConvergedConfig sched_cfg = cfg.sched_cfg;
    sched_cfg.broadcast_bw_hz = point.broadcast_hz;
    const workload::ZipfParams params{point.zipf_s, cfg.n_items};
    point.k_supported =
        sched::users_per_cell(catalog, sched_cfg, params, trace_template, cfg.trials, probe);
    point.stats = sched::converged_trial_stats(catalog, sched_cfg, params, trace_template,
                                               point.k_supported, cfg.trials);
  });
  return points;
}

int run_sim_sweep(const std::string& config_path, const std::string& vary,
                  const std::string& s_list, std::uint32_t trials_override,
                  const std::string& csv_path) {
  auto cfg = io::load_experiment(config_path);
  if (!vary.empty()) cfg.sweep_broadcast_hz = parse_vary(vary);
  if (!s_list.empty()) cfg.sweep_zipf_s = parse_double_list(s_list, "--s");
  if (trials_override > 0) cfg.trials = trials_override;

  const auto points = run_capacity_sweep(cfg);
  std::ostringstream csv;
  csv << "s,B_b,B_c,M,K_supported,mean_content_rate,mean_unicast_bits\n";
  for (const auto& p : points)
    csv << io::fmt_double(p.zipf_s) << ',' << io::fmt_double(p.broadcast_hz) << ','
        << io::fmt_double(cfg.sched_cfg.cellular_bw_hz) << ','
        << io::cache_to_csv(cfg.sched_cfg.cache) << ',' << p.k_supported << ','
        << io::fmt_double(p.stats.mean_content_rate) << ','
        << io::fmt_double(p.stats.mean_unicast_bits) << '\n';
  io::write_file(csv_path, csv.str());
  std::cout << "wrote " << points.size() << " sweep rows to " << csv_path << "\n";
  return kExitOk;
}

int run_fig7(const std::string& config_path, const std::string& csv_path) {
  auto cfg = io::load_experiment(config_path);
  if (cfg.sweep_zipf_s.empty() || cfg.sweep_broadcast_hz.empty())
    throw Error(ErrorCode::ConfigError, "fig7 needs sweep.zipf_s and sweep.b_broadcast");
  // the cellular-only baseline is the B_b = 0 column
  if (std::find(cfg.sweep_broadcast_hz.begin(), cfg.sweep_broadcast_hz.end(), 0.0) ==
      cfg.sweep_broadcast_hz.end())
    cfg.sweep_broadcast_hz.insert(cfg.sweep_broadcast_hz.begin(), 0.0);

  const auto points = run_capacity_sweep(cfg);
  std::ostringstream csv;
  csv << "s,B_b,B_c,M,K_supported,K_baseline,gain_ratio\n";
  for (double s : cfg.sweep_zipf_s) {
    std::uint32_t baseline = 0;
    for (const auto& p : points)
      if (p.zipf_s == s && p.broadcast_hz == 0.0) baseline = p.k_supported;
    for (const auto& p : points) {
      if (p.zipf_s != s) continue;
      csv << io::fmt_double(s) << ',' << io::fmt_double(p.broadcast_hz) << ','
          << io::fmt_double(cfg.sched_cfg.cellular_bw_hz) << ','
          << io::cache_to_csv(cfg.sched_cfg.cache) << ',' << p.k_supported << ',' << baseline
          << ',';
      if (baseline == 0)
        csv << "inf";
      else
        csv << io::fmt_double(static_cast<double>(p.k_supported) / baseline);
      csv << '\n';
    }
  }
  io::write_file(csv_path, csv.str());
  std::cout << "wrote fig7 data to " << csv_path << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// bounds & crowd

int run_bounds(const std::string& scenario_path, const std::string& out_path) {
  const auto scenario = io::load_scenario(scenario_path);
  const json out{
      {"b_min_hz", bandwidth_lower_bound(scenario.catalog, scenario.budget.horizon_s)},
      {"b_max_hz",
       bandwidth_upper_bound(scenario.requests, scenario.catalog, scenario.budget.horizon_s)}};
  const std::string text = out.dump(2) + "\n";
  if (!out_path.empty()) io::write_file(out_path, text);
  std::cout << text;
  return kExitOk;
}

int run_crowd_match(const std::string& tasks_path, const std::string& offers_path,
                    const std::string& log_path, const std::string& solver,
                    const std::string& out_path) {
  std::vector<crowd::TaskProfile> tasks;
  std::vector<crowd::SlaOffer> offers;
  if (!log_path.empty()) {
    const auto snapshot = crowd::negotiate(io::parse_message_log(io::read_file(log_path)));
    tasks = snapshot.tasks;
    offers = snapshot.offers;
  } else {
    if (tasks_path.empty() || offers_path.empty())
      throw Error(ErrorCode::ConfigError, "crowd match needs --tasks and --offers, or --log");
    tasks = io::load_tasks(tasks_path);
    offers = io::load_offers(offers_path);
  }
  crowd::Assignment assignment;
  if (solver == "exact")
    assignment = crowd::match_exact(tasks, offers);
  else if (solver == "greedy")
    assignment = crowd::match_greedy(tasks, offers);
  else
    throw Error(ErrorCode::ConfigError, "--solver must be exact or greedy");
  if (!crowd::validate_assignment(assignment, tasks, offers))
    throw Error(ErrorCode::InvalidArgument, "solver produced an invalid assignment");

  const std::string text = io::assignment_to_json(assignment).dump(2) + "\n";
  if (!out_path.empty())
    io::write_file(out_path, text);
  else
    std::cout << text;
  std::cout << "assigned " << assignment.pairs.size() << "/" << tasks.size() << " tasks, expense "
            << io::fmt_double(assignment.total_expense) << "\n";
  return kExitOk;
}

int run_crowd_negotiate(const std::string& log_path, const std::string& out_path) {
  const auto snapshot = crowd::negotiate(io::parse_message_log(io::read_file(log_path)));
  const std::string text = io::snapshot_to_json(snapshot).dump(2) + "\n";
  if (!out_path.empty())
    io::write_file(out_path, text);
  else
    std::cout << text;
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"content-centric delivery toolkit"};
  app.require_subcommand(1);

  // --- pet ---
  auto* pet_cmd = app.add_subcommand("pet", "priority erasure codec");
  pet_cmd->require_subcommand(1);
  auto* pet_encode = pet_cmd->add_subcommand("encode", "encode files into PET packets");
  std::vector<std::string> pet_inputs;
  std::string pet_rho = "auto";
  std::uint32_t pet_n = 16;
  double pet_rho_floor = 0.25;
  std::string pet_out = "pet_out";
  pet_encode->add_option("--in", pet_inputs, "input files, most popular first")->required();
  pet_encode->add_option("--rho", pet_rho, "comma-separated priority indices, or 'auto'");
  pet_encode->add_option("--n", pet_n, "number of packets N (<= 255)")->required();
  pet_encode->add_option("--rho-floor", pet_rho_floor, "smallest rho used by 'auto'");
  pet_encode->add_option("--out", pet_out, "output directory");

  auto* pet_decode = pet_cmd->add_subcommand("decode", "decode PET packets");
  std::string pet_layout;
  std::vector<std::string> pet_packets;
  std::string pet_decode_out = ".";
  pet_decode->add_option("--layout", pet_layout, "layout.json from the encoder")->required();
  pet_decode->add_option("--packets", pet_packets, "received packet files")->required();
  pet_decode->add_option("--out", pet_decode_out, "output directory");

  // --- workload ---
  auto* workload_cmd = app.add_subcommand("workload", "Zipf trace generation");
  workload_cmd->require_subcommand(1);
  auto* workload_gen = workload_cmd->add_subcommand("gen", "generate a scenario file");
  std::uint32_t wl_items = 20;
  double wl_s = 1.0;
  std::uint32_t wl_users = 10;
  double wl_horizon = 20.0;
  std::uint64_t wl_seed = 1;
  std::uint64_t wl_size_bits = 8000;
  std::uint32_t wl_opr = 1;
  std::uint32_t wl_rpu = 1;
  double wl_bandwidth = 0.0;
  double wl_link = 1.0;
  std::string wl_cache = "0";
  std::string wl_out = "trace.json";
  workload_gen->add_option("--L", wl_items, "catalog size")->required();
  workload_gen->add_option("--s", wl_s, "Zipf exponent")->required();
  workload_gen->add_option("--users", wl_users, "number of users K")->required();
  workload_gen->add_option("--T", wl_horizon, "horizon seconds")->required();
  workload_gen->add_option("--seed", wl_seed, "trace seed")->required();
  workload_gen->add_option("--size-bits", wl_size_bits, "object size in bits");
  workload_gen->add_option("--objects-per-request", wl_opr, "objects per request");
  workload_gen->add_option("--requests-per-user", wl_rpu, "requests per user");
  workload_gen->add_option("--B", wl_bandwidth, "budget bandwidth Hz (default: B_max)");
  workload_gen->add_option("--link-rate", wl_link, "link rate b/s/Hz");
  workload_gen->add_option("--cache", wl_cache, "cache bits or 'inf'");
  workload_gen->add_option("--out", wl_out, "output scenario path");

  // --- sim ---
  auto* sim_cmd = app.add_subcommand("sim", "delivery simulation");
  sim_cmd->require_subcommand(1);
  auto* sim_run = sim_cmd->add_subcommand("run", "evaluate one scenario");
  std::string sr_scenario, sr_config, sr_out = "report.json", sr_csv, sr_id;
  sim_run->add_option("--scenario", sr_scenario, "scenario JSON")->required();
  sim_run->add_option("--config", sr_config, "run config JSON")->required();
  sim_run->add_option("--out", sr_out, "report JSON path");
  sim_run->add_option("--csv", sr_csv, "also write a CSV report row");
  sim_run->add_option("--scenario-id", sr_id, "id used in the CSV row");

  auto* sim_sweep = sim_cmd->add_subcommand("sweep", "capacity sweep over B_b and s");
  std::string sw_config, sw_vary, sw_s, sw_csv = "sweep.csv";
  std::uint32_t sw_trials = 0;
  sim_sweep->add_option("--config", sw_config, "experiment config JSON")->required();
  sim_sweep->add_option("--vary", sw_vary, "b_broadcast=<start:step:end or list>");
  sim_sweep->add_option("--s", sw_s, "comma-separated Zipf exponents");
  sim_sweep->add_option("--trials", sw_trials, "override confidence trials");
  sim_sweep->add_option("--csv", sw_csv, "output CSV path");

  // --- bounds ---
  auto* bounds_cmd = app.add_subcommand("bounds", "broadcast/unicast bandwidth bounds of a scenario");
  std::string bounds_scenario, bounds_out;
  bounds_cmd->add_option("--scenario", bounds_scenario, "scenario JSON")->required();
  bounds_cmd->add_option("--out", bounds_out, "optional output JSON path");

  // --- crowd ---
  auto* crowd_cmd = app.add_subcommand("crowd", "OCP/NSP task matching");
  crowd_cmd->require_subcommand(1);
  auto* crowd_match = crowd_cmd->add_subcommand("match", "assign tasks to SLA offers");
  std::string cm_tasks, cm_offers, cm_log, cm_solver = "exact", cm_out;
  crowd_match->add_option("--tasks", cm_tasks, "task profiles JSON array");
  crowd_match->add_option("--offers", cm_offers, "SLA offers JSON array");
  crowd_match->add_option("--log", cm_log, "negotiation log (JSON Lines)");
  crowd_match->add_option("--solver", cm_solver, "exact or greedy");
  crowd_match->add_option("--out", cm_out, "assignment JSON path");

  auto* crowd_negotiate = crowd_cmd->add_subcommand("negotiate", "fold a message log");
  std::string cn_log, cn_out;
  crowd_negotiate->add_option("--log", cn_log, "negotiation log (JSON Lines)")->required();
  crowd_negotiate->add_option("--out", cn_out, "snapshot JSON path");

  // --- fig7 ---
  auto* fig7_cmd = app.add_subcommand("fig7", "users-per-cell curves with gain ratios");
  std::string f7_config, f7_out = "fig7.csv";
  fig7_cmd->add_option("--config", f7_config, "experiment config JSON")->required();
  fig7_cmd->add_option("--out", f7_out, "output CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (pet_encode->parsed())
      return run_pet_encode(pet_inputs, pet_rho, pet_n, pet_rho_floor, pet_out);
    if (pet_decode->parsed()) return run_pet_decode(pet_layout, pet_packets, pet_decode_out);
    if (workload_gen->parsed())
      return run_workload_gen(wl_items, wl_s, wl_users, wl_horizon, wl_seed, wl_size_bits, wl_opr,
                              wl_rpu, wl_bandwidth, wl_link, wl_cache, wl_out);
    if (sim_run->parsed()) return run_sim_run(sr_scenario, sr_config, sr_out, sr_csv, sr_id);
    if (sim_sweep->parsed()) return run_sim_sweep(sw_config, sw_vary, sw_s, sw_trials, sw_csv);
    if (bounds_cmd->parsed()) return run_bounds(bounds_scenario, bounds_out);
    if (crowd_match->parsed())
      return run_crowd_match(cm_tasks, cm_offers, cm_log, cm_solver, cm_out);
    if (crowd_negotiate->parsed()) return run_crowd_negotiate(cn_log, cn_out);
    if (fig7_cmd->parsed()) return run_fig7(f7_config, f7_out);
    std::cerr << "error: no subcommand\n";
    return kExitConfig;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::IoError ? kExitIo : kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}
