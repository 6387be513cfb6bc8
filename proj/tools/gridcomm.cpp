// gridcomm: generate fleets, discover communities, plan flows, sweep parameters.
//
// Exit status: 0 success, 2 configuration or input error, 3 infeasible,
// 4 time budget exhausted.

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "gridcomm/gridcomm.hpp"

namespace fs = std::filesystem;
using namespace gridcomm;

namespace {

enum Exit : int { kOk = 0, kConfigError = 2, kInfeasible = 3, kBudget = 4 };

int exit_for(RunStatus s) {
  switch (s) {
    case RunStatus::Ok: return kOk;
    case RunStatus::Infeasible: return kInfeasible;
    case RunStatus::BudgetExhausted: return kBudget;
  }
  return kOk;
}

unsigned default_threads() {
  if (const char* env = std::getenv("GRIDCOMM_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

// Options shared by every subcommand that reads a fleet.
struct FleetInput {
  std::string dir;
  std::string microgrids, energy, substations;
  std::size_t k_sub = 5;

  fs::path mg_path() const { return microgrids.empty() ? fs::path(dir) / "microgrids.csv" : fs::path(microgrids); }
  fs::path en_path() const { return energy.empty() ? fs::path(dir) / "energy.csv" : fs::path(energy); }
  fs::path sub_path() const { return substations.empty() ? fs::path(dir) / "substations.csv" : fs::path(substations); }
};

void add_fleet_options(CLI::App* cmd, FleetInput& in) {
  cmd->add_option("--fleet", in.dir, "Directory holding microgrids.csv, energy.csv and optionally substations.csv");
  cmd->add_option("--microgrids", in.microgrids, "Explicit microgrids.csv path");
  cmd->add_option("--energy", in.energy, "Explicit energy.csv path");
  cmd->add_option("--substations", in.substations, "Explicit substations.csv path");
  cmd->add_option("--k-sub", in.k_sub, "Substations to simulate when none are given")->capture_default_str();
}

struct LoadedFleet {
  Fleet fleet;
  Substations subs;
};

LoadedFleet load_fleet(const FleetInput& in, std::uint64_t seed) {
  if (in.dir.empty() && (in.microgrids.empty() || in.energy.empty())) {
    throw Error(Errc::InvalidConfig, "give --fleet DIR or both --microgrids and --energy");
  }
  io::IngestReport rep;
  Fleet fleet = io::ingest_fleet(in.mg_path(), in.en_path(), &rep);
  if (!rep.dropped_zero.empty()) {
    std::cerr << "note: dropped " << rep.dropped_zero.size() << " microgrid(s) with a zero reading\n";
  }
  Substations subs;
  if ((!in.dir.empty() || !in.substations.empty()) && fs::exists(in.sub_path())) {
    subs = io::ingest_substations(in.sub_path());
  } else {
    subs = simulate_substations(fleet, std::min(in.k_sub, fleet.size()), seed);
  }
  return {std::move(fleet), std::move(subs)};
}

void add_discovery_options(CLI::App* cmd, DiscoveryConfig& cfg, std::string& algo, std::string& metric,
                           bool& per_pair) {
  cmd->add_option("--algo", algo, "hec-kmeans | hec-ldbscan | mec | sec-tabu | sec-twophase | sec-exact")
      ->check(CLI::IsMember({"hec-kmeans", "hec-ldbscan", "mec", "sec-tabu", "sec-twophase", "sec-exact"}))
      ->capture_default_str();
  cmd->add_option("--k", cfg.k, "K for K-Means; partition cap for sec-exact")->capture_default_str();
  cmd->add_option("--eps", cfg.eps, "L^t-DBSCAN neighborhood radius")->capture_default_str();
  cmd->add_option("--min", cfg.min_neighbors, "L^t-DBSCAN core threshold")->capture_default_str();
  cmd->add_option("--bound", cfg.bound_w, "Net-energy bound L, watts")->capture_default_str();
  cmd->add_option("--eps-ne", cfg.eps_ne, "MEC normalized NE-distance threshold")->capture_default_str();
  cmd->add_option("--eps-sp", cfg.eps_sp, "MEC spatial threshold")->capture_default_str();
  cmd->add_option("--benchmark-eps-sp", cfg.benchmark_eps_sp, "Spatial threshold of the SSE-ratio benchmark")
      ->capture_default_str();
  cmd->add_option("--metric", metric, "euclidean | manhattan")->capture_default_str();
  cmd->add_option("--tabu-len", cfg.tabu_length, "Tabu list length S")->capture_default_str();
  cmd->add_option("--k-from", cfg.k_from, "First K of the SEC search range")->capture_default_str();
  cmd->add_option("--k-to", cfg.k_to, "Last K of the SEC search range")->capture_default_str();
  cmd->add_option("--k-step", cfg.k_step, "Step of the SEC search range")->capture_default_str();
  cmd->add_option("--k-values", cfg.k_values, "Explicit K list for SEC searches")->delimiter(',');
  cmd->add_option("--time-budget", cfg.time_budget_s, "Tabu wall-clock cap, seconds")->capture_default_str();
  cmd->add_option("--margin", cfg.margin_w, "Two-phase admission margin, watts")->capture_default_str();
  cmd->add_option("--theta", cfg.loss.theta, "Loss fraction per reference distance")->capture_default_str();
  cmd->add_option("--theta-distance", cfg.loss.reference_distance, "Reference distance for theta")->capture_default_str();
  cmd->add_flag("--per-pair-loss", per_pair, "Loss grows with distance instead of a flat (1 - theta)");
  cmd->add_option("--window-offset", cfg.window_offset, "First reading used")->capture_default_str();
  cmd->add_option("--window", cfg.window_length, "Readings used (0 = the rest)")->capture_default_str();
}

void finish_discovery_config(DiscoveryConfig& cfg, const std::string& algo, const std::string& metric, bool per_pair,
                             std::uint64_t seed) {
  cfg.algorithm = parse_algorithm(algo);
  cfg.metric = parse_metric(metric);
  cfg.loss.uniform = !per_pair;
  cfg.seed = seed;
}

// Global options plus the subcommand that ran; other subcommands' defaults are noise.
void echo_config(const CLI::App& app, const fs::path& dir) {
  std::string active;
  for (const auto* sub : app.get_subcommands()) active = sub->get_name() + ".";
  std::istringstream all(app.config_to_str(true, false));
  std::string out, line;
  while (std::getline(all, line)) {
    const auto eq = line.find('=');
    const auto dot = line.find('.');
    const bool global = dot == std::string::npos || (eq != std::string::npos && dot > eq);
    if (global || line.rfind(active, 0) == 0) out += line + '\n';
  }
  io::write_file_atomic(dir / "config.echo", out);
}

std::string timing_csv(double seconds) { return "key,value\nruntime_seconds," + io::format_double(seconds) + "\n"; }

void write_run(const fs::path& dir, const Fleet& fleet, const DiscoveryRun& run, bool emit_flows) {
  io::emit_assignment(fleet, run.assignment, dir / "communities.csv");
  io::write_file_atomic(dir / "metrics.csv", run.metrics.to_csv());
  io::write_file_atomic(dir / "metrics.txt", "# " + run.assignment.provenance + "\n" + run.metrics.to_text());
  io::write_file_atomic(dir / "timing.csv", timing_csv(run.runtime_seconds));
  if (!run.admission_log.empty()) io::write_file_atomic(dir / "admission_log.csv", io::admission_log_csv(fleet, run.admission_log));
  if (!run.search_trace.empty()) io::write_file_atomic(dir / "search_trace.csv", io::trace_csv(run.search_trace));
  if (!run.phase1_sse.empty()) {
    std::string s = "k,sse\n";
    for (const auto& [k, sse] : run.phase1_sse) s += std::to_string(k) + "," + io::format_double(sse) + "\n";
    io::write_file_atomic(dir / "phase1_sse.csv", s);
  }
  if (emit_flows) io::write_file_atomic(dir / "flows.csv", io::flow_plan_csv(fleet, run.flows));
}

// --- sweep ------------------------------------------------------------------

struct SweepSpec {
  std::string param;
  std::vector<double> values;
  std::optional<double> from, to, step;
};

std::string default_algo_for(const std::string& param) {
  if (param == "k") return "hec-kmeans";
  if (param == "L") return "hec-ldbscan";
  if (param == "eps") return "mec";
  return "hec-ldbscan";
}

std::vector<double> sweep_values(const SweepSpec& s) {
  if (!s.values.empty()) return s.values;
  double from = 0, to = 0, step = 0;
  if (s.param == "k") {
    from = 100, to = 850, step = 50;
  } else if (s.param == "L") {
    from = 250000, to = 1150000, step = 300000;
  } else if (s.param == "eps") {
    from = 0.05, to = 0.25, step = 0.05;
  } else {
    return {1, 24, 48, 96};
  }
  from = s.from.value_or(from);
  to = s.to.value_or(to);
  step = s.step.value_or(step);
  if (!(step > 0.0) || to < from) throw Error(Errc::InvalidConfig, "sweep range must satisfy from <= to with step > 0");
  std::vector<double> out;
  for (std::size_t i = 0;; ++i) {
    const double v = from + static_cast<double>(i) * step;
    if (v > to + 1e-9 * std::max(1.0, std::abs(to))) break;
    out.push_back(v);
  }
  return out;
}

void apply_sweep_value(DiscoveryConfig& cfg, const std::string& param, double v) {
  const auto whole = [&](const char* what) {
    if (v < 1.0 || v != std::floor(v)) throw Error(Errc::InvalidConfig, std::string(what) + " values must be positive integers");
    return static_cast<std::size_t>(v);
  };
  if (param == "k") {
    cfg.k = whole("k");
    cfg.k_values = {cfg.k};
  } else if (param == "L") {
    cfg.bound_w = v;
  } else if (param == "eps") {
    (cfg.algorithm == Algorithm::HecLdbscan ? cfg.eps : cfg.eps_ne) = v;
  } else {
    cfg.window_length = whole("t");
  }
}

std::string short_num(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

std::string value_label(double v) {
  std::string s = io::format_double(v);
  std::replace(s.begin(), s.end(), '.', 'p');
  return s;
}

int run_sweep(const CLI::App& app, const SweepSpec& spec, DiscoveryConfig base, const LoadedFleet& in,
              const fs::path& out, unsigned threads) {
  const auto values = sweep_values(spec);
  if (values.empty()) throw Error(Errc::InvalidConfig, "sweep has no points");
  for (double v : values) {
    DiscoveryConfig c = base;
    apply_sweep_value(c, spec.param, v);
    c.validate();
  }
  fs::create_directories(out / "points");
  echo_config(app, out);

  std::vector<std::optional<DiscoveryRun>> runs(values.size());
  std::vector<std::string> errors(values.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t p; (p = next.fetch_add(1)) < values.size();) {
      try {
        DiscoveryConfig c = base;
        apply_sweep_value(c, spec.param, values[p]);
        const Fleet f = windowed(in.fleet, c);
        DiscoveryRun r = run_discovery(f, in.subs, c);
        const fs::path dir = out / "points" / (spec.param + "_" + value_label(values[p]));
        fs::create_directories(dir);
        write_run(dir, f, r, false);
        runs[p] = std::move(r);
      } catch (const std::exception& e) {
        errors[p] = e.what();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    const unsigned n = std::min<unsigned>(threads, static_cast<unsigned>(values.size()));
    for (unsigned i = 0; i < n; ++i) pool.emplace_back(worker);
  }
  for (std::size_t p = 0; p < values.size(); ++p) {
    if (!errors[p].empty()) {
      std::cerr << "error: " << spec.param << "=" << io::format_double(values[p]) << ": " << errors[p] << "\n";
      return kConfigError;
    }
  }

  // One plot-data file per metric; the header names what was swept and what was held fixed.
  std::ostringstream fixed;
  fixed << "# swept=" << spec.param << " algo=" << to_string(base.algorithm) << " seed=" << base.seed
        << " n=" << in.fleet.size() << " window=" << in.fleet.window_length() << "\n";
  fixed << "# fixed:";
  for (const auto& line : {std::string("k=") + std::to_string(base.k), "eps=" + short_num(base.eps),
                           "min=" + std::to_string(base.min_neighbors), "L_w=" + short_num(base.bound_w),
                           "eps_ne=" + short_num(base.eps_ne), "eps_sp=" + short_num(base.eps_sp),
                           "theta=" + short_num(base.loss.theta),
                           "window_offset=" + std::to_string(base.window_offset)}) {
    if (line.rfind(spec.param + "=", 0) != 0) fixed << ' ' << line;
  }
  fixed << "\n";
  fs::create_directories(out / "plot");
  const auto fields = runs.front()->metrics.fields();
  for (std::size_t f = 0; f < fields.size(); ++f) {
    if (fields[f].first == "kind" || fields[f].first == "theta_uniform" || fields[f].first == "runtime_seconds") continue;
    std::string body = fixed.str() + spec.param + "," + fields[f].first + "\n";
    for (std::size_t p = 0; p < values.size(); ++p) {
      body += io::format_double(values[p]) + "," + runs[p]->metrics.fields()[f].second + "\n";
    }
    io::write_file_atomic(out / "plot" / (spec.param + "_vs_" + fields[f].first + ".csv"), body);
  }
  std::string timing = fixed.str() + spec.param + ",runtime_seconds\n";
  int worst = kOk;
  for (std::size_t p = 0; p < values.size(); ++p) {
    timing += io::format_double(values[p]) + "," + io::format_double(runs[p]->runtime_seconds) + "\n";
    worst = std::max(worst, exit_for(runs[p]->status));
  }
  io::write_file_atomic(out / "plot" / (spec.param + "_vs_runtime_seconds.csv"), timing);
  std::cout << "swept " << spec.param << " over " << values.size() << " points into " << out.string() << "\n";
  return worst;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Energy-community discovery among geo-located microgrids"};
  app.set_config("--config", "", "TOML/INI file of option values; command-line flags take precedence");
  app.require_subcommand(1);
  app.fallthrough();
  std::uint64_t seed = 1;
  unsigned threads = default_threads();
  app.add_option("--seed", seed, "Master seed")->capture_default_str();
  app.add_option("--threads", threads, "Worker threads (default: GRIDCOMM_THREADS or hardware)")->capture_default_str();

  // gen
  auto* gen = app.add_subcommand("gen", "Generate a synthetic fleet from traces");
  std::string traces_path = "data/sample_traces.csv", pool_path = "data/geo_pool.csv", gen_out, mode = "gen-and-cons";
  GenerateConfig gcfg;
  std::size_t gen_k_sub = 5;
  gen->add_option("--traces", traces_path, "Trace CSV")->capture_default_str();
  gen->add_option("--geo-pool", pool_path, "lon,lat CSV")->capture_default_str();
  gen->add_option("--n", gcfg.n, "Microgrids")->capture_default_str();
  gen->add_option("--mode", mode, "consumption-only | gen-and-cons")
      ->check(CLI::IsMember({"consumption-only", "gen-and-cons"}))
      ->capture_default_str();
  gen->add_option("--window", gcfg.window_length, "Readings per microgrid")->capture_default_str();
  gen->add_option("--jitter-lo", gcfg.jitter_lo, "Lower scale factor")->capture_default_str();
  gen->add_option("--jitter-hi", gcfg.jitter_hi, "Upper scale factor")->capture_default_str();
  gen->add_option("--k-sub", gen_k_sub, "Substations to simulate")->capture_default_str();
  gen->add_option("--out", gen_out, "Output directory")->required();

  // discover
  auto* discover = app.add_subcommand("discover", "Discover communities with one algorithm");
  FleetInput d_in;
  DiscoveryConfig d_cfg;
  std::string d_algo = "hec-kmeans", d_metric = "euclidean", d_out;
  bool d_per_pair = false, d_flows = false;
  add_fleet_options(discover, d_in);
  add_discovery_options(discover, d_cfg, d_algo, d_metric, d_per_pair);
  discover->add_flag("--emit-flows", d_flows, "Also write flows.csv");
  discover->add_option("--out", d_out, "Output directory")->required();

  // flow
  auto* flow = app.add_subcommand("flow", "Plan intra-community flows for stored communities");
  FleetInput f_in;
  std::string f_comm, f_kind = "MEC", f_out;
  LossModel f_loss;
  bool f_per_pair = false;
  add_fleet_options(flow, f_in);
  flow->add_option("--communities", f_comm, "communities.csv")->required();
  flow->add_option("--kind", f_kind, "HEC | MEC | SEC")->check(CLI::IsMember({"HEC", "MEC", "SEC"}))->capture_default_str();
  flow->add_option("--theta", f_loss.theta, "Loss fraction per reference distance")->capture_default_str();
  flow->add_option("--theta-distance", f_loss.reference_distance, "Reference distance")->capture_default_str();
  flow->add_flag("--per-pair-loss", f_per_pair, "Loss grows with distance");
  flow->add_option("--out", f_out, "Output flows.csv path")->required();

  // metrics
  auto* metrics = app.add_subcommand("metrics", "Report metrics from stored artifacts");
  FleetInput m_in;
  std::string m_comm, m_kind = "MEC", m_flows, m_bench, m_out;
  LossModel m_loss;
  bool m_per_pair = false;
  add_fleet_options(metrics, m_in);
  metrics->add_option("--communities", m_comm, "communities.csv")->required();
  metrics->add_option("--kind", m_kind, "HEC | MEC | SEC")->check(CLI::IsMember({"HEC", "MEC", "SEC"}))->capture_default_str();
  metrics->add_option("--flows", m_flows, "Stored flows.csv (recomputed when absent)");
  metrics->add_option("--benchmark", m_bench, "Benchmark communities.csv for the SSE ratio");
  metrics->add_option("--theta", m_loss.theta, "Loss fraction per reference distance")->capture_default_str();
  metrics->add_option("--theta-distance", m_loss.reference_distance, "Reference distance")->capture_default_str();
  metrics->add_flag("--per-pair-loss", m_per_pair, "Loss grows with distance");
  metrics->add_option("--out", m_out, "Output directory")->required();

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Sweep one parameter and emit plot data");
  FleetInput s_in;
  DiscoveryConfig s_cfg;
  std::string s_algo, s_metric = "euclidean", s_out;
  bool s_per_pair = false;
  SweepSpec s_spec;
  double s_from = 0, s_to = 0, s_step = 0;
  add_fleet_options(sweep, s_in);
  add_discovery_options(sweep, s_cfg, s_algo, s_metric, s_per_pair);
  sweep->add_option("--param", s_spec.param, "k | L | eps | t")->check(CLI::IsMember({"k", "L", "eps", "t"}))->required();
  auto* o_from = sweep->add_option("--from", s_from, "First value");
  auto* o_to = sweep->add_option("--to", s_to, "Last value");
  auto* o_step = sweep->add_option("--step", s_step, "Increment");
  sweep->add_option("--values", s_spec.values, "Explicit comma-separated values")->delimiter(',');
  sweep->add_option("--out", s_out, "Output directory")->required();

  // oracle
  auto* orc = app.add_subcommand("oracle", "Brute-force partition enumeration on tiny fleets");
  FleetInput o_in;
  std::string o_problem = "sec", o_out;
  std::size_t o_k = 3;
  LossModel o_loss;
  bool o_per_pair = false;
  add_fleet_options(orc, o_in);
  orc->add_option("--problem", o_problem, "sec (min load) | sse (min spatial SSE)")
      ->check(CLI::IsMember({"sec", "sse"}))
      ->capture_default_str();
  orc->add_option("--k", o_k, "Parts: at most K for sec, exactly K for sse")->capture_default_str();
  orc->add_option("--theta", o_loss.theta, "Loss fraction per reference distance")->capture_default_str();
  orc->add_flag("--per-pair-loss", o_per_pair, "Loss grows with distance");
  orc->add_option("--out", o_out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  try {
    if (gen->parsed()) {
      gcfg.seed = seed;
      gcfg.threads = threads;
      gcfg.mode = mode == "consumption-only" ? GenerationMode::ConsumptionOnly : GenerationMode::GenAndCons;
      const Fleet fleet = generate_fleet(load_traces(traces_path), load_geo_pool(pool_path), gcfg);
      const fs::path out = gen_out;
      fs::create_directories(out);
      io::emit_fleet(fleet, out / "microgrids.csv", out / "energy.csv");
      io::write_file_atomic(out / "substations.csv", io::substations_csv(simulate_substations(fleet, gen_k_sub, seed)));
      io::write_file_atomic(out / "census.csv", sign_census(fleet).to_csv());
      echo_config(app, out);
      std::cout << "generated " << fleet.size() << " microgrids x " << fleet.window_length() << " readings into "
                << out.string() << "\n";
      return kOk;
    }

    if (discover->parsed()) {
      finish_discovery_config(d_cfg, d_algo, d_metric, d_per_pair, seed);
      d_cfg.validate();
      const auto in = load_fleet(d_in, seed);
      const Fleet fleet = windowed(in.fleet, d_cfg);
      const fs::path out = d_out;
      fs::create_directories(out);
      echo_config(app, out);
      const auto run = run_discovery(fleet, in.subs, d_cfg);
      write_run(out, fleet, run, d_flows);
      std::cout << to_string(d_cfg.algorithm) << ": " << run.metrics.communities << " communities, "
                << run.metrics.unassigned << " unassigned, load " << io::format_double(run.metrics.load_with) << " vs "
                << io::format_double(run.metrics.load_without) << " without\n";
      if (run.status != RunStatus::Ok) std::cerr << run.note << "\n";
      return exit_for(run.status);
    }

    if (flow->parsed()) {
      f_loss.uniform = !f_per_pair;
      f_loss.validate();
      const auto in = load_fleet(f_in, seed);
      const auto a = io::ingest_assignment(in.fleet, f_comm, f_kind == "HEC" ? CommunityKind::HEC
                                                                 : f_kind == "SEC" ? CommunityKind::SEC
                                                                                   : CommunityKind::MEC);
      const auto plan = plan_flows(in.fleet, a, f_loss, &in.subs);
      const fs::path out = f_out;
      if (out.has_parent_path()) fs::create_directories(out.parent_path());
      io::write_file_atomic(out, io::flow_plan_csv(in.fleet, plan));
      echo_config(app, out.has_parent_path() ? out.parent_path() : fs::path("."));
      std::cout << "planned " << plan.slices.size() << " slices, load " << io::format_double(plan.total_load()) << "\n";
      return kOk;
    }

    if (metrics->parsed()) {
      m_loss.uniform = !m_per_pair;
      m_loss.validate();
      const auto in = load_fleet(m_in, seed);
      const CommunityKind kind = m_kind == "HEC" ? CommunityKind::HEC : m_kind == "SEC" ? CommunityKind::SEC : CommunityKind::MEC;
      const auto a = io::ingest_assignment(in.fleet, m_comm, kind);
      SummaryInputs si;
      si.substations = &in.subs;
      si.loss = m_loss;
      FlowPlan plan;
      if (!m_flows.empty()) {
        plan = io::parse_flow_plan(in.fleet, io::read_file(m_flows), m_flows);
        si.flows = &plan;
      }
      if (!m_bench.empty()) {
        const auto bench = io::ingest_assignment(in.fleet, m_bench, kind);
        const double sse0 = spatial_sse(in.fleet, bench);
        if (sse0 == 0.0) throw Error(Errc::DegenerateBenchmark, "benchmark SSE is zero");
        si.benchmark_sse = sse0;
      }
      const auto report = summarize(in.fleet, a, si);
      const fs::path out = m_out;
      fs::create_directories(out);
      io::write_file_atomic(out / "metrics.csv", report.to_csv());
      io::write_file_atomic(out / "metrics.txt", report.to_text());
      echo_config(app, out);
      std::cout << report.to_text();
      return kOk;
    }

    if (sweep->parsed()) {
      if (s_algo.empty()) s_algo = default_algo_for(s_spec.param);
      finish_discovery_config(s_cfg, s_algo, s_metric, s_per_pair, seed);
      if (o_from->count()) s_spec.from = s_from;
      if (o_to->count()) s_spec.to = s_to;
      if (o_step->count()) s_spec.step = s_step;
      const auto in = load_fleet(s_in, seed);
      return run_sweep(app, s_spec, s_cfg, in, s_out, threads);
    }

    if (orc->parsed()) {
      o_loss.uniform = !o_per_pair;
      o_loss.validate();
      const auto in = load_fleet(o_in, seed);
      const fs::path out = o_out;
      fs::create_directories(out);
      echo_config(app, out);
      std::vector<std::size_t> labels;
      std::string summary;
      int code = kOk;
      if (o_problem == "sec") {
        const auto best = oracle::min_sec_load(in.fleet, o_k, o_loss, &in.subs);
        summary = "key,value\nproblem,sec\nk_max," + std::to_string(o_k) + "\nfeasible," + (best.feasible ? "true" : "false") +
                  "\nload," + (best.feasible ? io::format_double(best.load) : std::string("na")) + "\npartitions," +
                  std::to_string(best.partitions_visited) + "\n";
        labels = best.labels;
        if (!best.feasible) code = kInfeasible;
      } else {
        const auto best = oracle::min_spatial_sse(in.fleet, o_k);
        summary = "key,value\nproblem,sse\nk," + std::to_string(o_k) + "\nsse," + io::format_double(best.sse) + "\n";
        labels = best.labels;
      }
      io::write_file_atomic(out / "oracle.csv", summary);
      if (!labels.empty()) {
        const auto a = assignment_from_labels(in.fleet, o_problem == "sec" ? CommunityKind::SEC : CommunityKind::HEC, labels);
        io::emit_assignment(in.fleet, a, out / "communities.csv");
      }
      std::cout << summary;
      return code;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == Errc::NoPositiveMicrogrids ? kInfeasible : kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  }
  return kOk;
}
