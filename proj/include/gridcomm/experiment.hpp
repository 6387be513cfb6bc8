#pragma once

// One discovery run end to end: window the fleet, run the selected
// algorithm, plan flows and summarize. Shared by the CLI and the acceptance
// harness so both exercise the same path.

#include <chrono>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "gridcomm/core.hpp"
#include "gridcomm/flow.hpp"
#include "gridcomm/hec.hpp"
#include "gridcomm/mec.hpp"
#include "gridcomm/metrics.hpp"
#include "gridcomm/oracle.hpp"
#include "gridcomm/sec.hpp"

namespace gridcomm {

enum class Algorithm { HecKMeans, HecLdbscan, Mec, SecTabu, SecTwoPhase, SecExact };

inline constexpr std::string_view algorithm_names[] = {"hec-kmeans", "hec-ldbscan", "mec",
                                                       "sec-tabu",   "sec-twophase", "sec-exact"};

inline std::string_view to_string(Algorithm a) { return algorithm_names[static_cast<int>(a)]; }

inline Algorithm parse_algorithm(std::string_view s) {
  for (int i = 0; i < 6; ++i) {
    if (algorithm_names[i] == s) return static_cast<Algorithm>(i);
  }
  throw Error(Errc::InvalidConfig, "unknown algorithm '" + std::string(s) + "'");
}

inline CommunityKind kind_of(Algorithm a) {
  switch (a) {
    case Algorithm::HecKMeans:
    case Algorithm::HecLdbscan: return CommunityKind::HEC;
    case Algorithm::Mec: return CommunityKind::MEC;
    default: return CommunityKind::SEC;
  }
}

inline DistanceMetric parse_metric(std::string_view s) {
  if (s == "euclidean") return DistanceMetric::Euclidean;
  if (s == "manhattan") return DistanceMetric::Manhattan;
  throw Error(Errc::InvalidConfig, "unknown distance metric '" + std::string(s) + "'");
}

struct DiscoveryConfig {
  Algorithm algorithm = Algorithm::HecKMeans;
  std::size_t k = 100;              // K-Means K; partition cap for sec-exact
  double eps = 0.1;                 // L^t-DBSCAN radius
  std::size_t min_neighbors = 10;
  double bound_w = 250000.0;        // L
  double eps_ne = 0.15;             // MEC ε
  double eps_sp = 0.05;             // MEC ε′
  double benchmark_eps_sp = 0.05;   // ε′ of the SSE-ratio benchmark (ε = 1)
  DistanceMetric metric = DistanceMetric::Euclidean;
  std::size_t tabu_length = 10;
  std::size_t k_from = 50, k_to = 200, k_step = 10;
  std::vector<std::size_t> k_values;  // overrides the range when set
  double time_budget_s = 300.0;
  double margin_w = 0.0;
  LossModel loss;
  std::uint64_t seed = 1;
  std::size_t window_offset = 0;
  std::size_t window_length = 0;  // 0 keeps the rest of the window
  unsigned kmeans_restarts = 8;

  /// Ks the SEC searches try, clipped to the fleet size.
  std::vector<std::size_t> sec_k_values(std::size_t n) const {
    std::vector<std::size_t> ks = k_values.empty() ? k_range(k_from, k_to, k_step) : k_values;
    std::erase_if(ks, [&](std::size_t kk) { return kk > n; });
    return ks;
  }

  void validate() const {
    loss.validate();
    switch (algorithm) {
      case Algorithm::HecKMeans:
      case Algorithm::SecExact:
        if (k < 1) throw Error(Errc::InvalidK, "K must be at least 1");
        break;
      case Algorithm::HecLdbscan:
        LtDbscanConfig{eps, min_neighbors, to_milliwatts(bound_w), metric}.validate();
        break;
      case Algorithm::Mec:
        MecConfig{eps_ne, eps_sp, metric, seed, std::nullopt}.validate();
        if (!(benchmark_eps_sp >= 0.0 && benchmark_eps_sp <= 1.0)) {
          throw Error(Errc::InvalidConfig, "benchmark spatial threshold must lie in [0, 1]");
        }
        break;
      case Algorithm::SecTabu:
        if (tabu_length < 1) throw Error(Errc::InvalidConfig, "tabu length must be at least 1");
        if (!(time_budget_s > 0.0)) throw Error(Errc::InvalidConfig, "time budget must be positive");
        if (k_values.empty() && (k_step < 1 || k_from < 1 || k_to < k_from)) {
          throw Error(Errc::InvalidConfig, "k range must satisfy 1 <= from <= to with step >= 1");
        }
        break;
      case Algorithm::SecTwoPhase:
        if (margin_w < 0.0) throw Error(Errc::InvalidConfig, "margin must be nonnegative");
        break;
    }
  }
};

/// The slice of the fleet's window the run looks at.
inline Fleet windowed(const Fleet& fleet, const DiscoveryConfig& cfg) {
  if (cfg.window_offset == 0 && (cfg.window_length == 0 || cfg.window_length == fleet.window_length())) return fleet;
  if (cfg.window_offset >= fleet.window_length()) {
    throw Error(Errc::InvalidConfig, "window offset " + std::to_string(cfg.window_offset) + " is past the fleet's " +
                                         std::to_string(fleet.window_length()) + " readings");
  }
  const std::size_t rest = fleet.window_length() - cfg.window_offset;
  const std::size_t len = cfg.window_length == 0 ? rest : cfg.window_length;
  if (len > rest) throw Error(Errc::WindowTooLong, "requested window runs past the end of the series");
  return fleet.window(cfg.window_offset, len);
}

enum class RunStatus { Ok, Infeasible, BudgetExhausted };

struct DiscoveryRun {
  RunStatus status = RunStatus::Ok;
  std::string note;  // human-readable reason when status is not Ok
  CommunityAssignment assignment;
  FlowPlan flows;
  MetricsReport metrics;
  double runtime_seconds = 0.0;  // discovery only, excludes flow planning
  AdmissionLog admission_log;
  std::vector<TraceEntry> search_trace;
  std::vector<std::pair<std::size_t, double>> phase1_sse;
};

/// Runs one algorithm on an already windowed fleet. Library errors
/// propagate; SEC outcomes without a feasible answer come back as a status.
inline DiscoveryRun run_discovery(const Fleet& fleet, const Substations& subs, const DiscoveryConfig& cfg) {
  cfg.validate();
  DiscoveryRun run;
  std::optional<double> benchmark_sse;
  const auto start = std::chrono::steady_clock::now();
  switch (cfg.algorithm) {
    case Algorithm::HecKMeans: {
      KMeansConfig km;
      km.k = cfg.k;
      km.seed = cfg.seed;
      km.restarts = cfg.kmeans_restarts;
      run.assignment = discover_hec_kmeans(fleet, km);
      break;
    }
    case Algorithm::HecLdbscan:
      run.assignment = discover_hec_ldbscan(fleet, {cfg.eps, cfg.min_neighbors, to_milliwatts(cfg.bound_w), cfg.metric});
      break;
    case Algorithm::Mec: {
      MecConfig mc{cfg.eps_ne, cfg.eps_sp, cfg.metric, cfg.seed, std::nullopt};
      auto r = discover_mec(fleet, mc);
      run.assignment = std::move(r.assignment);
      run.admission_log = std::move(r.log);
      // The benchmark drops the NE constraint and reuses the divisor.
      const auto bench = discover_mec(fleet, {1.0, cfg.benchmark_eps_sp, cfg.metric, cfg.seed, r.normalizer});
      benchmark_sse = spatial_sse(fleet, bench.assignment);
      break;
    }
    case Algorithm::SecTabu: {
      SecOptConfig sc;
      sc.k_values = cfg.sec_k_values(fleet.size());
      if (sc.k_values.empty()) throw Error(Errc::InvalidK, "no K in range fits " + std::to_string(fleet.size()) + " microgrids");
      sc.tabu_length = cfg.tabu_length;
      sc.loss = cfg.loss;
      sc.time_budget_s = cfg.time_budget_s;
      sc.seed = cfg.seed;
      auto r = discover_sec_tabu(fleet, sc, &subs);
      run.assignment = std::move(r.assignment);
      run.search_trace = std::move(r.trace);
      if (r.status != SecStatus::Feasible) {
        run.status = r.status == SecStatus::Infeasible ? RunStatus::Infeasible : RunStatus::BudgetExhausted;
        run.note = r.report.empty() ? std::string(to_string(r.status)) : r.report;
      }
      break;
    }
    case Algorithm::SecTwoPhase: {
      TwoPhaseConfig tc;
      tc.k_values = cfg.k_values.empty() ? std::vector<std::size_t>{} : cfg.k_values;
      tc.margin = to_milliwatts(cfg.margin_w);
      tc.seed = cfg.seed;
      try {
        auto r = discover_sec_twophase(fleet, tc);
        run.assignment = std::move(r.assignment);
        run.phase1_sse = std::move(r.phase1_sse);
      } catch (const Error& e) {
        if (e.code() != Errc::NoPositiveMicrogrids) throw;
        run.status = RunStatus::Infeasible;
        run.note = e.what();
        run.assignment = make_assignment(fleet, CommunityKind::SEC, {});
      }
      break;
    }
    case Algorithm::SecExact: {
      const auto best = oracle::min_sec_load(fleet, cfg.k, cfg.loss, &subs);
      if (best.feasible) {
        run.assignment = assignment_from_labels(fleet, CommunityKind::SEC, best.labels);
      } else {
        run.status = RunStatus::Infeasible;
        run.note = "no partition into at most " + std::to_string(cfg.k) + " parts is SEC-feasible";
        run.assignment = make_assignment(fleet, CommunityKind::SEC, {});
      }
      std::ostringstream prov;
      prov << "algo=sec-exact k=" << cfg.k << " partitions=" << best.partitions_visited;
      run.assignment.provenance = prov.str();
      break;
    }
  }
  run.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  run.flows = plan_flows(fleet, run.assignment, cfg.loss, &subs);
  SummaryInputs in;
  in.substations = &subs;
  in.loss = cfg.loss;
  in.flows = &run.flows;
  in.benchmark_sse = benchmark_sse;
  run.metrics = summarize(fleet, run.assignment, in);
  return run;
}

}  // namespace gridcomm
