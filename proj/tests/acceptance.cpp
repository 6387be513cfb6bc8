// End-to-end acceptance run on seeded desk-scale fleets. Prints one PASS/FAIL
// line per criterion and exits nonzero when any criterion fails.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "gridcomm/gridcomm.hpp"
#include "vertex_oracle.hpp"

namespace fs = std::filesystem;
using namespace gridcomm;

namespace {

// Pinned tolerances.
constexpr double kSseRelTol = 1e-9;         // K-Means vs brute-force SSE
constexpr double kKMeansWorstRatio = 1.2;   // never worse than this times optimal
constexpr double kKMeansMatchShare = 0.8;
constexpr double kTransportRelTol = 1e-9;   // transport objective vs vertex enumeration
constexpr double kTabuRelTol = 1e-9;        // tabu load vs exhaustive optimum
constexpr double kTabuMatchShare = 0.9;
constexpr double kOracleSeconds = 60.0;
constexpr int kMaxInversions = 1;

constexpr std::size_t kFleetSize = 500;
constexpr std::size_t kWindow = 96;
constexpr double kDeskBoundW = 20000.0;  // L at this fleet size; see README

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Data {
  TraceSet traces;
  std::vector<Location> pool;
};

const Data& data() {
  static const Data d{load_traces(fs::path(GRIDCOMM_DATA_DIR) / "sample_traces.csv"),
                      load_geo_pool(fs::path(GRIDCOMM_DATA_DIR) / "geo_pool.csv")};
  return d;
}

Fleet make_fleet(std::uint64_t seed, GenerationMode mode, std::size_t n = kFleetSize, std::size_t window = kWindow) {
  GenerateConfig cfg;
  cfg.n = n;
  cfg.mode = mode;
  cfg.window_length = window;
  cfg.seed = seed;
  return generate_fleet(data().traces, data().pool, cfg);
}

bool nonnegative_total(const Fleet& f) {
  for (Milliwatts v : f.total()) {
    if (v < 0) return false;
  }
  return true;
}

// Violations of "non-increasing" (sign = -1) or "non-decreasing" (sign = +1).
int inversions(const std::vector<double>& v, int sign) {
  int bad = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    const double step = v[i] - v[i - 1];
    const double tol = 1e-12 * (1.0 + std::abs(v[i - 1]));
    if (sign < 0 ? step > tol : step < -tol) ++bad;
  }
  return bad;
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (double x : v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s%.4g", s.empty() ? "" : " ", x);
    s += buf;
  }
  return s;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

DiscoveryConfig base_config(Algorithm a, std::uint64_t seed) {
  DiscoveryConfig c;
  c.algorithm = a;
  c.seed = seed;
  c.k = 20;
  c.bound_w = kDeskBoundW;
  c.k_values = {5, 10};
  c.time_budget_s = 60.0;
  return c;
}

// Loads gathered by the partition suite and checked again for load reduction.
struct LoadRecord {
  std::string what;
  double with = 0.0, without = 0.0;
};
std::vector<LoadRecord> g_loads;

// ---------------------------------------------------------------------------

Outcome partition_suite() {
  Outcome o;
  int runs = 0, violations = 0;
  std::string first;
  const auto fail = [&](const std::string& why) {
    ++violations;
    if (first.empty()) first = why;
  };
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Fleet neg = make_fleet(seed, GenerationMode::ConsumptionOnly);
    const Fleet mix = make_fleet(seed, GenerationMode::GenAndCons);
    const Fleet tiny = make_fleet(seed, GenerationMode::GenAndCons, 8, 3);
    const Substations neg_subs = simulate_substations(neg, 5, seed);
    const Substations mix_subs = simulate_substations(mix, 5, seed);
    // One substation serves a handful of microgrids.
    const Substations tiny_subs = simulate_substations(tiny, 1, seed);
    struct Job {
      Algorithm algo;
      const Fleet* fleet;
      const Substations* subs;
    };
    const Job jobs[] = {{Algorithm::HecKMeans, &neg, &neg_subs},   {Algorithm::HecLdbscan, &neg, &neg_subs},
                        {Algorithm::Mec, &mix, &mix_subs},         {Algorithm::SecTabu, &mix, &mix_subs},
                        {Algorithm::SecTwoPhase, &mix, &mix_subs}, {Algorithm::SecExact, &tiny, &tiny_subs}};
    for (const auto& job : jobs) {
      DiscoveryConfig cfg = base_config(job.algo, seed);
      if (job.algo == Algorithm::SecExact) cfg.k = 3;
      const auto run = run_discovery(*job.fleet, *job.subs, cfg);
      ++runs;
      const std::string tag = std::string(to_string(job.algo)) + " seed " + std::to_string(seed);
      if (const auto err = validate_assignment(*job.fleet, run.assignment); !err.empty()) fail(tag + ": " + err);
      const auto& a = run.assignment;
      if (a.kind == CommunityKind::HEC) {
        if (!a.unassigned.empty()) fail(tag + ": HEC left microgrids unassigned");
        for (const auto& c : a.communities) {
          for (std::size_t i : c.members) {
            if (job.fleet->sign(i) != job.fleet->sign(c.members.front())) fail(tag + ": mixed HEC");
          }
          if (job.algo == Algorithm::HecLdbscan && c.size() >= 2) {
            for (Milliwatts e : c.aggregate) {
              if (std::abs(e) > to_milliwatts(cfg.bound_w)) fail(tag + ": bound exceeded");
            }
          }
        }
      }
      const bool sec_output = a.kind == CommunityKind::SEC && run.status == RunStatus::Ok;
      if (sec_output) {
        for (const auto& c : a.communities) {
          for (Milliwatts e : c.aggregate) {
            if (e < 0) fail(tag + ": SEC aggregate below zero");
          }
        }
      }
      if (a.kind != CommunityKind::SEC || sec_output) {
        g_loads.push_back({tag, run.metrics.load_with, run.metrics.load_without});
      }
    }
  }
  o.pass = violations == 0;
  o.detail = std::to_string(runs) + " runs, " + std::to_string(violations) + " violations" + (first.empty() ? "" : "; " + first);
  return o;
}

Outcome small_oracles() {
  Outcome o;
  std::string notes;
  double oracle_time = 0.0;

  // (a) K-Means against the best partition into exactly K parts.
  int km_match = 0, km_total = 0;
  double km_worst = 1.0;
  std::mt19937_64 rng(2024);
  for (int inst = 0; inst < 50; ++inst) {
    const std::size_t n = 4 + rng() % 7;
    const std::size_t k = 2 + rng() % 2;
    const Fleet f = fixtures::random_fleet(n, 1, -1, 1000 + static_cast<std::uint64_t>(inst));
    KMeansConfig cfg;
    cfg.k = k;
    cfg.seed = static_cast<std::uint64_t>(inst) + 1;
    const double got = kmeans(locations_of(f), cfg).sse;
    const auto t0 = std::chrono::steady_clock::now();
    const double best = oracle::min_spatial_sse(f, k).sse;
    oracle_time += seconds_since(t0);
    ++km_total;
    if (std::abs(got - best) <= kSseRelTol * (1.0 + best)) ++km_match;
    if (best > 0.0) km_worst = std::max(km_worst, got / best);
  }
  const bool a_ok = km_match >= kKMeansMatchShare * km_total && km_worst <= kKMeansWorstRatio;
  notes += "(a) k-means optimal on " + std::to_string(km_match) + "/" + std::to_string(km_total);
  char buf[64];
  std::snprintf(buf, sizeof buf, ", worst ratio %.4f", km_worst);
  notes += buf;

  // (b) transportation optimum against basis enumeration, up to 3 x 3.
  int tr_match = 0, tr_total = 0;
  std::mt19937_64 trng(77);
  for (int inst = 0; inst < 200; ++inst) {
    std::uniform_int_distribution<std::size_t> count(1, 3);
    std::uniform_int_distribution<Milliwatts> amount(1, 500);
    std::uniform_real_distribution<double> dist(0.01, 1.0);
    const double theta = (inst % 2 == 0) ? 0.0 : 0.0001;
    TransportProblem p;
    const std::size_t ns = count(trng), nd = count(trng);
    for (std::size_t i = 0; i < ns; ++i) p.supply.push_back(amount(trng));
    for (std::size_t s = 0; s < nd; ++s) p.demand.push_back(amount(trng));
    for (std::size_t e = 0; e < ns * nd; ++e) {
      p.cost.push_back(dist(trng) * 0.001);
      p.loss.push_back(theta);
    }
    const auto sol = solve_transport(p);
    const auto t0 = std::chrono::steady_clock::now();
    const auto best = vertex_oracle::enumerate_vertices(p, true);
    oracle_time += seconds_since(t0);
    ++tr_total;
    if (std::abs(sol.cost - best.cost) <= kTransportRelTol * (1.0 + best.cost)) ++tr_match;
  }
  const bool b_ok = tr_match == tr_total;
  notes += "; (b) transport exact on " + std::to_string(tr_match) + "/" + std::to_string(tr_total);

  // (c) Tabu against exhaustive SEC partitions.
  int tb_match = 0, tb_total = 0, tb_missed_feasible = 0;
  for (int inst = 0; inst < 50; ++inst) {
    const std::uint64_t seed = 500 + static_cast<std::uint64_t>(inst);
    const std::size_t n = 5 + static_cast<std::size_t>(inst % 4);
    const std::size_t window = 1 + static_cast<std::size_t>(inst % 3);
    const std::size_t k = 2 + static_cast<std::size_t>(inst % 2);
    const Fleet f = fixtures::tiny_sec_fleet(n, window, seed);
    SecOptConfig cfg;
    cfg.k_values = k_range(1, k);
    cfg.seed = seed;
    const auto r = discover_sec_tabu(f, cfg);
    const auto t0 = std::chrono::steady_clock::now();
    const auto best = oracle::min_sec_load(f, k, cfg.loss);
    oracle_time += seconds_since(t0);
    ++tb_total;
    if (best.feasible && r.status != SecStatus::Feasible) ++tb_missed_feasible;
    if (best.feasible && r.status == SecStatus::Feasible && std::abs(r.objective - best.load) <= kTabuRelTol * (1.0 + best.load)) {
      ++tb_match;
    }
  }
  const bool c_ok = tb_match >= kTabuMatchShare * tb_total && tb_missed_feasible == 0;
  notes += "; (c) tabu optimal on " + std::to_string(tb_match) + "/" + std::to_string(tb_total) + ", missed feasible " +
           std::to_string(tb_missed_feasible);
  std::snprintf(buf, sizeof buf, "; oracle time %.2f s", oracle_time);
  notes += buf;

  o.pass = a_ok && b_ok && c_ok && oracle_time < kOracleSeconds;
  o.detail = notes;
  return o;
}

Outcome ne_distance_units() {
  const std::vector<Milliwatts> a{5000, -3000, 12000}, b{-5000, 3000, -12000}, c{1000, 1000, -1000};
  bool ok = ne_distance(a, b) == 0;
  ok = ok && ne_distance(a, a) == 2 * (5000 + 3000 + 12000);
  ok = ok && ne_distance(a, c) == ne_distance(c, a);
  // Witness: e1 = [1], e2 = [-1], e3 = [1]. d(1,3) = 2 > d(1,2) + d(2,3) = 0.
  const std::vector<Milliwatts> w1{1}, w2{-1}, w3{1};
  const bool witness = ne_distance(w1, w3) > ne_distance(w1, w2) + ne_distance(w2, w3);
  return {ok && witness, "closed forms, symmetry and triangle-inequality witness"};
}

Outcome hec_k_trend() {
  const Fleet f = make_fleet(11, GenerationMode::ConsumptionOnly, 1000);
  const Substations subs = simulate_substations(f, 5, 11);
  std::vector<double> size, demand, load;
  bool below = true;
  for (std::size_t k : {10, 20, 40, 80}) {
    DiscoveryConfig cfg = base_config(Algorithm::HecKMeans, 11);
    cfg.k = k;
    const auto run = run_discovery(f, subs, cfg);
    size.push_back(run.metrics.size.avg);
    demand.push_back(run.metrics.external_demand.avg);
    load.push_back(run.metrics.load_with);
    below = below && run.metrics.load_with < run.metrics.load_without;
  }
  const int inv = std::max({inversions(size, -1), inversions(demand, -1), inversions(load, -1)});
  return {inv <= kMaxInversions && below,
          "size " + join(size) + "; demand_w " + join(demand) + "; load " + join(load) + (below ? "; below no-community load" : "")};
}

Outcome ldbscan_trend() {
  std::string notes;
  bool ok = true;
  // Bound binding: whenever a community's growth was stopped by L, the largest
  // external demand sits within one microgrid's peak of L.
  const Fleet f = make_fleet(12, GenerationMode::ConsumptionOnly, 1000);
  Milliwatts peak = 0;
  for (Milliwatts e : f.energy()) peak = std::max(peak, std::abs(e));
  int saturated_runs = 0;
  for (double bound : {10000.0, 20000.0, 40000.0, 80000.0}) {
    DiscoveryConfig cfg = base_config(Algorithm::HecLdbscan, 12);
    cfg.bound_w = bound;
    const auto a = discover_hec_ldbscan(f, {cfg.eps, cfg.min_neighbors, to_milliwatts(bound), cfg.metric});
    Milliwatts max_ext = 0;
    bool saturated = false;
    for (const auto& c : a.communities) {
      Milliwatts ext = 0;
      for (Milliwatts e : c.aggregate) ext = std::max(ext, std::abs(e));
      if (c.size() >= 2) max_ext = std::max(max_ext, ext);
      // Saturated: some eps-neighbour outside the community would break L.
      for (std::size_t i = 0; i < f.size() && !saturated; ++i) {
        if (std::binary_search(c.members.begin(), c.members.end(), i)) continue;
        bool near = false;
        for (std::size_t m : c.members) near = near || spatial_distance(f.location(i), f.location(m)) <= cfg.eps;
        if (!near) continue;
        for (std::size_t t = 0; t < f.window_length() && !saturated; ++t) {
          saturated = std::abs(c.aggregate[t] + f.series(i)[t]) > to_milliwatts(bound);
        }
      }
    }
    if (saturated) {
      ++saturated_runs;
      const bool binding = max_ext <= to_milliwatts(bound) && max_ext >= to_milliwatts(bound) - peak;
      ok = ok && binding;
      char buf[96];
      std::snprintf(buf, sizeof buf, "L=%.0f max_ext=%.0f; ", bound, to_watts(max_ext));
      notes += buf;
    }
  }
  notes += std::to_string(saturated_runs) + " saturated runs; ";

  // Spatial SSE against the window length, averaged over seeds.
  std::vector<double> sse;
  for (std::size_t len : {1, 24, 48, 96}) {
    double sum = 0.0;
    for (std::uint64_t seed = 21; seed <= 25; ++seed) {
      const Fleet g = make_fleet(seed, GenerationMode::ConsumptionOnly);
      DiscoveryConfig cfg = base_config(Algorithm::HecLdbscan, seed);
      cfg.window_length = len;
      const Fleet w = windowed(g, cfg);
      sum += spatial_sse(w, discover_hec_ldbscan(w, {cfg.eps, cfg.min_neighbors, to_milliwatts(cfg.bound_w), cfg.metric}));
    }
    sse.push_back(sum / 5.0);
  }
  const int inv = inversions(sse, -1);
  ok = ok && saturated_runs > 0 && inv <= kMaxInversions;
  notes += "sse over |t| " + join(sse);
  return {ok, notes};
}

Outcome mec_trend() {
  const std::vector<double> eps{0.05, 0.1, 0.15, 0.2, 0.25};
  std::vector<double> sse(eps.size(), 0.0), ratio(eps.size(), 0.0);
  constexpr int kSeeds = 3;
  for (std::uint64_t seed = 31; seed < 31 + kSeeds; ++seed) {
    const Fleet f = make_fleet(seed, GenerationMode::GenAndCons);
    const NeNormalizer norm = NeNormalizer::for_fleet(f, seed);
    const double sse0 = spatial_sse(f, discover_mec(f, {1.0, 0.05, DistanceMetric::Euclidean, seed, norm}).assignment);
    for (std::size_t e = 0; e < eps.size(); ++e) {
      sse[e] += spatial_sse(f, discover_mec(f, {eps[e], 0.05, DistanceMetric::Euclidean, seed, norm}).assignment) / kSeeds;
      const double s1 = spatial_sse(f, discover_mec(f, {eps[e], 1.0, DistanceMetric::Euclidean, seed, norm}).assignment);
      ratio[e] += sse_ratio(s1, sse0) / kSeeds;
    }
  }
  const bool sse_up = inversions(sse, +1) <= kMaxInversions;
  const bool ratio_above = std::all_of(ratio.begin(), ratio.end(), [](double r) { return r >= 1.0; });
  const bool ratio_down = inversions(ratio, -1) <= kMaxInversions;  // increasing as eps decreases
  return {sse_up && ratio_above && ratio_down,
          "eps " + join(eps) + "; sse(eps'=0.05) " + join(sse) + "; ratio(eps'=1) " + join(ratio)};
}

Outcome twophase_vs_tabu() {
  Outcome o;
  int fleets = 0, all_assigned = 0, energy_ok = 0, energy_cases = 0, faster = 0;
  std::string notes;
  for (std::uint64_t seed = 41; fleets < 10 && seed < 200; ++seed) {
    const Fleet f = make_fleet(seed, GenerationMode::GenAndCons);
    if (!nonnegative_total(f)) continue;
    ++fleets;
    const Substations subs = simulate_substations(f, 5, seed);
    DiscoveryConfig tabu = base_config(Algorithm::SecTabu, seed);
    tabu.k_values = {5, 10, 15, 20};
    const auto rt = run_discovery(f, subs, tabu);
    const auto rp = run_discovery(f, subs, base_config(Algorithm::SecTwoPhase, seed));
    if (rt.status == RunStatus::Ok && rt.assignment.unassigned.empty()) ++all_assigned;
    if (!rp.assignment.unassigned.empty()) {
      ++energy_cases;
      if (rp.metrics.net_energy.avg >= rt.metrics.net_energy.avg) ++energy_ok;
    }
    if (rp.runtime_seconds < rt.runtime_seconds) ++faster;
    char buf[128];
    std::snprintf(buf, sizeof buf, "[%.2fs vs %.2fs] ", rp.runtime_seconds, rt.runtime_seconds);
    notes += buf;
  }
  o.pass = fleets == 10 && all_assigned == fleets && energy_ok == energy_cases && faster == fleets;
  o.detail = std::to_string(fleets) + " fleets; tabu assigned all on " + std::to_string(all_assigned) +
             "; two-phase avg net energy >= tabu on " + std::to_string(energy_ok) + "/" + std::to_string(energy_cases) +
             " partial runs; two-phase faster on " + std::to_string(faster) + "; two-phase vs tabu " + notes;
  return o;
}

Outcome load_reduction() {
  int ok = 0;
  std::string first;
  for (const auto& r : g_loads) {
    if (r.with < r.without) {
      ++ok;
    } else {
      char buf[160];
      std::snprintf(buf, sizeof buf, "; %s: %.4g >= %.4g", r.what.c_str(), r.with, r.without);
      first += buf;
    }
  }
  return {!g_loads.empty() && ok == static_cast<int>(g_loads.size()),
          std::to_string(ok) + "/" + std::to_string(g_loads.size()) + " outputs below the no-community load" + first};
}

std::string artifacts(const Fleet& f, const DiscoveryRun& r) {
  return io::assignment_csv(f, r.assignment) + r.metrics.to_csv() + io::flow_plan_csv(f, r.flows) +
         io::admission_log_csv(f, r.admission_log) + io::trace_csv(r.search_trace);
}

bool same_tree(const fs::path& a, const fs::path& b, std::string& diff) {
  for (const auto& e : fs::recursive_directory_iterator(a)) {
    if (!e.is_regular_file()) continue;
    const auto rel = fs::relative(e.path(), a);
    // Wall-clock measurements legitimately differ between runs.
    const std::string name = rel.filename().string();
    if (name == "timing.csv" || name == "config.echo" || name.find("runtime") != std::string::npos) continue;
    if (!fs::exists(b / rel) || io::read_file(e.path()) != io::read_file(b / rel)) {
      diff = rel.string();
      return false;
    }
  }
  return true;
}

Outcome determinism_roundtrip() {
  std::string notes;
  bool ok = true;

  // Library determinism for every algorithm.
  const Fleet mix = make_fleet(61, GenerationMode::GenAndCons);
  const Fleet neg = make_fleet(61, GenerationMode::ConsumptionOnly);
  const Fleet tiny = make_fleet(61, GenerationMode::GenAndCons, 8, 3);
  int same = 0, total = 0;
  for (int a = 0; a < 6; ++a) {
    const auto algo = static_cast<Algorithm>(a);
    const Fleet& f = kind_of(algo) == CommunityKind::HEC ? neg : algo == Algorithm::SecExact ? tiny : mix;
    const Substations subs = simulate_substations(f, algo == Algorithm::SecExact ? 1 : 5, 61);
    DiscoveryConfig cfg = base_config(algo, 61);
    if (algo == Algorithm::SecExact) cfg.k = 3;
    ++total;
    if (artifacts(f, run_discovery(f, subs, cfg)) == artifacts(f, run_discovery(f, subs, cfg))) ++same;
  }
  ok = ok && same == total;
  notes += "library runs identical " + std::to_string(same) + "/" + std::to_string(total);

  // ingest(emit(x)) on every CSV artifact.
  int rt_ok = 0, rt_total = 0;
  const auto check = [&](bool b) {
    ++rt_total;
    rt_ok += b ? 1 : 0;
  };
  {
    bool raw = false;
    auto mg = io::parse_microgrids(io::microgrids_csv(mix), "m", raw);
    const Fleet back = io::fleet_from_parts(std::move(mg), io::parse_energy(io::energy_csv(mix), "e"), raw);
    check(io::microgrids_csv(back) == io::microgrids_csv(mix) && io::energy_csv(back) == io::energy_csv(mix) &&
          back.energy() == mix.energy());
    const Substations subs = simulate_substations(mix, 5, 61);
    check(io::substations_csv(io::parse_substations(io::substations_csv(subs), "s")) == io::substations_csv(subs));
    const auto mec = run_discovery(mix, subs, base_config(Algorithm::Mec, 61));
    const auto comm = io::assignment_csv(mix, mec.assignment);
    check(io::assignment_csv(mix, io::parse_assignment(mix, comm, "c", CommunityKind::MEC)) == comm);
    const auto log = io::admission_log_csv(mix, mec.admission_log);
    check(io::admission_log_csv(mix, io::parse_admission_log(mix, log, "l")) == log);
    const auto flows = io::flow_plan_csv(mix, mec.flows);
    check(io::flow_plan_csv(mix, io::parse_flow_plan(mix, flows, "f")) == flows);
    const auto metrics = mec.metrics.to_csv();
    check(io::key_values_csv(io::parse_key_values(metrics, "k")) == metrics);
    const auto tabu = run_discovery(mix, subs, base_config(Algorithm::SecTabu, 61));
    const auto trace = io::trace_csv(tabu.search_trace);
    check(io::trace_csv(io::parse_trace(trace, "t")) == trace);
  }
  ok = ok && rt_ok == rt_total;
  notes += "; round trips " + std::to_string(rt_ok) + "/" + std::to_string(rt_total);

  // The command-line tool, twice with the same seed.
  const fs::path root = fs::temp_directory_path() / "gridcomm_acceptance";
  fs::remove_all(root);
  const std::string cli = GRIDCOMM_CLI;
  const std::string data_dir = GRIDCOMM_DATA_DIR;
  bool cli_ok = true;
  std::string diff;
  for (const char* run : {"a", "b"}) {
    const fs::path out = root / run;
    const std::string pre = "\"" + cli + "\" --seed 5 ";
    const std::vector<std::string> cmds{
        pre + "gen --traces \"" + data_dir + "/sample_traces.csv\" --geo-pool \"" + data_dir + "/geo_pool.csv\" --n 300 --out \"" +
            (out / "fleet").string() + "\"",
        pre + "gen --mode consumption-only --traces \"" + data_dir + "/sample_traces.csv\" --geo-pool \"" + data_dir +
            "/geo_pool.csv\" --n 300 --out \"" + (out / "neg").string() + "\"",
        pre + "discover --fleet \"" + (out / "neg").string() + "\" --algo hec-kmeans --k 20 --emit-flows --out \"" + (out / "km").string() + "\"",
        pre + "discover --fleet \"" + (out / "neg").string() + "\" --algo hec-ldbscan --bound 20000 --out \"" + (out / "ld").string() + "\"",
        pre + "discover --fleet \"" + (out / "fleet").string() + "\" --algo mec --emit-flows --out \"" + (out / "mec").string() + "\"",
        pre + "discover --fleet \"" + (out / "fleet").string() + "\" --algo sec-twophase --out \"" + (out / "tp").string() + "\"",
        pre + "discover --fleet \"" + (out / "fleet").string() + "\" --algo sec-tabu --k-values 5,10 --out \"" + (out / "tabu").string() + "\"",
        pre + "sweep --fleet \"" + (out / "neg").string() + "\" --param k --values 10,20,40 --out \"" + (out / "sweep").string() + "\"",
    };
    for (const auto& c : cmds) {
      const int rc = std::system((c + " > /dev/null 2>&1").c_str());
      // Tabu may legitimately end infeasible on a fleet with a negative total.
      if (rc != 0 && !(c.find("sec-tabu") != std::string::npos && WEXITSTATUS(rc) == 3)) {
        cli_ok = false;
        diff = "command failed: " + c;
      }
    }
  }
  if (cli_ok) cli_ok = same_tree(root / "a", root / "b", diff) && same_tree(root / "b", root / "a", diff);
  ok = ok && cli_ok;
  notes += cli_ok ? "; CLI outputs byte-identical across runs" : "; CLI mismatch: " + diff;
  return {ok, notes};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "partition and feasibility suite", partition_suite},
      {2, "small-instance oracles", small_oracles},
      {3, "NE-distance units", ne_distance_units},
      {4, "HEC trend over K", hec_k_trend},
      {5, "L^t-DBSCAN bound and window trend", ldbscan_trend},
      {6, "MEC trend over eps", mec_trend},
      {7, "two-phase vs tabu", twophase_vs_tabu},
      {8, "load reduction", load_reduction},
      {9, "determinism and round trips", determinism_roundtrip},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += o.pass ? 0 : 1;
    std::printf("criterion %d %s: %s (%.1f s) %s\n", c.id, o.pass ? "PASS" : "FAIL", c.name, seconds_since(t0),
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
