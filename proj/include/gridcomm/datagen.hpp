#pragma once

// Synthetic fleets resampled from consumption/generation traces, plus
// main-grid substation simulation.
//
// Resampling scheme: each microgrid draws a consumption profile (and, in
// GEN_AND_CONS mode, a generation profile) uniformly, scales both by one
// seeded factor in [jitter_lo, jitter_hi] and reads them cyclically from one
// seeded start offset. Readings that net to exactly zero become +1 mW.

#include <algorithm>
#include <cstdint>
#include <cmath>
#include <filesystem>
#include <limits>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "gridcomm/core.hpp"
#include "gridcomm/flow.hpp"
#include "gridcomm/io.hpp"
#include "gridcomm/kmeans.hpp"

namespace gridcomm {

enum class TraceKind { Consumption, Generation };

struct TraceProfile {
  std::string id;
  TraceKind kind = TraceKind::Consumption;
  std::vector<double> watts;
};

struct TraceSet {
  std::uint32_t cadence_seconds = 900;
  std::vector<TraceProfile> consumption;
  std::vector<TraceProfile> generation;

  void validate() const {
    if (consumption.empty()) throw Error(Errc::InvalidConfig, "trace set has no consumption profiles");
    if (cadence_seconds == 0) throw Error(Errc::InvalidConfig, "trace cadence must be positive");
    for (const auto* group : {&consumption, &generation}) {
      for (const auto& p : *group) {
        if (p.watts.empty()) throw Error(Errc::InvalidConfig, "profile " + p.id + " is empty");
        for (double w : p.watts) {
          if (!std::isfinite(w) || w < 0.0) {
            throw Error(Errc::InvalidConfig, "profile " + p.id + " has a negative or non-finite reading");
          }
        }
      }
    }
  }

  std::size_t shortest() const {
    std::size_t n = std::numeric_limits<std::size_t>::max();
    for (const auto& p : consumption) n = std::min(n, p.watts.size());
    for (const auto& p : generation) n = std::min(n, p.watts.size());
    return n;
  }
};

/// Trace CSV: `profile_id,kind,index,watts` with kind `consumption` or
/// `generation`; indices per profile run 0..L-1 in order. An optional first
/// line `# cadence_seconds=<n>` overrides the 900 s default.
inline TraceSet parse_traces(const std::string& text, const std::string& source) {
  TraceSet set;
  std::string body = text;
  if (body.rfind("# cadence_seconds=", 0) == 0) {
    const auto eol = body.find('\n');
    set.cadence_seconds = static_cast<std::uint32_t>(std::stoul(body.substr(18, eol - 18)));
    body = eol == std::string::npos ? std::string() : body.substr(eol + 1);
  }
  io::CsvReader r(body, source);
  r.expect_header({"profile_id,kind,index,watts"});
  std::vector<std::string_view> cols;
  std::map<std::pair<int, std::string>, TraceProfile> profiles;
  std::vector<std::pair<int, std::string>> order;
  while (r.next(cols)) {
    r.expect_columns(cols, 4);
    int kind = 0;
    if (cols[1] == "consumption") {
      kind = 0;
    } else if (cols[1] == "generation") {
      kind = 1;
    } else {
      r.fail("unknown trace kind '" + std::string(cols[1]) + "'");
    }
    const std::pair<int, std::string> key{kind, std::string(cols[0])};
    auto [it, inserted] = profiles.try_emplace(key);
    if (inserted) {
      it->second.id = key.second;
      it->second.kind = kind == 0 ? TraceKind::Consumption : TraceKind::Generation;
      order.push_back(key);
    }
    const auto index = r.integer<std::size_t>(cols[2]);
    if (index != it->second.watts.size()) r.fail("profile " + key.second + " index out of order");
    const double w = r.real(cols[3]);
    if (w < 0.0) r.fail("negative reading");
    it->second.watts.push_back(w);
  }
  for (const auto& key : order) {
    auto& p = profiles.at(key);
    (key.first == 0 ? set.consumption : set.generation).push_back(std::move(p));
  }
  return set;
}

inline TraceSet load_traces(const std::filesystem::path& path) {
  return parse_traces(io::read_file(path), path.string());
}

/// Geo pool CSV: `lon,lat`, raw degrees, duplicates allowed.
inline std::vector<Location> parse_geo_pool(const std::string& text, const std::string& source) {
  io::CsvReader r(text, source);
  r.expect_header({"lon,lat"});
  std::vector<Location> pool;
  std::vector<std::string_view> cols;
  while (r.next(cols)) {
    r.expect_columns(cols, 2);
    pool.push_back({r.real(cols[0]), r.real(cols[1])});
  }
  return pool;
}

inline std::vector<Location> load_geo_pool(const std::filesystem::path& path) {
  return parse_geo_pool(io::read_file(path), path.string());
}

enum class GenerationMode { ConsumptionOnly, GenAndCons };

struct GenerateConfig {
  std::size_t n = 500;
  GenerationMode mode = GenerationMode::GenAndCons;
  std::size_t window_length = 96;
  std::uint64_t seed = 1;
  double jitter_lo = 0.7;
  double jitter_hi = 1.3;
  unsigned threads = 1;

  void validate() const {
    if (n == 0) throw Error(Errc::InvalidConfig, "fleet size must be positive");
    if (window_length == 0) throw Error(Errc::InvalidConfig, "window length must be positive");
    if (!(jitter_lo > 0.0) || jitter_hi < jitter_lo) throw Error(Errc::InvalidConfig, "jitter range must satisfy 0 < lo <= hi");
  }
};

namespace detail {

inline void synthesize_microgrid(const TraceSet& traces, const std::vector<Location>& geo_pool,
                                 const GenerateConfig& cfg, std::size_t i, Microgrid& mg, Milliwatts* row) {
  std::mt19937_64 rng(derive_seed(cfg.seed, i));
  const auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
  const TraceProfile& cons = traces.consumption[pick(traces.consumption.size())];
  const TraceProfile* gen = nullptr;
  if (cfg.mode == GenerationMode::GenAndCons && !traces.generation.empty()) {
    gen = &traces.generation[pick(traces.generation.size())];
  }
  const double scale = std::uniform_real_distribution<double>(cfg.jitter_lo, cfg.jitter_hi)(rng);
  const std::size_t offset = pick(traces.shortest());
  for (std::size_t t = 0; t < cfg.window_length; ++t) {
    Milliwatts v = -to_milliwatts(scale * cons.watts[(offset + t) % cons.watts.size()]);
    if (gen) v += to_milliwatts(scale * gen->watts[(offset + t) % gen->watts.size()]);
    row[t] = v == 0 ? 1 : v;
  }
  mg.id = static_cast<MicrogridId>(i + 1);
  mg.raw_location = geo_pool[pick(geo_pool.size())];
  mg.raw_units = CoordUnits::Degrees;
}

}  // namespace detail

/// Microgrid ids are 1..n. Every microgrid depends only on (seed, index), so
/// the result does not depend on the thread count.
inline Fleet generate_fleet(const TraceSet& traces, const std::vector<Location>& geo_pool, const GenerateConfig& cfg) {
  cfg.validate();
  traces.validate();
  if (geo_pool.empty()) throw Error(Errc::InvalidConfig, "geo pool is empty");
  if (cfg.mode == GenerationMode::GenAndCons && traces.generation.empty()) {
    throw Error(Errc::InvalidConfig, "GEN_AND_CONS needs at least one generation profile");
  }
  if (cfg.window_length > traces.shortest()) {
    throw Error(Errc::WindowTooLong, "window of " + std::to_string(cfg.window_length) + " readings exceeds the shortest trace (" +
                                         std::to_string(traces.shortest()) + ")");
  }
  std::vector<Microgrid> microgrids(cfg.n);
  std::vector<Milliwatts> energy(cfg.n * cfg.window_length);
  const auto work = [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      detail::synthesize_microgrid(traces, geo_pool, cfg, i, microgrids[i], energy.data() + i * cfg.window_length);
    }
  };
  const std::size_t threads = std::clamp<std::size_t>(cfg.threads, 1, cfg.n);
  if (threads == 1) {
    work(0, cfg.n);
  } else {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (cfg.n + threads - 1) / threads;
    for (std::size_t lo = 0; lo < cfg.n; lo += chunk) pool.emplace_back(work, lo, std::min(cfg.n, lo + chunk));
  }
  normalize_locations(microgrids);
  return Fleet(std::move(microgrids), std::move(energy), cfg.window_length);
}

inline Substations simulate_substations(const Fleet& fleet, std::size_t k_sub = 5, std::uint64_t seed = 1) {
  if (k_sub == 0) throw Error(Errc::InvalidK, "at least one substation is required");
  if (k_sub > fleet.size()) {
    throw Error(Errc::InvalidK, "cannot place " + std::to_string(k_sub) + " substations among " +
                                    std::to_string(fleet.size()) + " microgrids");
  }
  const auto pts = locations_of(fleet);
  KMeansConfig cfg;
  cfg.k = k_sub;
  cfg.seed = seed;
  return Substations{kmeans(pts, cfg).centroids};
}

/// Mean distance from each microgrid to its nearest substation.
inline double average_substation_distance(const Fleet& fleet, const Substations& subs) {
  double sum = 0.0;
  for (std::size_t i = 0; i < fleet.size(); ++i) sum += subs.nearest(fleet.location(i)).second;
  return sum / static_cast<double>(fleet.size());
}

struct SignCensus {
  std::size_t total = 0;
  std::size_t all_positive = 0;
  std::size_t all_negative = 0;
  std::size_t mixed = 0;

  std::string to_csv() const {
    std::ostringstream os;
    os << "key,value\ntotal," << total << "\nall_positive," << all_positive << "\nall_negative," << all_negative
       << "\nmixed," << mixed << "\nnot_all_positive," << (total - all_positive) << '\n';
    return os.str();
  }
};

inline SignCensus sign_census(const Fleet& fleet) {
  SignCensus c;
  c.total = fleet.size();
  for (std::size_t i = 0; i < fleet.size(); ++i) {
    switch (fleet.sign(i)) {
      case SignProfile::AllPositive: ++c.all_positive; break;
      case SignProfile::AllNegative: ++c.all_negative; break;
      case SignProfile::Mixed: ++c.mixed; break;
    }
  }
  return c;
}

}  // namespace gridcomm
