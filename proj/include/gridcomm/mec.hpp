#pragma once

// Mixed energy communities by two-threshold agglomeration: a microgrid (or,
// in later rounds, a whole community) joins a seed community when both the
// normalized NE distance to the seed's aggregate series and the spatial
// distance to the seed's centroid are within their thresholds.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "gridcomm/core.hpp"

namespace gridcomm {

struct MecConfig {
  double eps_ne = 0.15;  // ε, normalized NE-distance threshold
  double eps_sp = 0.05;  // ε′, normalized spatial-distance threshold
  DistanceMetric metric = DistanceMetric::Euclidean;
  std::uint64_t seed = 1;                 // only used when the NE divisor is sampled
  std::optional<NeNormalizer> normalizer;  // precomputed divisor; derived from the fleet when absent

  void validate() const {
    if (!(eps_ne >= 0.0 && eps_ne <= 1.0)) throw Error(Errc::InvalidConfig, "NE threshold must lie in [0, 1]");
    if (!(eps_sp >= 0.0 && eps_sp <= 1.0)) throw Error(Errc::InvalidConfig, "spatial threshold must lie in [0, 1]");
  }
};

/// One microgrid entering a community. In merge rounds every microgrid of
/// the absorbed community gets its own record carrying the community-level
/// distances.
struct AdmissionRecord {
  std::size_t community_id = 0;  // final community id
  std::size_t microgrid = 0;     // fleet index
  std::size_t round = 0;         // 0 = first pass over microgrids
  double ne_dist = 0.0;          // normalized
  double sp_dist = 0.0;
  Milliwatts ne_raw = 0;
  std::size_t seed_unit = 0;      // smallest fleet index of the absorbing community at that moment
  std::size_t absorbed_unit = 0;  // smallest fleet index of the absorbed unit
};

using AdmissionLog = std::vector<AdmissionRecord>;

struct MecResult {
  CommunityAssignment assignment;
  AdmissionLog log;
  NeNormalizer normalizer;
  std::size_t rounds = 0;  // rounds executed, including the final zero-merge round
  bool has_opposite_pair = true;
};

/// True when at some timestamp one microgrid is positive and another negative.
inline bool has_opposite_pair(const Fleet& fleet) {
  for (std::size_t t = 0; t < fleet.window_length(); ++t) {
    bool pos = false, neg = false;
    for (std::size_t i = 0; i < fleet.size() && !(pos && neg); ++i) {
      const Milliwatts v = fleet.series(i)[t];
      pos = pos || v > 0;
      neg = neg || v < 0;
    }
    if (pos && neg) return true;
  }
  return false;
}

namespace detail {

struct MecUnit {
  std::vector<std::size_t> members;
  std::vector<Milliwatts> aggregate;
  double sum_x = 0.0, sum_y = 0.0;

  std::size_t label() const { return members.front(); }
  Location centroid() const {
    const double n = static_cast<double>(members.size());
    return {sum_x / n, sum_y / n};
  }
  void absorb(const MecUnit& other) {
    members.insert(members.end(), other.members.begin(), other.members.end());
    for (std::size_t t = 0; t < aggregate.size(); ++t) aggregate[t] += other.aggregate[t];
    sum_x += other.sum_x;
    sum_y += other.sum_y;
  }
};

}  // namespace detail

inline MecResult discover_mec(const Fleet& fleet, const MecConfig& cfg) {
  cfg.validate();
  MecResult result;
  result.has_opposite_pair = has_opposite_pair(fleet);
  result.normalizer = cfg.normalizer ? *cfg.normalizer : NeNormalizer::for_fleet(fleet, cfg.seed);
  const NeNormalizer& norm = result.normalizer;

  std::vector<detail::MecUnit> units;
  units.reserve(fleet.size());
  for (std::size_t i = 0; i < fleet.size(); ++i) {
    detail::MecUnit u;
    u.members = {i};
    u.aggregate.assign(fleet.series(i).begin(), fleet.series(i).end());
    u.sum_x = fleet.location(i).x;
    u.sum_y = fleet.location(i).y;
    units.push_back(std::move(u));
  }

  for (std::size_t round = 0;; ++round) {
    ++result.rounds;
    std::size_t merges = 0;
    std::vector<char> grouped(units.size(), 0);
    std::vector<detail::MecUnit> next;
    for (std::size_t i = 0; i < units.size(); ++i) {
      if (grouped[i]) continue;
      grouped[i] = 1;
      detail::MecUnit seed = std::move(units[i]);
      Location mu = seed.centroid();
      for (std::size_t k = i + 1; k < units.size(); ++k) {
        if (grouped[k]) continue;
        const double sp = spatial_distance(mu, units[k].centroid(), cfg.metric);
        if (sp > cfg.eps_sp) continue;
        const Milliwatts raw = ne_distance(seed.aggregate, units[k].aggregate);
        const double ne = norm(raw);
        if (ne > cfg.eps_ne) continue;
        for (std::size_t m : units[k].members) {
          result.log.push_back({0, m, round, ne, sp, raw, seed.label(), units[k].label()});
        }
        seed.absorb(units[k]);
        mu = seed.centroid();
        grouped[k] = 1;
        ++merges;
      }
      next.push_back(std::move(seed));
    }
    units = std::move(next);
    if (merges == 0) break;
  }

  std::vector<std::vector<std::size_t>> groups;
  groups.reserve(units.size());
  for (auto& u : units) groups.push_back(std::move(u.members));
  result.assignment = make_assignment(fleet, CommunityKind::MEC, std::move(groups));
  const auto labels = result.assignment.labels(fleet.size());
  for (auto& rec : result.log) rec.community_id = labels[rec.microgrid];

  std::ostringstream prov;
  prov << "algo=mec eps_ne=" << cfg.eps_ne << " eps_sp=" << cfg.eps_sp << " ne_divisor_mw=" << norm.divisor()
       << (norm.sampled() ? " ne_divisor=sampled" : " ne_divisor=exact");
  result.assignment.provenance = prov.str();
  return result;
}

struct BalanceEntry {
  Milliwatts max_abs = 0;  // max_t |E_j(t)|
  double mean_abs = 0.0;   // mean_t |E_j(t)|, milliwatts
};

inline std::vector<BalanceEntry> balance_report(const CommunityAssignment& a) {
  std::vector<BalanceEntry> out;
  out.reserve(a.communities.size());
  for (const auto& c : a.communities) {
    BalanceEntry e;
    Milliwatts sum = 0;
    for (Milliwatts v : c.aggregate) {
      e.max_abs = std::max(e.max_abs, std::abs(v));
      sum += std::abs(v);
    }
    e.mean_abs = c.aggregate.empty() ? 0.0 : static_cast<double>(sum) / static_cast<double>(c.aggregate.size());
    out.push_back(e);
  }
  return out;
}

/// Members lying farther than `eps_sp` from their community centroid.
/// Merge rounds only test community centroids, so members can end up
/// outside the spatial threshold; this counts them.
inline std::size_t centroid_bound_violations(const Fleet& fleet, const CommunityAssignment& a, double eps_sp,
                                             DistanceMetric metric = DistanceMetric::Euclidean) {
  std::size_t n = 0;
  for (const auto& c : a.communities) {
    for (std::size_t i : c.members) n += spatial_distance(fleet.location(i), c.centroid, metric) > eps_sp ? 1 : 0;
  }
  return n;
}

}  // namespace gridcomm
