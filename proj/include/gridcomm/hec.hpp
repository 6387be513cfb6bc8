#pragma once

// Homogeneous energy communities: spatial K-Means with a fixed community
// count, and a DBSCAN variant whose communities keep |E_j(t)| <= L.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "gridcomm/core.hpp"
#include "gridcomm/kmeans.hpp"

namespace gridcomm {

inline void require_homogeneous(const Fleet& fleet) {
  if (fleet.homogeneity() == SignProfile::Mixed) {
    throw Error(Errc::NotHomogeneous, "fleet is not exclusively positive or exclusively negative");
  }
}

inline CommunityAssignment discover_hec_kmeans(const Fleet& fleet, const KMeansConfig& cfg) {
  require_homogeneous(fleet);
  if (cfg.k < 1 || cfg.k > fleet.size()) {
    throw Error(Errc::InvalidK, "K=" + std::to_string(cfg.k) + " exceeds fleet size " + std::to_string(fleet.size()));
  }
  const auto pts = locations_of(fleet);
  const KMeansResult km = kmeans(pts, cfg);
  CommunityAssignment out = assignment_from_labels(fleet, CommunityKind::HEC, km.labels);
  std::ostringstream prov;
  prov << "algo=hec-kmeans k=" << cfg.k << " seed=" << cfg.seed << " restarts=" << cfg.restarts
       << " max_iters=" << cfg.max_iters;
  out.provenance = prov.str();
  return out;
}

enum class SupplyRole { ExternalSupply, BankCapacity };

struct SupplyRequirement {
  std::vector<Milliwatts> per_community;  // max over t of |E_j(t)|
  SupplyRole role = SupplyRole::ExternalSupply;
};

/// Capacity each community needs from an external source (negative
/// communities) or, for positive communities, the energy-bank capacity that
/// would absorb its surplus. Same formula either way.
inline SupplyRequirement required_supply(const CommunityAssignment& a) {
  SupplyRequirement r;
  bool any_negative = false;
  for (const auto& c : a.communities) {
    Milliwatts peak = 0;
    for (Milliwatts v : c.aggregate) {
      peak = std::max(peak, std::abs(v));
      any_negative = any_negative || v < 0;
    }
    r.per_community.push_back(peak);
  }
  r.role = (any_negative || a.communities.empty()) ? SupplyRole::ExternalSupply : SupplyRole::BankCapacity;
  return r;
}

struct LtDbscanConfig {
  double eps = 0.1;
  std::size_t min_neighbors = 10;
  Milliwatts bound = 0;  // L
  DistanceMetric metric = DistanceMetric::Euclidean;

  void validate() const {
    if (!(eps > 0.0 && eps <= 1.0)) throw Error(Errc::InvalidConfig, "eps must lie in (0, 1]");
    if (min_neighbors < 1) throw Error(Errc::InvalidConfig, "min must be at least 1");
    if (bound <= 0) throw Error(Errc::InvalidConfig, "net-energy bound L must be positive");
  }
};

namespace detail {

inline std::vector<std::size_t> neighbors_within(const Fleet& fleet, std::size_t i, double eps, DistanceMetric metric) {
  std::vector<std::size_t> out;
  const Location& p = fleet.location(i);
  for (std::size_t k = 0; k < fleet.size(); ++k) {
    if (k != i && spatial_distance(p, fleet.location(k), metric) <= eps) out.push_back(k);
  }
  return out;
}

/// True when max over t of |E(t)| + |e(t)| stays within the bound.
inline bool fits_bound(std::span<const Milliwatts> aggregate, std::span<const Milliwatts> e, Milliwatts bound) {
  for (std::size_t t = 0; t < aggregate.size(); ++t) {
    if (std::abs(aggregate[t]) + std::abs(e[t]) > bound) return false;
  }
  return true;
}

inline bool exceeds_bound(std::span<const Milliwatts> e, Milliwatts bound) {
  return std::any_of(e.begin(), e.end(), [&](Milliwatts v) { return std::abs(v) > bound; });
}

inline void add_series(std::vector<Milliwatts>& acc, std::span<const Milliwatts> e) {
  for (std::size_t t = 0; t < acc.size(); ++t) acc[t] += e[t];
}

}  // namespace detail

/// Density-based HEC discovery with a per-timestamp bound on each
/// community's aggregate net energy.
///
/// The scan visits microgrids in ascending id order. A microgrid that opens
/// a community absorbs unvisited ε-neighbors while max_t(|E_j(t)| + |e_k(t)|)
/// <= L; a core neighbor (at least `min` neighbors) extends the frontier. The
/// first rejected neighbor closes the community and the scan resumes at the
/// next unvisited microgrid. Singletons opened by a non-core microgrid are
/// outliers: each joins the nearest community that has a member within ε and
/// still satisfies the bound, and the rest are grouped greedily.
inline CommunityAssignment discover_hec_ldbscan(const Fleet& fleet, const LtDbscanConfig& cfg) {
  cfg.validate();
  require_homogeneous(fleet);
  const std::size_t n = fleet.size();

  struct Group {
    std::vector<std::size_t> members;
    std::vector<Milliwatts> aggregate;
    bool seed_is_core = false;
  };
  std::vector<Group> groups;
  std::vector<char> visited(n, 0);

  for (std::size_t i = 0; i < n; ++i) {
    if (visited[i]) continue;
    visited[i] = 1;
    std::vector<std::size_t> frontier = detail::neighbors_within(fleet, i, cfg.eps, cfg.metric);
    std::vector<char> in_frontier(n, 0);
    in_frontier[i] = 1;
    for (std::size_t k : frontier) in_frontier[k] = 1;

    Group g;
    g.members.push_back(i);
    g.aggregate.assign(fleet.series(i).begin(), fleet.series(i).end());
    g.seed_is_core = frontier.size() >= cfg.min_neighbors;

    for (std::size_t pos = 0; pos < frontier.size(); ++pos) {
      const std::size_t k = frontier[pos];
      if (visited[k]) continue;  // reachable from an earlier community
      const auto ek = fleet.series(k);
      if (!detail::fits_bound(g.aggregate, ek, cfg.bound)) break;  // community is full
      visited[k] = 1;
      g.members.push_back(k);
      detail::add_series(g.aggregate, ek);
      std::vector<std::size_t> more = detail::neighbors_within(fleet, k, cfg.eps, cfg.metric);
      if (more.size() >= cfg.min_neighbors) {
        for (std::size_t m : more) {
          if (!in_frontier[m]) {
            in_frontier[m] = 1;
            frontier.push_back(m);
          }
        }
      }
    }
    groups.push_back(std::move(g));
  }

  // Split off outliers; everything else is a community as scanned.
  std::vector<std::size_t> outliers;
  std::vector<Group> kept;
  for (auto& g : groups) {
    if (g.members.size() == 1 && !g.seed_is_core) {
      outliers.push_back(g.members.front());
    } else {
      kept.push_back(std::move(g));
    }
  }
  std::sort(outliers.begin(), outliers.end());

  std::vector<Location> centroids;
  for (const auto& g : kept) centroids.push_back(centroid_of(fleet, g.members));

  std::vector<std::size_t> leftover;
  for (std::size_t o : outliers) {
    const auto eo = fleet.series(o);
    const Location& po = fleet.location(o);
    std::size_t best = kept.size();
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < kept.size(); ++j) {
      const bool reachable = std::any_of(kept[j].members.begin(), kept[j].members.end(), [&](std::size_t m) {
        return spatial_distance(po, fleet.location(m), cfg.metric) <= cfg.eps;
      });
      if (!reachable || !detail::fits_bound(kept[j].aggregate, eo, cfg.bound)) continue;
      const double d = spatial_distance(po, centroids[j], cfg.metric);
      if (d < best_d) {
        best_d = d;
        best = j;
      }
    }
    if (best == kept.size()) {
      leftover.push_back(o);
      continue;
    }
    kept[best].members.push_back(o);
    detail::add_series(kept[best].aggregate, eo);
    centroids[best] = centroid_of(fleet, kept[best].members);
  }

  // Greedy grouping of the outliers nothing could absorb.
  std::vector<char> placed(leftover.size(), 0);
  for (std::size_t a = 0; a < leftover.size(); ++a) {
    if (placed[a]) continue;
    placed[a] = 1;
    Group g;
    g.members.push_back(leftover[a]);
    g.aggregate.assign(fleet.series(leftover[a]).begin(), fleet.series(leftover[a]).end());
    const Location& seed_loc = fleet.location(leftover[a]);
    for (std::size_t b = a + 1; b < leftover.size(); ++b) {
      if (placed[b]) continue;
      if (spatial_distance(seed_loc, fleet.location(leftover[b]), cfg.metric) > cfg.eps) continue;
      const auto eb = fleet.series(leftover[b]);
      if (!detail::fits_bound(g.aggregate, eb, cfg.bound)) continue;
      placed[b] = 1;
      g.members.push_back(leftover[b]);
      detail::add_series(g.aggregate, eb);
    }
    kept.push_back(std::move(g));
  }

  std::vector<std::vector<std::size_t>> member_lists;
  member_lists.reserve(kept.size());
  for (auto& g : kept) member_lists.push_back(std::move(g.members));
  CommunityAssignment out = make_assignment(fleet, CommunityKind::HEC, std::move(member_lists));
  for (auto& c : out.communities) {
    c.flagged = c.size() == 1 && detail::exceeds_bound(c.aggregate, cfg.bound);
  }
  std::ostringstream prov;
  prov << "algo=hec-ldbscan eps=" << cfg.eps << " min=" << cfg.min_neighbors << " bound_mw=" << cfg.bound
       << " metric=" << (cfg.metric == DistanceMetric::Euclidean ? "euclidean" : "manhattan");
  out.provenance = prov.str();
  return out;
}

}  // namespace gridcomm
