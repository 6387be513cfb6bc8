#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <vector>

#include "gridcomm/core.hpp"

namespace gridcomm {

struct KMeansConfig {
  std::size_t k = 1;
  std::size_t max_iters = 200;
  std::uint64_t seed = 1;
  std::size_t restarts = 8;
};

struct KMeansResult {
  std::vector<std::size_t> labels;
  std::vector<Location> centroids;
  double sse = 0.0;
  std::vector<double> sse_trace;  // SSE after each assignment step of the winning restart
  std::size_t iterations = 0;
};

namespace detail {

inline double kmeans_sse(std::span<const Location> pts, std::span<const std::size_t> labels,
                         std::span<const Location> centroids) {
  double sse = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) sse += squared_distance(pts[i], centroids[labels[i]]);
  return sse;
}

/// Nearest centroid; ties go to the lowest centroid index.
inline std::size_t nearest_centroid(const Location& p, std::span<const Location> centroids) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < centroids.size(); ++c) {
    const double d = squared_distance(p, centroids[c]);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return best;
}

/// D^2-weighted seeding. When every remaining point coincides with a chosen
/// center, the lowest-index point not yet chosen is taken.
inline std::vector<Location> seed_centroids(std::span<const Location> pts, std::size_t k, std::mt19937_64& rng) {
  std::vector<Location> centers;
  std::vector<char> chosen(pts.size(), 0);
  std::uniform_int_distribution<std::size_t> first(0, pts.size() - 1);
  const std::size_t f = first(rng);
  centers.push_back(pts[f]);
  chosen[f] = 1;
  std::vector<double> d2(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) d2[i] = squared_distance(pts[i], centers[0]);
  while (centers.size() < k) {
    double total = 0.0;
    for (double v : d2) total += v;
    std::size_t next = pts.size();
    if (total > 0.0) {
      std::uniform_real_distribution<double> u(0.0, total);
      double r = u(rng);
      for (std::size_t i = 0; i < pts.size(); ++i) {
        if (d2[i] <= 0.0) continue;
        r -= d2[i];
        if (r <= 0.0) {
          next = i;
          break;
        }
      }
      if (next == pts.size()) {
        for (std::size_t i = pts.size(); i-- > 0;) {
          if (d2[i] > 0.0) {
            next = i;
            break;
          }
        }
      }
    } else {
      for (std::size_t i = 0; i < pts.size(); ++i) {
        if (!chosen[i]) {
          next = i;
          break;
        }
      }
    }
    chosen[next] = 1;
    centers.push_back(pts[next]);
    for (std::size_t i = 0; i < pts.size(); ++i) d2[i] = std::min(d2[i], squared_distance(pts[i], centers.back()));
  }
  return centers;
}

inline void recompute_centroids(std::span<const Location> pts, std::span<const std::size_t> labels,
                                std::vector<Location>& centroids, std::vector<std::size_t>& counts) {
  std::vector<Location> sums(centroids.size());
  counts.assign(centroids.size(), 0);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    sums[labels[i]].x += pts[i].x;
    sums[labels[i]].y += pts[i].y;
    ++counts[labels[i]];
  }
  for (std::size_t c = 0; c < centroids.size(); ++c) {
    if (counts[c] == 0) continue;
    centroids[c] = {sums[c].x / static_cast<double>(counts[c]), sums[c].y / static_cast<double>(counts[c])};
  }
}

/// Gives every empty cluster the point farthest from its own centroid,
/// taken from a cluster that still has more than one member.
inline bool repair_empty(std::span<const Location> pts, std::vector<std::size_t>& labels,
                         std::vector<Location>& centroids, std::vector<std::size_t>& counts) {
  bool changed = false;
  for (std::size_t c = 0; c < centroids.size(); ++c) {
    if (counts[c] != 0) continue;
    std::size_t far = pts.size();
    double far_d = -1.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (counts[labels[i]] < 2) continue;
      const double d = squared_distance(pts[i], centroids[labels[i]]);
      if (d > far_d) {
        far_d = d;
        far = i;
      }
    }
    if (far == pts.size()) break;
    --counts[labels[far]];
    labels[far] = c;
    counts[c] = 1;
    centroids[c] = pts[far];
    changed = true;
  }
  return changed;
}

inline KMeansResult kmeans_single(std::span<const Location> pts, const KMeansConfig& cfg, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  KMeansResult r;
  r.centroids = seed_centroids(pts, cfg.k, rng);
  r.labels.assign(pts.size(), 0);
  std::vector<std::size_t> counts;
  for (r.iterations = 0; r.iterations < cfg.max_iters; ++r.iterations) {
    bool changed = false;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const std::size_t c = nearest_centroid(pts[i], r.centroids);
      if (c != r.labels[i]) {
        r.labels[i] = c;
        changed = true;
      }
    }
    r.sse_trace.push_back(kmeans_sse(pts, r.labels, r.centroids));
    recompute_centroids(pts, r.labels, r.centroids, counts);
    const bool repaired = repair_empty(pts, r.labels, r.centroids, counts);
    if (repaired) recompute_centroids(pts, r.labels, r.centroids, counts);
    if (r.iterations > 0 && !changed && !repaired) break;
  }
  // Coincident points can leave a cluster empty after the final assignment;
  // hand it one point so exactly k nonempty clusters come back.
  recompute_centroids(pts, r.labels, r.centroids, counts);
  if (repair_empty(pts, r.labels, r.centroids, counts)) recompute_centroids(pts, r.labels, r.centroids, counts);
  r.sse = kmeans_sse(pts, r.labels, r.centroids);
  return r;
}

}  // namespace detail

/// Lloyd's algorithm with seeded D^2 initialization, keeping the lowest-SSE
/// result over `restarts` runs. Deterministic for a given seed.
inline KMeansResult kmeans(std::span<const Location> points, const KMeansConfig& cfg) {
  if (points.empty()) throw Error(Errc::EmptyFleet, "k-means on zero points");
  if (cfg.k < 1 || cfg.k > points.size()) {
    throw Error(Errc::InvalidK, "k=" + std::to_string(cfg.k) + " must lie in [1, " + std::to_string(points.size()) + "]");
  }
  KMeansResult best;
  bool have = false;
  const std::size_t runs = std::max<std::size_t>(1, cfg.restarts);
  for (std::size_t r = 0; r < runs; ++r) {
    KMeansResult cur = detail::kmeans_single(points, cfg, derive_seed(cfg.seed, r));
    if (!have || cur.sse < best.sse) {
      best = std::move(cur);
      have = true;
    }
  }
  return best;
}

inline std::vector<Location> locations_of(const Fleet& fleet, std::span<const std::size_t> indices) {
  std::vector<Location> out;
  out.reserve(indices.size());
  for (std::size_t i : indices) out.push_back(fleet.location(i));
  return out;
}

inline std::vector<Location> locations_of(const Fleet& fleet) {
  std::vector<Location> out;
  out.reserve(fleet.size());
  for (const auto& m : fleet.microgrids()) out.push_back(m.location);
  return out;
}

}  // namespace gridcomm
