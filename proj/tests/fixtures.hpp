#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

#include "gridcomm/gridcomm.hpp"

namespace fixtures {

struct Spec {
  double x;
  double y;
  std::vector<double> watts;
};

/// Fleet with ids 1..n in the given order; readings given in watts.
inline gridcomm::Fleet fleet(const std::vector<Spec>& specs) {
  std::vector<gridcomm::Microgrid> mgs;
  std::vector<gridcomm::Milliwatts> energy;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    gridcomm::Microgrid m;
    m.id = i + 1;
    m.location = m.raw_location = {specs[i].x, specs[i].y};
    mgs.push_back(m);
    for (double w : specs[i].watts) energy.push_back(gridcomm::to_milliwatts(w));
  }
  return gridcomm::Fleet(std::move(mgs), std::move(energy), specs.front().watts.size());
}

/// Random fleet with nonzero readings. sign: +1 all positive, -1 all
/// negative, 0 mixed.
inline gridcomm::Fleet random_fleet(std::size_t n, std::size_t window, int sign, std::uint64_t seed,
                                    double lo = 1.0, double hi = 100.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> pos(0.0, 1.0), mag(lo, hi);
  std::vector<Spec> specs;
  for (std::size_t i = 0; i < n; ++i) {
    Spec s{pos(rng), pos(rng), {}};
    for (std::size_t t = 0; t < window; ++t) {
      double v = std::round(mag(rng));
      if (sign < 0 || (sign == 0 && (rng() & 1))) v = -v;
      s.watts.push_back(v);
    }
    specs.push_back(s);
  }
  return fleet(specs);
}

/// Small in-memory trace set: a daily-shaped consumption curve and a
/// solar-shaped generation curve per profile, 15-minute cadence.
inline gridcomm::TraceSet synthetic_traces(std::size_t profiles = 4, std::size_t days = 2) {
  gridcomm::TraceSet ts;
  const std::size_t len = 96 * days;
  const double pi = std::acos(-1.0);
  for (std::size_t p = 0; p < profiles; ++p) {
    gridcomm::TraceProfile c{"c" + std::to_string(p), gridcomm::TraceKind::Consumption, {}};
    gridcomm::TraceProfile g{"g" + std::to_string(p), gridcomm::TraceKind::Generation, {}};
    for (std::size_t t = 0; t < len; ++t) {
      const double hour = static_cast<double>(t % 96) / 4.0;
      c.watts.push_back(900.0 + 150.0 * static_cast<double>(p) + 400.0 * std::sin(2 * pi * (hour - 6.0) / 24.0));
      const double sun = std::sin(pi * (hour - 6.0) / 12.0);
      g.watts.push_back(sun > 0 ? (1200.0 + 500.0 * static_cast<double>(p)) * sun : 0.0);
    }
    ts.consumption.push_back(c);
    ts.generation.push_back(g);
  }
  return ts;
}

inline std::vector<gridcomm::Location> grid_pool(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> lon(-5.0, 1.5), lat(50.0, 55.0);
  std::vector<gridcomm::Location> pool;
  for (std::size_t i = 0; i < n; ++i) pool.push_back({lon(rng), lat(rng)});
  return pool;
}


/// Tiny mixed fleet whose total is nonnegative at every timestamp, so a
/// full SEC assignment exists (the single community).
inline gridcomm::Fleet tiny_sec_fleet(std::size_t n, std::size_t window, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> pos(0.0, 1.0);
  std::uniform_int_distribution<int> mag(1, 40);
  std::vector<Spec> specs(n);
  for (auto& s : specs) {
    s.x = pos(rng);
    s.y = pos(rng);
    for (std::size_t t = 0; t < window; ++t) s.watts.push_back((rng() % 5 < 2 ? 1.0 : -1.0) * mag(rng));
  }
  for (std::size_t t = 0; t < window; ++t) {
    double total = 0.0;
    for (const auto& s : specs) total += s.watts[t];
    if (total >= 0) continue;
    // Lift the largest reading so the column sums to a small surplus.
    std::size_t top = 0;
    for (std::size_t i = 1; i < n; ++i) {
      if (specs[i].watts[t] > specs[top].watts[t]) top = i;
    }
    double lifted = specs[top].watts[t] - total + mag(rng) % 5;
    if (lifted == 0.0) lifted = 1.0;
    specs[top].watts[t] = lifted;
  }
  return fleet(specs);
}

}  // namespace fixtures
