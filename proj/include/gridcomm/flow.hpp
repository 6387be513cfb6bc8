#pragma once

// Intra-community energy allocation: star flows through the centroid for
// homogeneous communities, min-cost transportation from surplus to deficit
// members for mixed/self-sufficient ones, grid top-ups for what a community
// cannot cover, and the transmission-load metric.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gridcomm/core.hpp"
#include "gridcomm/lp.hpp"

namespace gridcomm {

/// Linear transmission-loss model. `theta` is the loss fraction incurred
/// over `reference_distance` of normalized distance, so the per-unit-distance
/// coefficient is theta / reference_distance. Loads are shipped watts times
/// that coefficient times distance.
struct LossModel {
  double theta = 0.0001;
  double reference_distance = 0.1;
  /// When set, every pair loses the same fraction `theta` (the literal
  /// (1 - θ) delivery constraint); otherwise the fraction grows with distance.
  bool uniform = true;

  double per_unit() const { return theta / reference_distance; }
  double fraction(double distance) const { return uniform ? theta : per_unit() * distance; }
  double load(double watts, double distance) const { return watts * per_unit() * distance; }

  void validate(double max_distance = std::sqrt(2.0)) const {
    if (!(theta >= 0.0 && theta < 1.0)) throw Error(Errc::InvalidConfig, "loss rate theta must lie in [0, 1)");
    if (!(reference_distance > 0.0)) throw Error(Errc::InvalidConfig, "reference distance must be positive");
    if (fraction(max_distance) >= 1.0) {
      throw Error(Errc::InvalidConfig, "loss fraction reaches 1 within the fleet's distances");
    }
  }
};

enum class FlowObjective { MinTotalShipped, MinLoad };

struct Endpoint {
  enum class Kind { Microgrid, Centroid, Grid, Bank };
  Kind kind = Kind::Microgrid;
  std::size_t index = 0;  // fleet index for microgrids, substation index for the grid

  static Endpoint microgrid(std::size_t i) { return {Kind::Microgrid, i}; }
  static Endpoint centroid() { return {Kind::Centroid, 0}; }
  static Endpoint grid(std::size_t sub) { return {Kind::Grid, sub}; }
  static Endpoint bank() { return {Kind::Bank, 0}; }

  friend bool operator==(const Endpoint&, const Endpoint&) = default;
};

struct Shipment {
  Endpoint source;
  Endpoint sink;
  Milliwatts amount = 0;
  double distance = 0.0;
  double load = 0.0;  // watts * per-unit loss * distance
};

/// Allocation inside one community at one timestamp.
struct FlowSlice {
  std::size_t community = 0;
  std::size_t t = 0;  // offset within the window
  std::vector<Shipment> shipments;
  Milliwatts shipped = 0;     // total between members (or member and centroid)
  Milliwatts grid_topup = 0;  // energy the main grid supplies
  double load = 0.0;          // includes top-up legs
};

struct FlowPlan {
  std::vector<FlowSlice> slices;

  Milliwatts total_shipped() const {
    Milliwatts s = 0;
    for (const auto& sl : slices) s += sl.shipped;
    return s;
  }
  Milliwatts total_topup() const {
    Milliwatts s = 0;
    for (const auto& sl : slices) s += sl.grid_topup;
    return s;
  }
  double total_load() const {
    double s = 0.0;
    for (const auto& sl : slices) s += sl.load;
    return s;
  }
};

struct Substations {
  std::vector<Location> sites;

  /// Index and distance of the nearest site; ties go to the lower index.
  std::pair<std::size_t, double> nearest(const Location& p, DistanceMetric metric = DistanceMetric::Euclidean) const {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < sites.size(); ++s) {
      const double d = spatial_distance(p, sites[s], metric);
      if (d < best_d) {
        best_d = d;
        best = s;
      }
    }
    return {best, best_d};
  }
};

// ---------------------------------------------------------------------------
// Transportation subproblem

/// Suppliers ship to consumers; consumer s needs `demand[s]` delivered and
/// a unit shipped from i arrives as (1 - loss[i*nd+s]) units.
struct TransportProblem {
  std::vector<Milliwatts> supply;
  std::vector<Milliwatts> demand;
  std::vector<double> cost;  // per unit shipped, supplier-major
  std::vector<double> loss;  // delivered fraction lost, supplier-major

  std::size_t suppliers() const { return supply.size(); }
  std::size_t consumers() const { return demand.size(); }
};

struct TransportSolution {
  std::vector<Milliwatts> flow;       // supplier-major
  std::vector<Milliwatts> shortfall;  // per consumer, covered by the grid
  double cost = 0.0;                  // sum cost * flow

  Milliwatts shipped() const {
    Milliwatts s = 0;
    for (Milliwatts f : flow) s += f;
    return s;
  }
};

namespace detail {

inline bool uniform_loss(const TransportProblem& p) {
  return std::all_of(p.loss.begin(), p.loss.end(), [&](double l) { return l == p.loss.front(); });
}

/// Inflow a consumer needs so that (1 - loss) * inflow >= demand, in whole milliwatts.
inline Milliwatts gross_demand(Milliwatts demand, double loss) {
  if (loss <= 0.0) return demand;
  const double need = static_cast<double>(demand) / (1.0 - loss);
  Milliwatts g = static_cast<Milliwatts>(std::ceil(need - 1e-9));
  while (static_cast<double>(g) * (1.0 - loss) + 1e-6 < static_cast<double>(demand)) ++g;
  return g;
}

inline Milliwatts delivered(Milliwatts inflow, double loss) {
  return static_cast<Milliwatts>(std::floor(static_cast<double>(inflow) * (1.0 - loss) + 1e-6));
}

/// Successive shortest paths on the bipartite residual graph. Every unit of
/// flow value is added along a cheapest augmenting path, so the result has
/// minimum cost among flows of maximum value. Path ties resolve to the
/// lowest node index.
inline TransportSolution solve_transport_ssp(const TransportProblem& p) {
  const std::size_t ns = p.suppliers(), nd = p.consumers();
  const double loss = p.loss.empty() ? 0.0 : p.loss.front();
  std::vector<Milliwatts> sup_left = p.supply;
  std::vector<Milliwatts> dem_left(nd);
  for (std::size_t s = 0; s < nd; ++s) dem_left[s] = gross_demand(p.demand[s], loss);
  std::vector<Milliwatts> y(ns * nd, 0);
  constexpr double inf = std::numeric_limits<double>::infinity();
  const auto improves = [&](double cand, double cur) {
    return cur == inf ? cand < inf : cand < cur - 1e-12 * (1.0 + std::abs(cur));
  };

  std::vector<double> dsup(ns), dcon(nd);
  std::vector<std::size_t> pred_con(nd), pred_sup(ns);  // consumer <- supplier, supplier <- consumer
  for (;;) {
    std::fill(dsup.begin(), dsup.end(), inf);
    std::fill(dcon.begin(), dcon.end(), inf);
    std::fill(pred_sup.begin(), pred_sup.end(), nd);
    bool any_source = false;
    for (std::size_t i = 0; i < ns; ++i) {
      if (sup_left[i] > 0) {
        dsup[i] = 0.0;
        any_source = true;
      }
    }
    if (!any_source) break;
    for (std::size_t round = 0; round <= ns + nd; ++round) {
      bool changed = false;
      for (std::size_t i = 0; i < ns; ++i) {
        if (dsup[i] == inf) continue;
        for (std::size_t s = 0; s < nd; ++s) {
          const double c = dsup[i] + p.cost[i * nd + s];
          if (improves(c, dcon[s])) {
            dcon[s] = c;
            pred_con[s] = i;
            changed = true;
          }
        }
      }
      for (std::size_t s = 0; s < nd; ++s) {
        if (dcon[s] == inf) continue;
        for (std::size_t i = 0; i < ns; ++i) {
          if (y[i * nd + s] <= 0) continue;
          const double c = dcon[s] - p.cost[i * nd + s];
          if (improves(c, dsup[i])) {
            dsup[i] = c;
            pred_sup[i] = s;
            changed = true;
          }
        }
      }
      if (!changed) break;
    }
    std::size_t target = nd;
    for (std::size_t s = 0; s < nd; ++s) {
      if (dem_left[s] > 0 && dcon[s] < inf && (target == nd || improves(dcon[s], dcon[target]))) target = s;
    }
    if (target == nd) break;

    // Walk back to a supplier with spare supply, collecting the bottleneck.
    Milliwatts amount = dem_left[target];
    std::size_t s = target;
    std::size_t i = pred_con[s];
    for (;;) {
      if (pred_sup[i] == nd) {
        amount = std::min(amount, sup_left[i]);
        break;
      }
      const std::size_t back = pred_sup[i];
      amount = std::min(amount, y[i * nd + back]);
      s = back;
      i = pred_con[s];
    }
    s = target;
    i = pred_con[s];
    for (;;) {
      y[i * nd + s] += amount;
      if (pred_sup[i] == nd) {
        sup_left[i] -= amount;
        break;
      }
      const std::size_t back = pred_sup[i];
      y[i * nd + back] -= amount;
      s = back;
      i = pred_con[s];
    }
    dem_left[target] -= amount;
  }

  TransportSolution sol;
  sol.flow = std::move(y);
  sol.shortfall.assign(nd, 0);
  for (std::size_t s = 0; s < nd; ++s) {
    Milliwatts inflow = 0;
    for (std::size_t i = 0; i < ns; ++i) inflow += sol.flow[i * nd + s];
    sol.shortfall[s] = std::max<Milliwatts>(0, p.demand[s] - delivered(inflow, loss));
  }
  for (std::size_t k = 0; k < sol.flow.size(); ++k) sol.cost += p.cost[k] * static_cast<double>(sol.flow[k]);
  return sol;
}

}  // namespace detail

/// General route: one LP over shipments and per-consumer grid shortfalls,
/// with shortfalls priced high enough that internal supply is exhausted
/// first. Flows are floored to whole milliwatts and the grid covers the
/// rounding residue.
inline TransportSolution solve_transport_lp(const TransportProblem& p) {
  const std::size_t ns = p.suppliers(), nd = p.consumers();
  lp::Problem prob;
  prob.num_vars = ns * nd + nd;
  prob.objective.assign(prob.num_vars, 0.0);
  double max_cost = 0.0;
  for (double c : p.cost) max_cost = std::max(max_cost, std::abs(c));
  const double shortfall_price = 1e4 * (1.0 + max_cost);
  for (std::size_t k = 0; k < ns * nd; ++k) prob.objective[k] = p.cost[k];
  for (std::size_t s = 0; s < nd; ++s) prob.objective[ns * nd + s] = shortfall_price;
  for (std::size_t i = 0; i < ns; ++i) {
    lp::Row r;
    r.coeffs.assign(prob.num_vars, 0.0);
    for (std::size_t s = 0; s < nd; ++s) r.coeffs[i * nd + s] = 1.0;
    r.sense = lp::Sense::LessEqual;
    r.rhs = static_cast<double>(p.supply[i]);
    prob.rows.push_back(std::move(r));
  }
  for (std::size_t s = 0; s < nd; ++s) {
    lp::Row r;
    r.coeffs.assign(prob.num_vars, 0.0);
    for (std::size_t i = 0; i < ns; ++i) r.coeffs[i * nd + s] = 1.0 - p.loss[i * nd + s];
    r.coeffs[ns * nd + s] = 1.0;
    r.sense = lp::Sense::GreaterEqual;
    r.rhs = static_cast<double>(p.demand[s]);
    prob.rows.push_back(std::move(r));
  }
  const lp::Solution x = lp::solve(prob);
  TransportSolution sol;
  sol.flow.assign(ns * nd, 0);
  sol.shortfall.assign(nd, 0);
  if (x.status != lp::Status::Optimal) {
    sol.shortfall = p.demand;
    return sol;
  }
  for (std::size_t k = 0; k < ns * nd; ++k) {
    sol.flow[k] = static_cast<Milliwatts>(std::floor(x.x[k] + 1e-6));
  }
  for (std::size_t s = 0; s < nd; ++s) {
    double got = 0.0;
    for (std::size_t i = 0; i < ns; ++i) {
      got += static_cast<double>(sol.flow[i * nd + s]) * (1.0 - p.loss[i * nd + s]);
    }
    const Milliwatts got_mw = static_cast<Milliwatts>(std::floor(got + 1e-6));
    sol.shortfall[s] = std::max<Milliwatts>(0, p.demand[s] - got_mw);
  }
  for (std::size_t k = 0; k < sol.flow.size(); ++k) sol.cost += p.cost[k] * static_cast<double>(sol.flow[k]);
  return sol;
}

/// Exact optimum: successive shortest paths when every pair loses the same
/// fraction (a plain transportation problem), the LP route otherwise.
inline TransportSolution solve_transport(const TransportProblem& p) {
  if (p.suppliers() == 0 || p.consumers() == 0) {
    TransportSolution sol;
    sol.flow.assign(p.suppliers() * p.consumers(), 0);
    sol.shortfall = p.demand;
    return sol;
  }
  return detail::uniform_loss(p) ? detail::solve_transport_ssp(p) : solve_transport_lp(p);
}

// ---------------------------------------------------------------------------
// Community slices

/// Hub-and-spoke allocation for a homogeneous community: deficit members are
/// fed from the centroid, surplus members ship to an energy bank there.
inline FlowSlice star_flow(const Fleet& fleet, const Community& c, std::size_t t, const LossModel& loss) {
  FlowSlice slice;
  slice.community = c.id;
  slice.t = t;
  bool pos = false, neg = false;
  for (std::size_t i : c.members) {
    pos = pos || fleet.sign(i) == SignProfile::AllPositive;
    neg = neg || fleet.sign(i) == SignProfile::AllNegative;
    if (fleet.sign(i) == SignProfile::Mixed) pos = neg = true;
  }
  if (pos && neg) throw Error(Errc::NotHomogeneous, "star flow requires a homogeneous community");
  for (std::size_t i : c.members) {
    const Milliwatts e = fleet.series(i)[t];
    const double d = spatial_distance(c.centroid, fleet.location(i));
    Shipment s;
    s.amount = std::abs(e);
    s.distance = d;
    s.load = loss.load(to_watts(s.amount), d);
    if (e < 0) {
      s.source = Endpoint::centroid();
      s.sink = Endpoint::microgrid(i);
    } else {
      s.source = Endpoint::microgrid(i);
      s.sink = Endpoint::bank();
    }
    slice.shipped += s.amount;
    slice.load += s.load;
    slice.shipments.push_back(s);
  }
  return slice;
}

/// Min-cost allocation from surplus to deficit members at timestamp t, with
/// grid top-ups from each consumer's nearest substation for any residue.
inline FlowSlice transport_flow(const Fleet& fleet, const Community& c, std::size_t t, const LossModel& loss,
                                FlowObjective objective = FlowObjective::MinLoad,
                                const Substations* substations = nullptr) {
  FlowSlice slice;
  slice.community = c.id;
  slice.t = t;
  std::vector<std::size_t> sup, con;
  for (std::size_t i : c.members) {
    const Milliwatts e = fleet.series(i)[t];
    (e > 0 ? sup : con).push_back(i);
  }
  if (con.empty()) return slice;

  TransportProblem p;
  p.supply.reserve(sup.size());
  for (std::size_t i : sup) p.supply.push_back(fleet.series(i)[t]);
  for (std::size_t s : con) p.demand.push_back(-fleet.series(s)[t]);
  std::vector<double> dist(sup.size() * con.size());
  for (std::size_t a = 0; a < sup.size(); ++a) {
    for (std::size_t b = 0; b < con.size(); ++b) {
      const double d = spatial_distance(fleet.location(sup[a]), fleet.location(con[b]));
      dist[a * con.size() + b] = d;
      p.cost.push_back(objective == FlowObjective::MinLoad ? loss.per_unit() * d : 1.0);
      p.loss.push_back(loss.fraction(d));
    }
  }
  const TransportSolution sol = solve_transport(p);
  for (std::size_t a = 0; a < sup.size(); ++a) {
    for (std::size_t b = 0; b < con.size(); ++b) {
      const Milliwatts f = sol.flow[a * con.size() + b];
      if (f <= 0) continue;
      const double d = dist[a * con.size() + b];
      Shipment s{Endpoint::microgrid(sup[a]), Endpoint::microgrid(con[b]), f, d, loss.load(to_watts(f), d)};
      slice.shipped += f;
      slice.load += s.load;
      slice.shipments.push_back(s);
    }
  }
  for (std::size_t b = 0; b < con.size(); ++b) {
    const Milliwatts g = sol.shortfall[b];
    if (g <= 0) continue;
    std::size_t site = std::numeric_limits<std::size_t>::max();
    double d = 0.0;
    if (substations && !substations->sites.empty()) std::tie(site, d) = substations->nearest(fleet.location(con[b]));
    Shipment s{Endpoint::grid(site), Endpoint::microgrid(con[b]), g, d, loss.load(to_watts(g), d)};
    slice.grid_topup += g;
    slice.load += s.load;
    slice.shipments.push_back(s);
  }
  return slice;
}

/// Every slice of an assignment: star flows for HECs, transportation flows
/// for MECs and SECs.
inline FlowPlan plan_flows(const Fleet& fleet, const CommunityAssignment& a, const LossModel& loss,
                           const Substations* substations = nullptr,
                           FlowObjective objective = FlowObjective::MinLoad) {
  FlowPlan plan;
  for (const auto& c : a.communities) {
    for (std::size_t t = 0; t < fleet.window_length(); ++t) {
      plan.slices.push_back(a.kind == CommunityKind::HEC ? star_flow(fleet, c, t, loss)
                                                         : transport_flow(fleet, c, t, loss, objective, substations));
    }
  }
  return plan;
}

/// Load when every microgrid trades directly with its nearest substation.
inline double load_without_communities(const Fleet& fleet, const Substations& subs, const LossModel& loss,
                                       std::span<const std::size_t> only = {}) {
  if (subs.sites.empty()) throw Error(Errc::InvalidConfig, "at least one substation is required");
  double total = 0.0;
  const auto add = [&](std::size_t i) {
    const double d = subs.nearest(fleet.location(i)).second;
    Milliwatts amount = 0;
    for (Milliwatts e : fleet.series(i)) amount += std::abs(e);
    total += loss.load(to_watts(amount), d);
  };
  if (only.empty()) {
    for (std::size_t i = 0; i < fleet.size(); ++i) add(i);
  } else {
    for (std::size_t i : only) add(i);
  }
  return total;
}

struct FleetLoad {
  double with_communities = 0.0;
  double without_communities = 0.0;
};

/// Transmission load with and without the given communities. Unassigned
/// microgrids keep trading with their nearest substation in the "with" case.
inline FleetLoad fleet_load(const Fleet& fleet, const CommunityAssignment* a, const Substations& subs,
                            const LossModel& loss) {
  FleetLoad out;
  out.without_communities = load_without_communities(fleet, subs, loss);
  if (!a) {
    out.with_communities = out.without_communities;
    return out;
  }
  out.with_communities = plan_flows(fleet, *a, loss, &subs).total_load();
  if (!a->unassigned.empty()) out.with_communities += load_without_communities(fleet, subs, loss, a->unassigned);
  return out;
}

inline std::string endpoint_label(const Fleet& fleet, const Endpoint& e) {
  switch (e.kind) {
    case Endpoint::Kind::Microgrid: return "m" + std::to_string(fleet.id(e.index));
    case Endpoint::Kind::Centroid: return "centroid";
    case Endpoint::Kind::Bank: return "bank";
    case Endpoint::Kind::Grid:
      return e.index == std::numeric_limits<std::size_t>::max() ? std::string("grid") : "grid" + std::to_string(e.index);
  }
  return "?";
}

}  // namespace gridcomm
