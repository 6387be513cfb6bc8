#pragma once

// Self-sufficient energy communities (aggregate net energy >= 0 at every
// timestamp). Two routes: a Tabu search over full assignments minimizing
// transmission load, and a two-phase heuristic that clusters the always-
// positive microgrids and then feeds each cluster its nearest deficit
// microgrids.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include "gridcomm/core.hpp"
#include "gridcomm/flow.hpp"
#include "gridcomm/kmeans.hpp"

namespace gridcomm {

struct SecCheck {
  bool feasible = true;
  bool all_assigned = true;
  std::optional<std::size_t> community;  // first violating community
  std::optional<std::size_t> t;          // and the first timestamp it goes negative
};

inline SecCheck sec_feasible(const CommunityAssignment& a) {
  SecCheck r;
  if (!a.unassigned.empty()) {
    r.feasible = false;
    r.all_assigned = false;
  }
  for (std::size_t j = 0; j < a.communities.size(); ++j) {
    const auto& agg = a.communities[j].aggregate;
    for (std::size_t t = 0; t < agg.size(); ++t) {
      if (agg[t] < 0) {
        r.feasible = false;
        r.community = j;
        r.t = t;
        return r;
      }
    }
  }
  return r;
}

/// Total transmission load of an assignment: for every community and
/// timestamp, the min-load transportation plan from surplus to deficit
/// members plus grid top-up legs for any shortfall.
inline double evaluate_load_objective(const Fleet& fleet, const CommunityAssignment& a, const LossModel& loss,
                                      const Substations* substations = nullptr) {
  double total = 0.0;
  for (const auto& c : a.communities) {
    for (std::size_t t = 0; t < fleet.window_length(); ++t) {
      total += transport_flow(fleet, c, t, loss, FlowObjective::MinLoad, substations).load;
    }
  }
  return total;
}

/// Communities whose aggregate is nonnegative yet still need grid energy
/// because losses eat into the surplus.
inline std::vector<std::size_t> loss_gap_communities(const Fleet& fleet, const CommunityAssignment& a,
                                                     const LossModel& loss) {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < a.communities.size(); ++j) {
    const auto& c = a.communities[j];
    if (std::any_of(c.aggregate.begin(), c.aggregate.end(), [](Milliwatts v) { return v < 0; })) continue;
    for (std::size_t t = 0; t < fleet.window_length(); ++t) {
      if (transport_flow(fleet, c, t, loss).grid_topup > 0) {
        out.push_back(j);
        break;
      }
    }
  }
  return out;
}

/// {from, from+step, ..., to}, always including `to`.
inline std::vector<std::size_t> k_range(std::size_t from, std::size_t to, std::size_t step = 1) {
  std::vector<std::size_t> out;
  if (step == 0) step = 1;
  for (std::size_t k = from; k <= to; k += step) out.push_back(k);
  if (!out.empty() && out.back() != to && to >= from) out.push_back(to);
  return out;
}

enum class Neighborhood { Auto, Paper, Full };

struct SecOptConfig {
  std::vector<std::size_t> k_values{1};
  std::size_t tabu_length = 10;
  LossModel loss;
  double time_budget_s = 300.0;
  std::uint64_t seed = 1;
  std::size_t max_stall_iters = 25;   // consecutive non-improving (plateau) moves per K
  std::size_t max_iters = 5000;       // accepted moves per K
  std::size_t kmeans_restarts = 4;
  Neighborhood neighborhood = Neighborhood::Auto;
  std::size_t full_neighborhood_limit = 64;  // Auto uses Full up to this fleet size
  std::size_t candidate_list = 16;           // exact evaluations per step on larger fleets (0 = all)

  void validate(std::size_t n) const {
    if (k_values.empty()) throw Error(Errc::InvalidConfig, "k range is empty");
    for (std::size_t k : k_values) {
      if (k < 1 || k > n) throw Error(Errc::InvalidK, "K=" + std::to_string(k) + " outside [1, " + std::to_string(n) + "]");
    }
    if (tabu_length < 1) throw Error(Errc::InvalidConfig, "tabu length must be at least 1");
    loss.validate();
  }
};

struct TraceEntry {
  std::size_t iteration = 0;
  std::size_t k = 0;
  double accepted_objective = 0.0;  // penalized
  double violation = 0.0;           // watts summed over communities and timestamps
  std::string move;
};

enum class SecStatus { Feasible, Infeasible, BudgetExhausted };

inline std::string_view to_string(SecStatus s) {
  switch (s) {
    case SecStatus::Feasible: return "feasible";
    case SecStatus::Infeasible: return "infeasible";
    case SecStatus::BudgetExhausted: return "budget_exhausted";
  }
  return "?";
}

struct SecSearchResult {
  SecStatus status = SecStatus::Infeasible;
  CommunityAssignment assignment;  // best feasible, or best infeasible when the budget ran out
  double objective = 0.0;          // load of `assignment`
  double violation = 0.0;          // watts; zero when feasible
  std::size_t best_k = 0;
  std::vector<TraceEntry> trace;
  std::string report;
};

namespace detail {

/// Sum over timestamps of max(0, -E(t)), in milliwatts.
inline Milliwatts deficit_of(std::span<const Milliwatts> agg) {
  Milliwatts v = 0;
  for (Milliwatts e : agg) v += e < 0 ? -e : 0;
  return v;
}

class TabuRun {
 public:
  TabuRun(const Fleet& fleet, const SecOptConfig& cfg, const Substations* subs, std::size_t k,
          std::chrono::steady_clock::time_point deadline)
      : fleet_(fleet), cfg_(cfg), subs_(subs), k_(k), deadline_(deadline) {
    const std::size_t n = fleet.size();
    full_ = cfg.neighborhood == Neighborhood::Full ||
            (cfg.neighborhood == Neighborhood::Auto && n <= cfg.full_neighborhood_limit);
    KMeansConfig km{k, 200, derive_seed(cfg.seed, k), cfg.kmeans_restarts};
    labels_ = kmeans(locations_of(fleet), km).labels;
    members_.assign(k, {});
    for (std::size_t i = 0; i < n; ++i) members_[labels_[i]].push_back(i);
    std::mt19937_64 zr(derive_seed(cfg.seed, 0xabcdef));
    zobrist_.resize(n * k);
    for (auto& z : zobrist_) z = zr();
    for (std::size_t i = 0; i < n; ++i) hash_ ^= zobrist_[i * k + labels_[i]];
    agg_.resize(k);
    cost_.resize(k);
    deficit_.resize(k);
    for (std::size_t j = 0; j < k; ++j) refresh(j);
    double load = 0.0;
    Milliwatts def = 0;
    for (std::size_t j = 0; j < k; ++j) {
      load += cost_[j];
      def += deficit_[j];
    }
    lambda_ = 1.0;
    if (def > 0) lambda_ = std::max(1.0, 10.0 * load / to_watts(def));
  }

  void run(std::vector<TraceEntry>& trace, std::size_t& iteration) {
    std::deque<std::uint64_t> tabu;
    tabu.push_back(hash_);
    double current = penalized();
    consider_best();
    trace.push_back({iteration++, k_, current, to_watts(total_deficit()), "init"});
    std::size_t stall = 0;
    for (std::size_t step = 0; step < cfg_.max_iters; ++step) {
      if (std::chrono::steady_clock::now() > deadline_) {
        timed_out_ = true;
        break;
      }
      const auto moves = screened(candidate_moves());
      Evaluated best;
      for (const auto& mv : moves) {
        const std::uint64_t h = hash_ ^ zobrist_[mv.i * k_ + mv.from] ^ zobrist_[mv.i * k_ + mv.to];
        if (std::find(tabu.begin(), tabu.end(), h) != tabu.end()) continue;
        Evaluated e = evaluate(mv, best.found ? best.value : std::numeric_limits<double>::infinity());
        if (!e.found) continue;
        e.hash = h;
        if (!best.found || e.value < best.value) best = std::move(e);
      }
      const double tol = 1e-12 * (1.0 + std::abs(current));
      if (!best.found || best.value > current + tol) break;
      if (best.value >= current - tol) {
        if (++stall > cfg_.max_stall_iters) break;
      } else {
        stall = 0;
      }
      apply(best);
      current = penalized();
      tabu.push_back(hash_);
      while (tabu.size() > cfg_.tabu_length) tabu.pop_front();
      consider_best();
      std::ostringstream desc;
      desc << "move m" << fleet_.id(best.move.i) << " " << best.move.from << "->" << best.move.to;
      trace.push_back({iteration++, k_, current, to_watts(total_deficit()), desc.str()});
    }
  }

  bool found_feasible() const { return have_feasible_; }
  double best_feasible_load() const { return best_feasible_load_; }
  const std::vector<std::size_t>& best_feasible_labels() const { return best_feasible_labels_; }
  Milliwatts best_infeasible_deficit() const { return best_infeasible_deficit_; }
  const std::vector<std::size_t>& best_infeasible_labels() const { return best_infeasible_labels_; }
  bool timed_out() const { return timed_out_; }

 private:
  struct Move {
    std::size_t i = 0, from = 0, to = 0;
  };
  struct Evaluated {
    bool found = false;
    Move move;
    double value = 0.0;
    std::uint64_t hash = 0;
    std::vector<Milliwatts> agg_from, agg_to;
    double cost_from = 0.0, cost_to = 0.0;
  };

  double community_cost(const std::vector<std::size_t>& members) const {
    if (members.empty()) return 0.0;
    Community c = make_community(fleet_, 0, members);
    double total = 0.0;
    for (std::size_t t = 0; t < fleet_.window_length(); ++t) {
      total += transport_flow(fleet_, c, t, cfg_.loss, FlowObjective::MinLoad, subs_).load;
    }
    return total;
  }

  void refresh(std::size_t j) {
    agg_[j] = aggregate_of(fleet_, members_[j]);
    cost_[j] = community_cost(members_[j]);
    deficit_[j] = deficit_of(agg_[j]);
  }

  Milliwatts total_deficit() const {
    Milliwatts d = 0;
    for (Milliwatts v : deficit_) d += v;
    return d;
  }
  double total_load() const {
    double s = 0.0;
    for (double c : cost_) s += c;
    return s;
  }
  double penalized() const { return total_load() + lambda_ * to_watts(total_deficit()); }

  Location centroid(std::size_t j) const { return centroid_of(fleet_, members_[j]); }

  /// The community holding the strictly largest E_j(t) at the most timestamps.
  std::size_t richest() const {
    std::vector<std::size_t> wins(k_, 0);
    for (std::size_t t = 0; t < fleet_.window_length(); ++t) {
      std::size_t best = k_;
      bool tie = false;
      for (std::size_t j = 0; j < k_; ++j) {
        if (best == k_ || agg_[j][t] > agg_[best][t]) {
          best = j;
          tie = false;
        } else if (agg_[j][t] == agg_[best][t]) {
          tie = true;
        }
      }
      if (!tie && best < k_ && agg_[best][t] > 0) ++wins[best];
    }
    std::size_t pick = 0;
    for (std::size_t j = 1; j < k_; ++j) {
      const Milliwatts sj = std::accumulate(agg_[j].begin(), agg_[j].end(), Milliwatts{0});
      const Milliwatts sp = std::accumulate(agg_[pick].begin(), agg_[pick].end(), Milliwatts{0});
      if (wins[j] > wins[pick] || (wins[j] == wins[pick] && sj > sp)) pick = j;
    }
    return pick;
  }

  /// Nearest community to microgrid i among those accepted by `want`,
  /// excluding its own; falls back to any other community.
  template <class Pred>
  std::size_t nearest_other(std::size_t i, const std::vector<Location>& mu, Pred want) const {
    std::size_t best = k_, any = k_;
    double best_d = std::numeric_limits<double>::infinity(), any_d = best_d;
    for (std::size_t j = 0; j < k_; ++j) {
      if (j == labels_[i]) continue;
      const double d = squared_distance(fleet_.location(i), mu[j]);
      if (d < any_d) {
        any_d = d;
        any = j;
      }
      if (want(j) && d < best_d) {
        best_d = d;
        best = j;
      }
    }
    return best < k_ ? best : any;
  }

  std::vector<Move> candidate_moves() const {
    std::vector<Move> out;
    if (k_ < 2) return out;
    std::vector<Location> mu(k_);
    for (std::size_t j = 0; j < k_; ++j) mu[j] = centroid(j);
    const auto is_sec = [&](std::size_t j) { return deficit_[j] == 0; };
    const auto is_not_sec = [&](std::size_t j) { return deficit_[j] > 0; };
    const auto sum_of = [&](std::size_t i) {
      const auto s = fleet_.series(i);
      return std::accumulate(s.begin(), s.end(), Milliwatts{0});
    };
    const auto push = [&](std::size_t i, std::size_t to) {
      const std::size_t from = labels_[i];
      if (to >= k_ || to == from || members_[from].size() < 2) return;
      for (const auto& m : out) {
        if (m.i == i && m.to == to) return;
      }
      out.push_back({i, from, to});
    };

    const std::size_t top = richest();
    for (std::size_t i : members_[top]) {
      if (sum_of(i) > 0) push(i, nearest_other(i, mu, is_not_sec));
    }
    for (std::size_t j = 0; j < k_; ++j) {
      if (deficit_[j] == 0) continue;
      for (std::size_t i : members_[j]) {
        if (sum_of(i) < 0) push(i, nearest_other(i, mu, is_sec));
      }
    }
    if (full_) {
      for (std::size_t i = 0; i < fleet_.size(); ++i) {
        for (std::size_t j = 0; j < k_; ++j) push(i, j);
      }
    }
    return out;
  }

  /// On larger fleets only the most promising moves get an exact flow
  /// evaluation. The screen uses the exact penalty after the move plus a
  /// load estimate that charges the mover's energy over its distance to
  /// each community centroid.
  std::vector<Move> screened(std::vector<Move> moves) const {
    if (full_ || cfg_.candidate_list == 0 || moves.size() <= cfg_.candidate_list) return moves;
    std::vector<Location> mu(k_);
    for (std::size_t j = 0; j < k_; ++j) mu[j] = centroid(j);
    std::vector<std::pair<double, std::size_t>> scored;
    scored.reserve(moves.size());
    for (std::size_t m = 0; m < moves.size(); ++m) {
      const Move& mv = moves[m];
      const auto s = fleet_.series(mv.i);
      Milliwatts def_from = 0, def_to = 0, volume = 0;
      for (std::size_t t = 0; t < s.size(); ++t) {
        const Milliwatts a = agg_[mv.from][t] - s[t], b = agg_[mv.to][t] + s[t];
        def_from += a < 0 ? -a : 0;
        def_to += b < 0 ? -b : 0;
        volume += std::abs(s[t]);
      }
      const Milliwatts def = total_deficit() - deficit_[mv.from] - deficit_[mv.to] + def_from + def_to;
      const Location& p = fleet_.location(mv.i);
      const double shift = cfg_.loss.load(to_watts(volume), spatial_distance(p, mu[mv.to])) -
                           cfg_.loss.load(to_watts(volume), spatial_distance(p, mu[mv.from]));
      scored.emplace_back(total_load() + shift + lambda_ * to_watts(def), m);
    }
    std::sort(scored.begin(), scored.end());
    std::vector<Move> out;
    out.reserve(cfg_.candidate_list);
    for (std::size_t r = 0; r < cfg_.candidate_list; ++r) out.push_back(moves[scored[r].second]);
    return out;
  }

  /// Penalized objective after the move, or not-found when a lower bound
  /// already exceeds `cutoff`.
  Evaluated evaluate(const Move& mv, double cutoff) const {
    Evaluated e;
    e.move = mv;
    e.agg_from = agg_[mv.from];
    e.agg_to = agg_[mv.to];
    const auto s = fleet_.series(mv.i);
    for (std::size_t t = 0; t < s.size(); ++t) {
      e.agg_from[t] -= s[t];
      e.agg_to[t] += s[t];
    }
    const Milliwatts def = total_deficit() - deficit_[mv.from] - deficit_[mv.to] + deficit_of(e.agg_from) +
                           deficit_of(e.agg_to);
    const double others = total_load() - cost_[mv.from] - cost_[mv.to];
    const double bound = others + lambda_ * to_watts(def);
    if (bound > cutoff) return e;
    std::vector<std::size_t> from = members_[mv.from], to = members_[mv.to];
    std::erase(from, mv.i);
    to.push_back(mv.i);
    e.cost_from = community_cost(from);
    e.cost_to = community_cost(to);
    e.value = others + e.cost_from + e.cost_to + lambda_ * to_watts(def);
    e.found = true;
    return e;
  }

  void apply(const Evaluated& e) {
    const Move& mv = e.move;
    std::erase(members_[mv.from], mv.i);
    auto& to = members_[mv.to];
    to.insert(std::upper_bound(to.begin(), to.end(), mv.i), mv.i);
    labels_[mv.i] = mv.to;
    hash_ = e.hash;
    agg_[mv.from] = e.agg_from;
    agg_[mv.to] = e.agg_to;
    cost_[mv.from] = e.cost_from;
    cost_[mv.to] = e.cost_to;
    deficit_[mv.from] = deficit_of(agg_[mv.from]);
    deficit_[mv.to] = deficit_of(agg_[mv.to]);
  }

  void consider_best() {
    const Milliwatts def = total_deficit();
    if (def == 0) {
      const double load = total_load();
      if (!have_feasible_ || load < best_feasible_load_) {
        have_feasible_ = true;
        best_feasible_load_ = load;
        best_feasible_labels_ = labels_;
      }
    } else if (best_infeasible_labels_.empty() || def < best_infeasible_deficit_) {
      best_infeasible_deficit_ = def;
      best_infeasible_labels_ = labels_;
    }
  }

  const Fleet& fleet_;
  const SecOptConfig& cfg_;
  const Substations* subs_;
  std::size_t k_;
  std::chrono::steady_clock::time_point deadline_;
  bool full_ = false;
  std::vector<std::size_t> labels_;
  std::vector<std::vector<std::size_t>> members_;
  std::vector<std::vector<Milliwatts>> agg_;
  std::vector<double> cost_;
  std::vector<Milliwatts> deficit_;
  std::vector<std::uint64_t> zobrist_;
  std::uint64_t hash_ = 0;
  double lambda_ = 1.0;
  bool have_feasible_ = false;
  double best_feasible_load_ = 0.0;
  std::vector<std::size_t> best_feasible_labels_;
  Milliwatts best_infeasible_deficit_ = 0;
  std::vector<std::size_t> best_infeasible_labels_;
  bool timed_out_ = false;
};

}  // namespace detail

/// Tabu search over full assignments for every K in the configured range.
///
/// Each K starts from a spatial K-Means partition. Candidate moves relocate
/// a microgrid to another community: the surplus members of the community
/// that is richest at most timestamps go to their nearest non-SEC community,
/// and deficit members of violating communities go to their nearest SEC.
/// Small fleets additionally try every microgrid in every other community.
/// Infeasible states are allowed under a penalty on total deficit; the best
/// non-tabu candidate is accepted while it does not worsen the objective.
/// The result is the feasible assignment with the least load across all K.
inline SecSearchResult discover_sec_tabu(const Fleet& fleet, const SecOptConfig& cfg,
                                         const Substations* substations = nullptr) {
  cfg.validate(fleet.size());
  SecSearchResult result;
  const auto total = fleet.total();
  for (std::size_t t = 0; t < total.size(); ++t) {
    if (total[t] < 0) {
      result.status = SecStatus::Infeasible;
      result.report = "fleet aggregate is negative at t=" + std::to_string(t) + " (" +
                      std::to_string(total[t]) + " mW); no full SEC assignment exists";
      return result;
    }
  }
  const auto deadline = std::chrono::steady_clock::now() +
                        std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                            std::chrono::duration<double>(cfg.time_budget_s));

  bool have_feasible = false, have_any = false, timed_out = false;
  double best_load = 0.0;
  Milliwatts best_def = 0;
  std::vector<std::size_t> best_labels, best_bad_labels;
  std::size_t best_k = 0, best_bad_k = 0;
  std::size_t iteration = 0;
  for (std::size_t k : cfg.k_values) {
    if (std::chrono::steady_clock::now() > deadline) {
      timed_out = true;
      break;
    }
    detail::TabuRun run(fleet, cfg, substations, k, deadline);
    run.run(result.trace, iteration);
    timed_out = timed_out || run.timed_out();
    if (run.found_feasible() && (!have_feasible || run.best_feasible_load() < best_load)) {
      have_feasible = true;
      best_load = run.best_feasible_load();
      best_labels = run.best_feasible_labels();
      best_k = k;
    }
    if (!run.found_feasible() && (!have_any || run.best_infeasible_deficit() < best_def)) {
      have_any = true;
      best_def = run.best_infeasible_deficit();
      best_bad_labels = run.best_infeasible_labels();
      best_bad_k = k;
    }
  }

  std::ostringstream prov;
  prov << "algo=sec-tabu tabu_len=" << cfg.tabu_length << " theta=" << cfg.loss.theta << " per "
       << cfg.loss.reference_distance << (cfg.loss.uniform ? " uniform" : " per_pair") << " seed=" << cfg.seed
       << " k=";
  for (std::size_t a = 0; a < cfg.k_values.size(); ++a) prov << (a ? "," : "") << cfg.k_values[a];

  if (have_feasible) {
    result.status = SecStatus::Feasible;
    result.assignment = assignment_from_labels(fleet, CommunityKind::SEC, best_labels);
    result.objective = best_load;
    result.best_k = best_k;
    result.report = "best K=" + std::to_string(best_k);
  } else {
    result.status = SecStatus::BudgetExhausted;
    if (!best_bad_labels.empty()) {
      result.assignment = assignment_from_labels(fleet, CommunityKind::SEC, best_bad_labels);
      result.objective = evaluate_load_objective(fleet, result.assignment, cfg.loss, substations);
      result.violation = to_watts(best_def);
      result.best_k = best_bad_k;
    }
    std::ostringstream rep;
    rep << "no feasible assignment found" << (timed_out ? " before the time budget ran out" : "")
        << "; best infeasible K=" << best_bad_k << " with total deficit " << to_watts(best_def) << " W";
    for (const auto& c : result.assignment.communities) {
      const Milliwatts d = detail::deficit_of(c.aggregate);
      if (d > 0) rep << "; community " << c.id << " deficit " << to_watts(d) << " W";
    }
    result.report = rep.str();
  }
  result.assignment.provenance = prov.str();
  return result;
}

// ---------------------------------------------------------------------------
// Two-phase discovery

struct TwoPhaseConfig {
  std::vector<std::size_t> k_values;  // empty: derived from |M+|
  Milliwatts margin = 0;              // δ: every admitted aggregate stays >= δ
  std::uint64_t seed = 1;
  std::size_t restarts = 8;

  void validate() const {
    if (margin < 0) throw Error(Errc::InvalidConfig, "margin must be nonnegative");
  }
};

/// {max(1, ceil(n/200)), ..., ceil(n/50)} with about ten steps.
inline std::vector<std::size_t> default_two_phase_k_values(std::size_t positives) {
  const auto ceil_div = [](std::size_t a, std::size_t b) { return (a + b - 1) / b; };
  const std::size_t lo = std::max<std::size_t>(1, ceil_div(positives, 200));
  const std::size_t hi = std::max(lo, ceil_div(positives, 50));
  return k_range(lo, hi, std::max<std::size_t>(1, ceil_div(hi - lo, 10)));
}

struct TwoPhaseResult {
  CommunityAssignment assignment;
  std::size_t chosen_k = 0;
  std::vector<std::pair<std::size_t, double>> phase1_sse;  // (K, SSE) per tried K
};

inline TwoPhaseResult discover_sec_twophase(const Fleet& fleet, const TwoPhaseConfig& cfg) {
  cfg.validate();
  std::vector<std::size_t> positives, negatives;
  for (std::size_t i = 0; i < fleet.size(); ++i) {
    (fleet.sign(i) == SignProfile::AllPositive ? positives : negatives).push_back(i);
  }
  if (positives.empty()) throw Error(Errc::NoPositiveMicrogrids, "no microgrid is positive at every timestamp");

  std::vector<std::size_t> ks = cfg.k_values.empty() ? default_two_phase_k_values(positives.size()) : cfg.k_values;
  std::erase_if(ks, [&](std::size_t k) { return k < 1 || k > positives.size(); });
  if (ks.empty()) throw Error(Errc::InvalidK, "no K in range fits the " + std::to_string(positives.size()) + " positive microgrids");

  TwoPhaseResult out;
  const auto pts = locations_of(fleet, positives);
  KMeansResult best;
  for (std::size_t k : ks) {
    KMeansResult r = kmeans(pts, {k, 200, derive_seed(cfg.seed, k), cfg.restarts});
    out.phase1_sse.emplace_back(k, r.sse);
    if (out.chosen_k == 0 || r.sse < best.sse) {
      best = std::move(r);
      out.chosen_k = k;
    }
  }

  std::vector<std::vector<std::size_t>> groups(out.chosen_k);
  for (std::size_t a = 0; a < positives.size(); ++a) groups[best.labels[a]].push_back(positives[a]);
  std::sort(groups.begin(), groups.end(), [](const auto& x, const auto& y) { return x.front() < y.front(); });

  std::vector<char> taken(fleet.size(), 0);
  for (auto& g : groups) {
    std::vector<Milliwatts> agg = aggregate_of(fleet, g);
    double sx = 0.0, sy = 0.0;
    for (std::size_t i : g) {
      sx += fleet.location(i).x;
      sy += fleet.location(i).y;
    }
    for (;;) {
      const Location mu{sx / static_cast<double>(g.size()), sy / static_cast<double>(g.size())};
      std::size_t pick = fleet.size();
      double pick_d = std::numeric_limits<double>::infinity();
      for (std::size_t i : negatives) {
        if (taken[i]) continue;
        const double d = squared_distance(mu, fleet.location(i));
        if (d < pick_d) {
          pick_d = d;
          pick = i;
        }
      }
      if (pick == fleet.size()) break;
      const auto e = fleet.series(pick);
      bool ok = true;
      for (std::size_t t = 0; t < agg.size() && ok; ++t) ok = agg[t] + e[t] >= cfg.margin;
      if (!ok) break;
      for (std::size_t t = 0; t < agg.size(); ++t) agg[t] += e[t];
      taken[pick] = 1;
      g.push_back(pick);
      sx += fleet.location(pick).x;
      sy += fleet.location(pick).y;
    }
  }
  out.assignment = make_assignment(fleet, CommunityKind::SEC, std::move(groups));
  std::ostringstream prov;
  prov << "algo=sec-twophase margin_mw=" << cfg.margin << " seed=" << cfg.seed << " k=";
  for (std::size_t a = 0; a < ks.size(); ++a) prov << (a ? "," : "") << ks[a];
  prov << " chosen_k=" << out.chosen_k;
  out.assignment.provenance = prov.str();
  return out;
}

}  // namespace gridcomm
