#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "gridcomm/core.hpp"
#include "gridcomm/flow.hpp"

namespace gridcomm {

/// Sum over communities of squared Euclidean member-to-centroid distances.
/// Always Euclidean, whatever metric the clustering used.
inline double spatial_sse(const Fleet& fleet, const CommunityAssignment& a) {
  double sse = 0.0;
  for (const auto& c : a.communities) {
    for (std::size_t i : c.members) sse += squared_distance(fleet.location(i), c.centroid);
  }
  return sse;
}

inline double sse_ratio(double sse, double benchmark_sse) {
  if (!(benchmark_sse > 0.0)) throw Error(Errc::DegenerateBenchmark, "benchmark SSE is zero");
  return sse / benchmark_sse;
}

inline double sse_ratio(const Fleet& fleet, const CommunityAssignment& a, const CommunityAssignment& benchmark) {
  return sse_ratio(spatial_sse(fleet, a), spatial_sse(fleet, benchmark));
}

inline bool is_nonnegative(const Community& c) {
  return std::all_of(c.aggregate.begin(), c.aggregate.end(), [](Milliwatts v) { return v >= 0; });
}

inline double nonnegative_ratio(const CommunityAssignment& a) {
  if (a.communities.empty()) return 0.0;
  std::size_t n = 0;
  for (const auto& c : a.communities) n += is_nonnegative(c) ? 1 : 0;
  return static_cast<double>(n) / static_cast<double>(a.communities.size());
}

struct Spread {
  double avg = 0.0;
  double max = 0.0;
  double min = 0.0;
};

template <class Range>
Spread spread_of(const Range& values) {
  Spread s;
  std::size_t n = 0;
  s.max = -std::numeric_limits<double>::infinity();
  s.min = std::numeric_limits<double>::infinity();
  for (double v : values) {
    s.avg += v;
    s.max = std::max(s.max, v);
    s.min = std::min(s.min, v);
    ++n;
  }
  if (n == 0) return {};
  s.avg /= static_cast<double>(n);
  return s;
}

/// Per-timestamp spread of E_j(t) across communities, in watts.
inline std::vector<Spread> net_energy_per_t(const CommunityAssignment& a, std::size_t window_length) {
  std::vector<Spread> out(window_length);
  std::vector<double> col(a.communities.size());
  for (std::size_t t = 0; t < window_length; ++t) {
    for (std::size_t j = 0; j < a.communities.size(); ++j) col[j] = to_watts(a.communities[j].aggregate[t]);
    out[t] = spread_of(col);
  }
  return out;
}

struct MetricsReport {
  std::string kind;
  std::size_t communities = 0;
  std::size_t assigned = 0;
  std::size_t unassigned = 0;
  std::size_t window_length = 0;
  double spatial_sse = 0.0;
  std::optional<double> sse_ratio;
  Spread size;
  Spread net_energy;       // over communities of mean_t E_j(t), watts
  Spread external_demand;  // over communities of max_t |E_j(t)|, watts
  double nonnegative_ratio = 0.0;
  std::size_t flagged = 0;
  double load_with = 0.0;
  double load_without = 0.0;
  double theta = 0.0;
  double theta_reference_distance = 0.1;
  bool theta_uniform = true;
  double runtime_seconds = 0.0;

  /// Flat key,value pairs in a fixed order.
  std::vector<std::pair<std::string, std::string>> fields() const {
    const auto num = [](double v) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.17g", v);
      return std::string(buf);
    };
    std::vector<std::pair<std::string, std::string>> f{
        {"kind", kind},
        {"communities", std::to_string(communities)},
        {"assigned", std::to_string(assigned)},
        {"unassigned", std::to_string(unassigned)},
        {"window_length", std::to_string(window_length)},
        {"spatial_sse", num(spatial_sse)},
        {"sse_ratio", sse_ratio ? num(*sse_ratio) : std::string("na")},
        {"size_avg", num(size.avg)},
        {"size_max", num(size.max)},
        {"size_min", num(size.min)},
        {"net_energy_avg_w", num(net_energy.avg)},
        {"net_energy_max_w", num(net_energy.max)},
        {"net_energy_min_w", num(net_energy.min)},
        {"external_demand_avg_w", num(external_demand.avg)},
        {"external_demand_max_w", num(external_demand.max)},
        {"external_demand_min_w", num(external_demand.min)},
        {"nonnegative_ratio", num(nonnegative_ratio)},
        {"flagged", std::to_string(flagged)},
        {"load_with", num(load_with)},
        {"load_without", num(load_without)},
        {"theta", num(theta)},
        {"theta_reference_distance", num(theta_reference_distance)},
        {"theta_uniform", theta_uniform ? "true" : "false"},
        {"runtime_seconds", num(runtime_seconds)},
    };
    return f;
  }

  std::string to_csv() const {
    std::ostringstream os;
    os << "key,value\n";
    for (const auto& [k, v] : fields()) os << k << ',' << v << '\n';
    return os.str();
  }

  std::string to_text() const {
    std::ostringstream os;
    os << "# loss: theta=" << theta << " per " << theta_reference_distance << " normalized distance"
       << (theta_uniform ? " (uniform delivery factor)" : " (per-pair delivery factor)") << "\n";
    os << "# spatial SSE uses squared Euclidean distance\n";
    for (const auto& [k, v] : fields()) os << "  " << k << ": " << v << '\n';
    return os.str();
  }
};

struct SummaryInputs {
  const Substations* substations = nullptr;  // loads are skipped without substations
  LossModel loss;
  const FlowPlan* flows = nullptr;  // computed from the assignment when absent
  std::optional<double> benchmark_sse;
  double runtime_seconds = 0.0;
};

inline MetricsReport summarize(const Fleet& fleet, const CommunityAssignment& a, const SummaryInputs& in) {
  MetricsReport r;
  r.kind = std::string(to_string(a.kind));
  r.communities = a.communities.size();
  r.assigned = a.assigned_count();
  r.unassigned = a.unassigned.size();
  r.window_length = fleet.window_length();
  r.spatial_sse = spatial_sse(fleet, a);
  if (in.benchmark_sse && *in.benchmark_sse > 0.0) r.sse_ratio = sse_ratio(r.spatial_sse, *in.benchmark_sse);

  std::vector<double> sizes, net, demand;
  for (const auto& c : a.communities) {
    sizes.push_back(static_cast<double>(c.size()));
    Milliwatts sum = 0, peak = 0;
    for (Milliwatts v : c.aggregate) {
      sum += v;
      peak = std::max(peak, std::abs(v));
    }
    net.push_back(to_watts(sum) / static_cast<double>(std::max<std::size_t>(1, c.aggregate.size())));
    demand.push_back(to_watts(peak));
    r.flagged += c.flagged ? 1 : 0;
  }
  r.size = spread_of(sizes);
  r.net_energy = spread_of(net);
  r.external_demand = spread_of(demand);
  r.nonnegative_ratio = nonnegative_ratio(a);
  r.theta = in.loss.theta;
  r.theta_reference_distance = in.loss.reference_distance;
  r.theta_uniform = in.loss.uniform;
  if (in.substations && !in.substations->sites.empty()) {
    r.load_without = load_without_communities(fleet, *in.substations, in.loss);
    if (in.flows) {
      r.load_with = in.flows->total_load();
      if (!a.unassigned.empty()) r.load_with += load_without_communities(fleet, *in.substations, in.loss, a.unassigned);
    } else {
      r.load_with = fleet_load(fleet, &a, *in.substations, in.loss).with_communities;
    }
  }
  r.runtime_seconds = in.runtime_seconds;
  return r;
}

}  // namespace gridcomm
