#pragma once

// Domain model shared by every discovery algorithm: microgrids, the fleet
// (locations + fixed-point net-energy matrix), communities and assignments,
// and the two distance measures (spatial and net-energy).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "gridcomm/error.hpp"

namespace gridcomm {

using MicrogridId = std::uint64_t;

/// Net energy in integer milliwatts. Aggregation in this unit is exact and
/// order-independent.
using Milliwatts = std::int64_t;

inline Milliwatts to_milliwatts(double watts) { return static_cast<Milliwatts>(std::llround(watts * 1000.0)); }
constexpr double to_watts(Milliwatts mw) { return static_cast<double>(mw) / 1000.0; }

struct Location {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Location&, const Location&) = default;
};

enum class CoordUnits { Normalized, Degrees, Meters };

struct Microgrid {
  MicrogridId id = 0;
  Location location;      // normalized to [0,1]^2
  Location raw_location;  // as ingested
  CoordUnits raw_units = CoordUnits::Normalized;
};

enum class SignProfile { AllPositive, AllNegative, Mixed };

enum class DistanceMetric { Euclidean, Manhattan };

inline double spatial_distance(const Location& a, const Location& b,
                               DistanceMetric metric = DistanceMetric::Euclidean) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  if (metric == DistanceMetric::Manhattan) return std::abs(dx) + std::abs(dy);
  return std::hypot(dx, dy);
}

inline double squared_distance(const Location& a, const Location& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

/// Net-energy distance: sum over the window of |a(t) + b(t)|.
///
/// This is not a metric. NE(a, a) = 2 * sum |a(t)| is generally nonzero, and
/// the triangle inequality fails (a=[1], b=[-1], c=[1] gives NE(a,c)=2 while
/// NE(a,b)+NE(b,c)=0). Complementary series are "close".
inline Milliwatts ne_distance(std::span<const Milliwatts> a, std::span<const Milliwatts> b) {
  if (a.size() != b.size()) {
    throw Error(Errc::WindowMismatch, "series lengths " + std::to_string(a.size()) + " and " +
                                          std::to_string(b.size()) + " differ");
  }
  Milliwatts total = 0;
  for (std::size_t t = 0; t < a.size(); ++t) total += std::abs(a[t] + b[t]);
  return total;
}

inline SignProfile sign_profile_of(std::span<const Milliwatts> values) {
  const bool all_pos = std::all_of(values.begin(), values.end(), [](Milliwatts v) { return v > 0; });
  if (all_pos) return SignProfile::AllPositive;
  const bool all_neg = std::all_of(values.begin(), values.end(), [](Milliwatts v) { return v < 0; });
  return all_neg ? SignProfile::AllNegative : SignProfile::Mixed;
}

inline std::string_view to_string(SignProfile p) {
  switch (p) {
    case SignProfile::AllPositive: return "all_positive";
    case SignProfile::AllNegative: return "all_negative";
    case SignProfile::Mixed: return "mixed";
  }
  return "?";
}

/// Immutable set of microgrids sharing one time window [t_begin, t_begin + window_length).
///
/// Microgrids are stored sorted by id; "index" everywhere in the library
/// refers to this sorted position, so ascending index is ascending id.
class Fleet {
 public:
  Fleet() = default;

  /// `energy` is row-major, one row of `window_length` readings per entry of
  /// `microgrids` in the order given.
  Fleet(std::vector<Microgrid> microgrids, std::vector<Milliwatts> energy, std::size_t window_length,
        std::int64_t t_begin = 0)
      : window_length_(window_length), t_begin_(t_begin) {
    if (microgrids.empty()) throw Error(Errc::EmptyFleet, "fleet has no microgrids");
    if (window_length == 0) throw Error(Errc::WindowMismatch, "window length must be at least 1");
    if (energy.size() != microgrids.size() * window_length) {
      throw Error(Errc::WindowMismatch, "energy matrix has " + std::to_string(energy.size()) +
                                            " readings, expected " +
                                            std::to_string(microgrids.size() * window_length));
    }
    std::vector<std::size_t> order(microgrids.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return microgrids[a].id < microgrids[b].id; });
    microgrids_.reserve(microgrids.size());
    energy_.reserve(energy.size());
    for (std::size_t k = 0; k < order.size(); ++k) {
      const std::size_t src = order[k];
      if (k > 0 && microgrids[src].id == microgrids_.back().id) {
        throw Error(Errc::DuplicateId, "microgrid id " + std::to_string(microgrids[src].id) + " appears twice");
      }
      microgrids_.push_back(microgrids[src]);
      const auto row = energy.begin() + static_cast<std::ptrdiff_t>(src * window_length);
      for (std::size_t t = 0; t < window_length; ++t) {
        if (row[static_cast<std::ptrdiff_t>(t)] == 0) {
          throw Error(Errc::ZeroReading, "microgrid " + std::to_string(microgrids[src].id) +
                                             " has a zero net-energy reading at t=" + std::to_string(t));
        }
      }
      energy_.insert(energy_.end(), row, row + static_cast<std::ptrdiff_t>(window_length));
    }
    signs_.reserve(microgrids_.size());
    for (std::size_t i = 0; i < microgrids_.size(); ++i) signs_.push_back(sign_profile_of(series(i)));
  }

  std::size_t size() const noexcept { return microgrids_.size(); }
  bool empty() const noexcept { return microgrids_.empty(); }
  std::size_t window_length() const noexcept { return window_length_; }
  std::int64_t t_begin() const noexcept { return t_begin_; }

  const Microgrid& microgrid(std::size_t index) const { return microgrids_[index]; }
  const std::vector<Microgrid>& microgrids() const noexcept { return microgrids_; }
  const Location& location(std::size_t index) const { return microgrids_[index].location; }
  MicrogridId id(std::size_t index) const { return microgrids_[index].id; }
  SignProfile sign(std::size_t index) const { return signs_[index]; }

  std::span<const Milliwatts> series(std::size_t index) const {
    return {energy_.data() + index * window_length_, window_length_};
  }
  const std::vector<Milliwatts>& energy() const noexcept { return energy_; }

  std::optional<std::size_t> index_of(MicrogridId id) const {
    const auto it = std::lower_bound(microgrids_.begin(), microgrids_.end(), id,
                                     [](const Microgrid& m, MicrogridId v) { return m.id < v; });
    if (it == microgrids_.end() || it->id != id) return std::nullopt;
    return static_cast<std::size_t>(it - microgrids_.begin());
  }

  /// Per-timestamp sum over all microgrids.
  std::vector<Milliwatts> total() const {
    std::vector<Milliwatts> out(window_length_, 0);
    for (std::size_t i = 0; i < size(); ++i) {
      const auto s = series(i);
      for (std::size_t t = 0; t < window_length_; ++t) out[t] += s[t];
    }
    return out;
  }

  /// The fleet's uniform sign profile, or Mixed when members disagree.
  SignProfile homogeneity() const {
    if (signs_.empty()) return SignProfile::Mixed;
    const SignProfile first = signs_.front();
    if (first == SignProfile::Mixed) return first;
    return std::all_of(signs_.begin(), signs_.end(), [&](SignProfile s) { return s == first; })
               ? first
               : SignProfile::Mixed;
  }

  /// A new fleet restricted to the given indices (kept in ascending id order).
  Fleet subset(std::span<const std::size_t> indices) const {
    std::vector<Microgrid> mg;
    std::vector<Milliwatts> en;
    mg.reserve(indices.size());
    en.reserve(indices.size() * window_length_);
    for (std::size_t i : indices) {
      mg.push_back(microgrids_[i]);
      const auto s = series(i);
      en.insert(en.end(), s.begin(), s.end());
    }
    return Fleet(std::move(mg), std::move(en), window_length_, t_begin_);
  }

  /// A new fleet restricted to readings [offset, offset + length).
  Fleet window(std::size_t offset, std::size_t length) const {
    if (length == 0 || offset + length > window_length_) {
      throw Error(Errc::WindowTooLong, "window [" + std::to_string(offset) + ", " +
                                           std::to_string(offset + length) + ") exceeds " +
                                           std::to_string(window_length_) + " readings");
    }
    std::vector<Milliwatts> en;
    en.reserve(size() * length);
    for (std::size_t i = 0; i < size(); ++i) {
      const auto s = series(i).subspan(offset, length);
      en.insert(en.end(), s.begin(), s.end());
    }
    return Fleet(microgrids_, std::move(en), length, t_begin_ + static_cast<std::int64_t>(offset));
  }

 private:
  std::vector<Microgrid> microgrids_;
  std::vector<Milliwatts> energy_;
  std::vector<SignProfile> signs_;
  std::size_t window_length_ = 0;
  std::int64_t t_begin_ = 0;
};

/// Min-max scales raw coordinates per axis into [0,1]; an axis with zero
/// extent maps to 0.5. Raw coordinates are kept untouched.
inline void normalize_locations(std::vector<Microgrid>& microgrids) {
  if (microgrids.empty()) throw Error(Errc::EmptyFleet, "cannot normalize an empty fleet");
  double min_x = std::numeric_limits<double>::infinity(), max_x = -min_x;
  double min_y = min_x, max_y = -min_x;
  for (const auto& m : microgrids) {
    if (!std::isfinite(m.raw_location.x) || !std::isfinite(m.raw_location.y)) {
      throw Error(Errc::ParseError, "microgrid " + std::to_string(m.id) + " has a non-finite coordinate");
    }
    min_x = std::min(min_x, m.raw_location.x);
    max_x = std::max(max_x, m.raw_location.x);
    min_y = std::min(min_y, m.raw_location.y);
    max_y = std::max(max_y, m.raw_location.y);
  }
  const auto scale = [](double v, double lo, double hi) { return hi > lo ? (v - lo) / (hi - lo) : 0.5; };
  for (auto& m : microgrids) {
    m.location = {scale(m.raw_location.x, min_x, max_x), scale(m.raw_location.y, min_y, max_y)};
  }
}

inline Fleet normalize_fleet(const Fleet& fleet) {
  if (fleet.empty()) throw Error(Errc::EmptyFleet, "cannot normalize an empty fleet");
  std::vector<Microgrid> mg = fleet.microgrids();
  normalize_locations(mg);
  return Fleet(std::move(mg), fleet.energy(), fleet.window_length(), fleet.t_begin());
}

/// Maps raw NE distances into [0,1] by dividing by the fleet-wide maximum
/// pairwise NE distance.
class NeNormalizer {
 public:
  /// Fleets larger than this use a seeded sample of pairs for the divisor.
  static constexpr std::size_t kExactLimit = 4000;
  static constexpr std::size_t kSamplePairs = 4'000'000;

  NeNormalizer() = default;
  explicit NeNormalizer(Milliwatts divisor, bool sampled = false) : divisor_(divisor), sampled_(sampled) {}

  static NeNormalizer for_fleet(const Fleet& fleet, std::uint64_t seed = 1) {
    if (fleet.empty()) throw Error(Errc::EmptyFleet, "cannot normalize NE distances of an empty fleet");
    const std::size_t n = fleet.size();
    Milliwatts best = 0;
    if (n <= kExactLimit) {
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) best = std::max(best, ne_distance(fleet.series(i), fleet.series(j)));
      }
      return NeNormalizer(best, false);
    }
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    for (std::size_t k = 0; k < kSamplePairs; ++k) {
      const std::size_t i = pick(rng), j = pick(rng);
      if (i != j) best = std::max(best, ne_distance(fleet.series(i), fleet.series(j)));
    }
    return NeNormalizer(best, true);
  }

  Milliwatts divisor() const noexcept { return divisor_; }
  bool sampled() const noexcept { return sampled_; }

  double operator()(Milliwatts raw) const {
    if (divisor_ == 0) return 0.0;
    return static_cast<double>(raw) / static_cast<double>(divisor_);
  }

 private:
  Milliwatts divisor_ = 0;
  bool sampled_ = false;
};

inline double normalized_ne_distance(std::span<const Milliwatts> a, std::span<const Milliwatts> b,
                                     const NeNormalizer& norm) {
  return norm(ne_distance(a, b));
}

enum class CommunityKind { HEC, MEC, SEC };

inline std::string_view to_string(CommunityKind k) {
  switch (k) {
    case CommunityKind::HEC: return "HEC";
    case CommunityKind::MEC: return "MEC";
    case CommunityKind::SEC: return "SEC";
  }
  return "?";
}

struct Community {
  std::size_t id = 0;
  std::vector<std::size_t> members;  // fleet indices, ascending
  Location centroid;
  std::vector<Milliwatts> aggregate;  // E_j(t)
  bool flagged = false;               // e.g. an oversized singleton under a net-energy bound

  std::size_t size() const noexcept { return members.size(); }
};

inline Location centroid_of(const Fleet& fleet, std::span<const std::size_t> members) {
  Location c;
  if (members.empty()) return c;
  for (std::size_t i : members) {
    c.x += fleet.location(i).x;
    c.y += fleet.location(i).y;
  }
  c.x /= static_cast<double>(members.size());
  c.y /= static_cast<double>(members.size());
  return c;
}

inline std::vector<Milliwatts> aggregate_of(const Fleet& fleet, std::span<const std::size_t> members) {
  std::vector<Milliwatts> agg(fleet.window_length(), 0);
  for (std::size_t i : members) {
    const auto s = fleet.series(i);
    for (std::size_t t = 0; t < agg.size(); ++t) agg[t] += s[t];
  }
  return agg;
}

inline Community make_community(const Fleet& fleet, std::size_t id, std::vector<std::size_t> members) {
  std::sort(members.begin(), members.end());
  Community c;
  c.id = id;
  c.centroid = centroid_of(fleet, members);
  c.aggregate = aggregate_of(fleet, members);
  c.members = std::move(members);
  return c;
}

/// A (possibly partial) partition of a fleet into communities.
struct CommunityAssignment {
  CommunityKind kind = CommunityKind::HEC;
  std::vector<Community> communities;
  std::vector<std::size_t> unassigned;  // fleet indices, ascending
  std::string provenance;               // effective configuration that produced it

  std::size_t assigned_count() const {
    std::size_t n = 0;
    for (const auto& c : communities) n += c.size();
    return n;
  }

  /// Community index per fleet index, or npos for unassigned microgrids.
  std::vector<std::size_t> labels(std::size_t fleet_size) const {
    std::vector<std::size_t> out(fleet_size, npos);
    for (std::size_t j = 0; j < communities.size(); ++j) {
      for (std::size_t i : communities[j].members) out[i] = j;
    }
    return out;
  }

  static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();
};

/// Builds an assignment from member lists. Communities are relabeled
/// 0..K-1 in order of their smallest member; empty groups are dropped and
/// every fleet index not listed becomes unassigned.
inline CommunityAssignment make_assignment(const Fleet& fleet, CommunityKind kind,
                                           std::vector<std::vector<std::size_t>> groups) {
  for (auto& g : groups) std::sort(g.begin(), g.end());
  std::erase_if(groups, [](const auto& g) { return g.empty(); });
  std::sort(groups.begin(), groups.end(), [](const auto& a, const auto& b) { return a.front() < b.front(); });
  CommunityAssignment out;
  out.kind = kind;
  std::vector<char> seen(fleet.size(), 0);
  for (std::size_t j = 0; j < groups.size(); ++j) {
    for (std::size_t i : groups[j]) {
      if (i >= fleet.size() || seen[i]) {
        throw Error(Errc::InvalidConfig, "microgrid index " + std::to_string(i) + " is out of range or listed twice");
      }
      seen[i] = 1;
    }
    out.communities.push_back(make_community(fleet, j, std::move(groups[j])));
  }
  for (std::size_t i = 0; i < fleet.size(); ++i) {
    if (!seen[i]) out.unassigned.push_back(i);
  }
  return out;
}

/// Builds an assignment from a label per fleet index (npos = unassigned).
inline CommunityAssignment assignment_from_labels(const Fleet& fleet, CommunityKind kind,
                                                  std::span<const std::size_t> labels) {
  std::unordered_map<std::size_t, std::size_t> slot;
  std::vector<std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == CommunityAssignment::npos) continue;
    auto [it, inserted] = slot.try_emplace(labels[i], groups.size());
    if (inserted) groups.emplace_back();
    groups[it->second].push_back(i);
  }
  return make_assignment(fleet, kind, std::move(groups));
}

/// Checks the partition law and recomputes every aggregate and centroid.
/// Returns an empty string when the assignment is consistent.
inline std::string validate_assignment(const Fleet& fleet, const CommunityAssignment& a) {
  std::vector<int> count(fleet.size(), 0);
  for (const auto& c : a.communities) {
    if (c.members.empty()) return "community " + std::to_string(c.id) + " is empty";
    for (std::size_t i : c.members) {
      if (i >= fleet.size()) return "member index out of range";
      ++count[i];
    }
    if (aggregate_of(fleet, c.members) != c.aggregate) {
      return "community " + std::to_string(c.id) + " aggregate does not match its members";
    }
    const Location mu = centroid_of(fleet, c.members);
    if (std::abs(mu.x - c.centroid.x) > 1e-12 || std::abs(mu.y - c.centroid.y) > 1e-12) {
      return "community " + std::to_string(c.id) + " centroid does not match its members";
    }
  }
  for (std::size_t i : a.unassigned) {
    if (i >= fleet.size()) return "unassigned index out of range";
    ++count[i];
  }
  for (std::size_t i = 0; i < fleet.size(); ++i) {
    if (count[i] != 1) {
      return "microgrid " + std::to_string(fleet.id(i)) + " appears " + std::to_string(count[i]) + " times";
    }
  }
  return {};
}

/// Deterministic per-stream seed derivation (splitmix64 finalizer).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed ^ (stream + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace gridcomm
