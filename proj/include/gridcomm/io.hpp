#pragma once

// CSV ingestion and emission for fleets, assignments, substations, flow
// plans and search/admission logs. All files are UTF-8, comma-separated,
// LF-terminated, unquoted, with a mandatory header line.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "gridcomm/core.hpp"
#include "gridcomm/flow.hpp"
#include "gridcomm/mec.hpp"
#include "gridcomm/sec.hpp"

namespace gridcomm::io {

inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Writes through a temporary sibling and renames it into place.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::Io, "cannot open " + tmp.string() + " for writing");
    out << content;
    if (!out) throw Error(Errc::Io, "failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Line-oriented CSV reader that knows the current line number.
class CsvReader {
 public:
  CsvReader(std::string text, std::string source) : text_(std::move(text)), source_(std::move(source)) {}

  /// Reads the header and checks it against any of the accepted forms;
  /// returns the index of the matching form.
  std::size_t expect_header(const std::vector<std::string_view>& accepted) {
    std::vector<std::string_view> cols;
    if (!next(cols)) fail("missing header (expected " + std::string(accepted.front()) + ")");
    std::string joined;
    for (std::size_t k = 0; k < cols.size(); ++k) joined += (k ? "," : "") + std::string(cols[k]);
    for (std::size_t k = 0; k < accepted.size(); ++k) {
      if (joined == accepted[k]) return k;
    }
    fail("unexpected header '" + joined + "' (expected " + std::string(accepted.front()) + ")");
  }

  bool next(std::vector<std::string_view>& cols) {
    for (;;) {
      if (pos_ >= text_.size()) return false;
      std::size_t end = text_.find('\n', pos_);
      if (end == std::string::npos) end = text_.size();
      std::string_view line(text_.data() + pos_, end - pos_);
      pos_ = end + 1;
      ++line_;
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      if (line.empty()) continue;
      cols.clear();
      std::size_t start = 0;
      for (;;) {
        const std::size_t comma = line.find(',', start);
        cols.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
      }
      return true;
    }
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw Error(Errc::ParseError, source_ + " line " + std::to_string(line_ == 0 ? 1 : line_) + ": " + what);
  }

  void expect_columns(const std::vector<std::string_view>& cols, std::size_t n) const {
    if (cols.size() != n) fail("expected " + std::to_string(n) + " columns, found " + std::to_string(cols.size()));
  }

  template <class T>
  T integer(std::string_view s) const {
    T v{};
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) fail("'" + std::string(s) + "' is not an integer");
    return v;
  }

  double real(std::string_view s) const {
    double v = 0.0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size() || !std::isfinite(v)) {
      fail("'" + std::string(s) + "' is not a finite number");
    }
    return v;
  }

  std::size_t line() const { return line_; }

 private:
  std::string text_;
  std::string source_;
  std::size_t pos_ = 0;
  std::size_t line_ = 0;
};

// ---------------------------------------------------------------------------
// Fleets

struct IngestReport {
  std::vector<MicrogridId> dropped_zero;  // microgrids removed for a zero reading
  bool normalized_from_raw = false;
};

inline std::vector<Microgrid> parse_microgrids(const std::string& text, const std::string& source, bool& raw) {
  CsvReader r(text, source);
  const std::size_t form = r.expect_header({"microgrid_id,x,y", "microgrid_id,lon,lat"});
  raw = form == 1;
  std::vector<Microgrid> out;
  std::vector<std::string_view> cols;
  while (r.next(cols)) {
    r.expect_columns(cols, 3);
    Microgrid m;
    m.id = r.integer<MicrogridId>(cols[0]);
    m.raw_location = {r.real(cols[1]), r.real(cols[2])};
    if (raw) {
      m.raw_units = CoordUnits::Degrees;
    } else {
      m.location = m.raw_location;
      if (m.location.x < 0.0 || m.location.x > 1.0 || m.location.y < 0.0 || m.location.y > 1.0) {
        r.fail("normalized coordinate outside [0,1]");
      }
    }
    out.push_back(m);
  }
  return out;
}

/// Long-form energy: one row per (microgrid, timestamp).
inline std::map<MicrogridId, std::vector<Milliwatts>> parse_energy(const std::string& text, const std::string& source) {
  CsvReader r(text, source);
  r.expect_header({"microgrid_id,timestamp,net_energy_mw"});
  std::map<MicrogridId, std::vector<Milliwatts>> series;
  std::vector<std::string_view> cols;
  while (r.next(cols)) {
    r.expect_columns(cols, 3);
    const auto id = r.integer<MicrogridId>(cols[0]);
    const auto t = r.integer<std::int64_t>(cols[1]);
    const auto v = r.integer<Milliwatts>(cols[2]);
    auto& s = series[id];
    if (t != static_cast<std::int64_t>(s.size())) {
      r.fail("microgrid " + std::to_string(id) + " timestamp " + std::to_string(t) + " out of order (expected " +
             std::to_string(s.size()) + ")");
    }
    s.push_back(v);
  }
  return series;
}

inline Fleet fleet_from_parts(std::vector<Microgrid> microgrids, const std::map<MicrogridId, std::vector<Milliwatts>>& series,
                              bool raw, IngestReport* report = nullptr) {
  if (microgrids.empty()) throw Error(Errc::EmptyFleet, "microgrid file lists no microgrids");
  std::size_t window = 0;
  for (const auto& m : microgrids) {
    const auto it = series.find(m.id);
    if (it == series.end()) throw Error(Errc::WindowMismatch, "microgrid " + std::to_string(m.id) + " has no energy series");
    if (window == 0) window = it->second.size();
    if (it->second.size() != window) {
      throw Error(Errc::WindowMismatch, "microgrid " + std::to_string(m.id) + " has " + std::to_string(it->second.size()) +
                                            " readings, expected " + std::to_string(window));
    }
  }
  for (const auto& [id, s] : series) {
    const bool known = std::any_of(microgrids.begin(), microgrids.end(), [&](const Microgrid& m) { return m.id == id; });
    if (!known) throw Error(Errc::ParseError, "energy series for unknown microgrid " + std::to_string(id));
  }
  std::vector<Microgrid> kept;
  std::vector<Milliwatts> energy;
  for (const auto& m : microgrids) {
    const auto& s = series.at(m.id);
    if (std::find(s.begin(), s.end(), Milliwatts{0}) != s.end()) {
      if (report) report->dropped_zero.push_back(m.id);
      continue;
    }
    kept.push_back(m);
    energy.insert(energy.end(), s.begin(), s.end());
  }
  if (kept.empty()) throw Error(Errc::EmptyFleet, "every microgrid has a zero reading");
  if (raw) normalize_locations(kept);
  if (report) report->normalized_from_raw = raw;
  return Fleet(std::move(kept), std::move(energy), window);
}

inline Fleet ingest_fleet(const std::filesystem::path& microgrids_csv, const std::filesystem::path& energy_csv,
                          IngestReport* report = nullptr) {
  bool raw = false;
  auto mg = parse_microgrids(read_file(microgrids_csv), microgrids_csv.string(), raw);
  const auto series = parse_energy(read_file(energy_csv), energy_csv.string());
  return fleet_from_parts(std::move(mg), series, raw, report);
}

inline std::string microgrids_csv(const Fleet& fleet) {
  std::ostringstream os;
  os << "microgrid_id,x,y\n";
  for (const auto& m : fleet.microgrids()) {
    os << m.id << ',' << format_double(m.location.x) << ',' << format_double(m.location.y) << '\n';
  }
  return os.str();
}

inline std::string energy_csv(const Fleet& fleet) {
  std::string out = "microgrid_id,timestamp,net_energy_mw\n";
  out.reserve(out.size() + fleet.size() * fleet.window_length() * 16);
  for (std::size_t i = 0; i < fleet.size(); ++i) {
    const std::string id = std::to_string(fleet.id(i));
    const auto s = fleet.series(i);
    for (std::size_t t = 0; t < s.size(); ++t) {
      out += id;
      out += ',';
      out += std::to_string(t);
      out += ',';
      out += std::to_string(s[t]);
      out += '\n';
    }
  }
  return out;
}

inline void emit_fleet(const Fleet& fleet, const std::filesystem::path& microgrids_path,
                       const std::filesystem::path& energy_path) {
  write_file_atomic(microgrids_path, microgrids_csv(fleet));
  write_file_atomic(energy_path, energy_csv(fleet));
}

// ---------------------------------------------------------------------------
// Assignments

inline std::string assignment_csv(const Fleet& fleet, const CommunityAssignment& a) {
  std::ostringstream os;
  os << "community_id,microgrid_id\n";
  for (const auto& c : a.communities) {
    for (std::size_t i : c.members) os << c.id << ',' << fleet.id(i) << '\n';
  }
  return os.str();
}

inline void emit_assignment(const Fleet& fleet, const CommunityAssignment& a, const std::filesystem::path& path) {
  write_file_atomic(path, assignment_csv(fleet, a));
}

/// Microgrids missing from the file are unassigned.
inline CommunityAssignment parse_assignment(const Fleet& fleet, const std::string& text, const std::string& source,
                                            CommunityKind kind) {
  CsvReader r(text, source);
  r.expect_header({"community_id,microgrid_id"});
  std::vector<std::size_t> labels(fleet.size(), CommunityAssignment::npos);
  std::vector<std::string_view> cols;
  while (r.next(cols)) {
    r.expect_columns(cols, 2);
    const auto c = r.integer<std::size_t>(cols[0]);
    const auto id = r.integer<MicrogridId>(cols[1]);
    const auto idx = fleet.index_of(id);
    if (!idx) r.fail("unknown microgrid " + std::to_string(id));
    if (labels[*idx] != CommunityAssignment::npos) {
      throw Error(Errc::DuplicateId, source + " line " + std::to_string(r.line()) + ": microgrid " + std::to_string(id) +
                                         " assigned twice");
    }
    labels[*idx] = c;
  }
  return assignment_from_labels(fleet, kind, labels);
}

inline CommunityAssignment ingest_assignment(const Fleet& fleet, const std::filesystem::path& path, CommunityKind kind) {
  return parse_assignment(fleet, read_file(path), path.string(), kind);
}

// ---------------------------------------------------------------------------
// Substations

inline std::string substations_csv(const Substations& s) {
  std::ostringstream os;
  os << "substation_id,x,y\n";
  for (std::size_t k = 0; k < s.sites.size(); ++k) {
    os << k << ',' << format_double(s.sites[k].x) << ',' << format_double(s.sites[k].y) << '\n';
  }
  return os.str();
}

inline Substations parse_substations(const std::string& text, const std::string& source) {
  CsvReader r(text, source);
  r.expect_header({"substation_id,x,y"});
  std::vector<std::pair<std::size_t, Location>> rows;
  std::vector<std::string_view> cols;
  while (r.next(cols)) {
    r.expect_columns(cols, 3);
    rows.emplace_back(r.integer<std::size_t>(cols[0]), Location{r.real(cols[1]), r.real(cols[2])});
  }
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  Substations s;
  for (const auto& [id, loc] : rows) s.sites.push_back(loc);
  if (s.sites.empty()) throw Error(Errc::ParseError, source + ": no substations listed");
  return s;
}

// ---------------------------------------------------------------------------
// Logs and plans

inline std::string admission_log_csv(const Fleet& fleet, const AdmissionLog& log) {
  std::ostringstream os;
  os << "community_id,microgrid_id,round,ne_dist,sp_dist\n";
  for (const auto& r : log) {
    os << r.community_id << ',' << fleet.id(r.microgrid) << ',' << r.round << ',' << format_double(r.ne_dist) << ','
       << format_double(r.sp_dist) << '\n';
  }
  return os.str();
}

inline std::string trace_csv(const std::vector<TraceEntry>& trace) {
  std::ostringstream os;
  os << "iteration,K,accepted_objective,violation,move_description\n";
  for (const auto& e : trace) {
    os << e.iteration << ',' << e.k << ',' << format_double(e.accepted_objective) << ',' << format_double(e.violation)
       << ',' << e.move << '\n';
  }
  return os.str();
}

inline std::string flow_plan_csv(const Fleet& fleet, const FlowPlan& plan) {
  std::ostringstream os;
  os << "community_id,timestamp,source,sink,amount_mw,distance,load_contrib\n";
  for (const auto& sl : plan.slices) {
    for (const auto& s : sl.shipments) {
      os << sl.community << ',' << sl.t << ',' << endpoint_label(fleet, s.source) << ','
         << endpoint_label(fleet, s.sink) << ',' << s.amount << ',' << format_double(s.distance) << ','
         << format_double(s.load) << '\n';
    }
  }
  return os.str();
}


inline Endpoint parse_endpoint(const Fleet& fleet, const CsvReader& r, std::string_view s) {
  if (s == "centroid") return Endpoint::centroid();
  if (s == "bank") return Endpoint::bank();
  if (s == "grid") return Endpoint::grid(std::numeric_limits<std::size_t>::max());
  if (s.rfind("grid", 0) == 0) return Endpoint::grid(r.integer<std::size_t>(s.substr(4)));
  if (s.rfind("m", 0) == 0) {
    const auto idx = fleet.index_of(r.integer<MicrogridId>(s.substr(1)));
    if (!idx) r.fail("unknown microgrid endpoint '" + std::string(s) + "'");
    return Endpoint::microgrid(*idx);
  }
  r.fail("unknown endpoint '" + std::string(s) + "'");
}

/// Slices are rebuilt from their shipments; slices without shipments are
/// not represented in the file.
inline FlowPlan parse_flow_plan(const Fleet& fleet, const std::string& text, const std::string& source) {
  CsvReader r(text, source);
  r.expect_header({"community_id,timestamp,source,sink,amount_mw,distance,load_contrib"});
  FlowPlan plan;
  std::vector<std::string_view> cols;
  while (r.next(cols)) {
    r.expect_columns(cols, 7);
    const auto c = r.integer<std::size_t>(cols[0]);
    const auto t = r.integer<std::size_t>(cols[1]);
    if (plan.slices.empty() || plan.slices.back().community != c || plan.slices.back().t != t) {
      FlowSlice sl;
      sl.community = c;
      sl.t = t;
      plan.slices.push_back(sl);
    }
    Shipment s{parse_endpoint(fleet, r, cols[2]), parse_endpoint(fleet, r, cols[3]), r.integer<Milliwatts>(cols[4]),
               r.real(cols[5]), r.real(cols[6])};
    auto& sl = plan.slices.back();
    if (s.source.kind == Endpoint::Kind::Grid) {
      sl.grid_topup += s.amount;
    } else {
      sl.shipped += s.amount;
    }
    sl.load += s.load;
    sl.shipments.push_back(s);
  }
  return plan;
}

inline AdmissionLog parse_admission_log(const Fleet& fleet, const std::string& text, const std::string& source) {
  CsvReader r(text, source);
  r.expect_header({"community_id,microgrid_id,round,ne_dist,sp_dist"});
  AdmissionLog log;
  std::vector<std::string_view> cols;
  while (r.next(cols)) {
    r.expect_columns(cols, 5);
    AdmissionRecord rec;
    rec.community_id = r.integer<std::size_t>(cols[0]);
    const auto idx = fleet.index_of(r.integer<MicrogridId>(cols[1]));
    if (!idx) r.fail("unknown microgrid " + std::string(cols[1]));
    rec.microgrid = *idx;
    rec.round = r.integer<std::size_t>(cols[2]);
    rec.ne_dist = r.real(cols[3]);
    rec.sp_dist = r.real(cols[4]);
    log.push_back(rec);
  }
  return log;
}

inline std::vector<TraceEntry> parse_trace(const std::string& text, const std::string& source) {
  CsvReader r(text, source);
  r.expect_header({"iteration,K,accepted_objective,violation,move_description"});
  std::vector<TraceEntry> out;
  std::vector<std::string_view> cols;
  while (r.next(cols)) {
    r.expect_columns(cols, 5);
    out.push_back({r.integer<std::size_t>(cols[0]), r.integer<std::size_t>(cols[1]), r.real(cols[2]), r.real(cols[3]),
                   std::string(cols[4])});
  }
  return out;
}

/// Flat `key,value` files such as a metrics report.
inline std::vector<std::pair<std::string, std::string>> parse_key_values(const std::string& text, const std::string& source) {
  CsvReader r(text, source);
  r.expect_header({"key,value"});
  std::vector<std::pair<std::string, std::string>> out;
  std::vector<std::string_view> cols;
  while (r.next(cols)) {
    r.expect_columns(cols, 2);
    out.emplace_back(std::string(cols[0]), std::string(cols[1]));
  }
  return out;
}

inline std::string key_values_csv(const std::vector<std::pair<std::string, std::string>>& kv) {
  std::string out = "key,value\n";
  for (const auto& [k, v] : kv) out += k + ',' + v + '\n';
  return out;
}

inline Substations ingest_substations(const std::filesystem::path& path) {
  return parse_substations(read_file(path), path.string());
}

}  // namespace gridcomm::io
