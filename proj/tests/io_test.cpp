#include <gtest/gtest.h>

#include <filesystem>

#include "fixtures.hpp"
#include "gridcomm/io.hpp"
#include "gridcomm/mec.hpp"
#include "gridcomm/sec.hpp"

using namespace gridcomm;

namespace {

template <class Fn>
Errc error_code(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an error";
  return Errc::Io;
}

template <class Fn>
std::string error_message(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

Fleet generated(std::uint64_t seed) {
  GenerateConfig cfg;
  cfg.n = 60;
  cfg.seed = seed;
  return generate_fleet(fixtures::synthetic_traces(), fixtures::grid_pool(40, seed), cfg);
}

void expect_same_fleet(const Fleet& a, const Fleet& b) {
  ASSERT_EQ(a.size(), b.size());
  EXPECT_EQ(a.window_length(), b.window_length());
  EXPECT_EQ(a.energy(), b.energy());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a.id(i), b.id(i));
    EXPECT_EQ(a.location(i), b.location(i));
  }
}

}  // namespace

TEST(Io, FleetRoundTripIsExact) {
  const auto f = generated(3);
  bool raw = true;
  auto mg = io::parse_microgrids(io::microgrids_csv(f), "m.csv", raw);
  EXPECT_FALSE(raw);
  const auto back = io::fleet_from_parts(std::move(mg), io::parse_energy(io::energy_csv(f), "e.csv"), raw);
  expect_same_fleet(f, back);
  EXPECT_EQ(io::microgrids_csv(back), io::microgrids_csv(f));
  EXPECT_EQ(io::energy_csv(back), io::energy_csv(f));
}

TEST(Io, FilesRoundTripThroughDisk) {
  const auto dir = std::filesystem::temp_directory_path() / "gridcomm_io_test";
  std::filesystem::remove_all(dir);
  const auto f = generated(4);
  io::emit_fleet(f, dir / "microgrids.csv", dir / "energy.csv");
  const auto back = io::ingest_fleet(dir / "microgrids.csv", dir / "energy.csv");
  expect_same_fleet(f, back);
  EXPECT_FALSE(std::filesystem::exists(dir / "energy.csv.tmp"));
  std::filesystem::remove_all(dir);
}

TEST(Io, RawCoordinatesAreNormalized) {
  const std::string mg = "microgrid_id,lon,lat\n1,-3.0,50.0\n2,1.0,52.0\n3,-1.0,51.0\n";
  const std::string en = "microgrid_id,timestamp,net_energy_mw\n1,0,5\n2,0,-5\n3,0,7\n";
  bool raw = false;
  auto parsed = io::parse_microgrids(mg, "m", raw);
  ASSERT_TRUE(raw);
  io::IngestReport rep;
  const auto f = io::fleet_from_parts(std::move(parsed), io::parse_energy(en, "e"), raw, &rep);
  EXPECT_TRUE(rep.normalized_from_raw);
  EXPECT_EQ(f.location(2), (Location{0.5, 0.5}));
  EXPECT_EQ(f.microgrid(0).raw_location, (Location{-3.0, 50.0}));
}

TEST(Io, MissingHeaderNamesLineOne) {
  const std::string text = "1,0.5,0.5\n";
  bool raw = false;
  EXPECT_EQ(error_code([&] { (void)io::parse_microgrids(text, "microgrids.csv", raw); }), Errc::ParseError);
  EXPECT_NE(error_message([&] { (void)io::parse_microgrids(text, "microgrids.csv", raw); }).find("line 1"),
            std::string::npos);
  EXPECT_NE(error_message([&] { (void)io::parse_microgrids("", "microgrids.csv", raw); }).find("line 1"),
            std::string::npos);
}

TEST(Io, BadRowIsAddressed) {
  const std::string text = "microgrid_id,timestamp,net_energy_mw\n1,0,5\n1,1,abc\n";
  const auto msg = error_message([&] { (void)io::parse_energy(text, "energy.csv"); });
  EXPECT_NE(msg.find("energy.csv line 3"), std::string::npos) << msg;
}

TEST(Io, RaggedWindowNamesTheId) {
  std::string en = "microgrid_id,timestamp,net_energy_mw\n";
  for (int id = 1; id <= 3; ++id) {
    const int len = id == 2 ? 3 : 4;
    for (int t = 0; t < len; ++t) en += std::to_string(id) + "," + std::to_string(t) + ",5\n";
  }
  const std::string mg = "microgrid_id,x,y\n1,0.1,0.1\n2,0.2,0.2\n3,0.3,0.3\n";
  const auto run = [&] {
    bool raw = false;
    (void)io::fleet_from_parts(io::parse_microgrids(mg, "m", raw), io::parse_energy(en, "e"), raw);
  };
  EXPECT_EQ(error_code(run), Errc::WindowMismatch);
  EXPECT_NE(error_message(run).find("microgrid 2"), std::string::npos);
}

TEST(Io, DuplicateIdRejected) {
  const std::string mg = "microgrid_id,x,y\n1,0.1,0.1\n1,0.2,0.2\n";
  const std::string en = "microgrid_id,timestamp,net_energy_mw\n1,0,5\n";
  bool raw = false;
  EXPECT_EQ(error_code([&] { (void)io::fleet_from_parts(io::parse_microgrids(mg, "m", raw), io::parse_energy(en, "e"), raw); }),
            Errc::DuplicateId);
}

TEST(Io, ZeroNetMicrogridsDropped) {
  const std::string mg = "microgrid_id,x,y\n1,0.1,0.1\n2,0.2,0.2\n";
  const std::string en = "microgrid_id,timestamp,net_energy_mw\n1,0,5\n1,1,0\n2,0,-4\n2,1,-3\n";
  bool raw = false;
  io::IngestReport rep;
  const auto f = io::fleet_from_parts(io::parse_microgrids(mg, "m", raw), io::parse_energy(en, "e"), raw, &rep);
  EXPECT_EQ(f.size(), 1u);
  EXPECT_EQ(rep.dropped_zero, (std::vector<MicrogridId>{1}));
}

TEST(Io, AssignmentRoundTrip) {
  const auto f = generated(5);
  MecConfig cfg;
  cfg.eps_sp = 0.2;
  const auto r = discover_mec(f, cfg);
  auto a = r.assignment;
  a.communities.pop_back();  // leave some microgrids unassigned
  a = make_assignment(f, CommunityKind::MEC, [&] {
    std::vector<std::vector<std::size_t>> g;
    for (const auto& c : a.communities) g.push_back(c.members);
    return g;
  }());
  const std::string csv = io::assignment_csv(f, a);
  const auto back = io::parse_assignment(f, csv, "c.csv", CommunityKind::MEC);
  EXPECT_EQ(back.labels(f.size()), a.labels(f.size()));
  EXPECT_EQ(back.unassigned, a.unassigned);
  EXPECT_EQ(io::assignment_csv(f, back), csv);
  EXPECT_EQ(error_code([&] { (void)io::parse_assignment(f, "community_id,microgrid_id\n0,1\n1,1\n", "c", CommunityKind::MEC); }),
            Errc::DuplicateId);
}

TEST(Io, SubstationsRoundTrip) {
  const Substations s{{{0.1, 0.2}, {1.0 / 3.0, 0.7}}};
  const auto csv = io::substations_csv(s);
  const auto back = io::parse_substations(csv, "s.csv");
  EXPECT_EQ(back.sites, s.sites);
  EXPECT_EQ(io::substations_csv(back), csv);
}

TEST(Io, LogArtifactsRoundTrip) {
  const auto f = generated(6);
  MecConfig cfg;
  cfg.eps_ne = 0.6;
  cfg.eps_sp = 0.2;
  const auto r = discover_mec(f, cfg);
  ASSERT_FALSE(r.log.empty());
  const auto log_csv = io::admission_log_csv(f, r.log);
  EXPECT_EQ(io::admission_log_csv(f, io::parse_admission_log(f, log_csv, "log")), log_csv);

  const Substations subs{{{0.3, 0.3}, {0.7, 0.8}}};
  const auto plan = plan_flows(f, r.assignment, LossModel{}, &subs);
  const auto plan_csv = io::flow_plan_csv(f, plan);
  const auto back = io::parse_flow_plan(f, plan_csv, "flows");
  EXPECT_EQ(io::flow_plan_csv(f, back), plan_csv);
  EXPECT_EQ(back.total_shipped(), plan.total_shipped());
  EXPECT_EQ(back.total_topup(), plan.total_topup());

  SecOptConfig sc;
  sc.k_values = {3, 5};
  const auto sec_fleet = fixtures::tiny_sec_fleet(25, 3, 2);
  const auto tabu = discover_sec_tabu(sec_fleet, sc);
  const auto trace_csv = io::trace_csv(tabu.trace);
  EXPECT_EQ(io::trace_csv(io::parse_trace(trace_csv, "trace")), trace_csv);
}
