#include <filesystem>
#include <sstream>

#include <gtest/gtest.h>

#include "trussforge/trussforge.hpp"

using namespace trussforge;
namespace fs = std::filesystem;

namespace {

std::string scenario(const char* name) { return std::string(TRUSSFORGE_SCENARIO_DIR) + "/" + name; }

}  // namespace

TEST(Rmse, Examples) {
  const std::vector<double> a = {1, 2, 3, 4};
  EXPECT_EQ(rmse(a, a), 0.0);
  const std::vector<double> shifted = {1.5, 2.5, 3.5, 4.5};
  EXPECT_DOUBLE_EQ(rmse(a, shifted), 0.5);
  const std::vector<double> zero(6, 0.0);
  const std::vector<double> alt = {0.3, -0.3, 0.3, -0.3, 0.3, -0.3};
  EXPECT_NEAR(rmse(zero, alt), 0.3, 1e-15);
}

TEST(Rmse, WindowAndErrors) {
  const std::vector<double> d = {0, 0, 0, 0}, act = {9, 1, 1, 9}, w = {0, 1, 1, 0};
  EXPECT_DOUBLE_EQ(rmse(d, act, w), 1.0);
  const std::vector<double> none(4, 0.0);
  EXPECT_THROW(rmse(d, act, none), EmptyWindow);
  const std::vector<double> short_series = {0, 0};
  EXPECT_THROW(rmse(d, short_series, w), DimensionMismatch);
}

TEST(TraceCsv, RoundTripIsExact) {
  Trace t({"time", "a", "b"});
  t.append({0.0, 0.1, -1e-300});
  t.append({0.02, 1.0 / 3.0, 6.02214076e23});
  t.append({0.04, -0.0, 123456789.123456789});
  std::stringstream ss;
  t.write_csv(ss);
  const Trace back = Trace::read_csv(ss);
  EXPECT_TRUE(back == t);
}

TEST(TraceCsv, MalformedInput) {
  std::stringstream bad("a,b\n1,x\n");
  EXPECT_THROW(Trace::read_csv(bad), ConfigError);
  std::stringstream dup("a,a\n1,2\n");
  EXPECT_THROW(Trace::read_csv(dup), ConfigError);
}

TEST(Report, RecomputedFromCsvIsIdentical) {
  Scenario sc = load_scenario(scenario("tetra_node_force_x.json"));
  sc.experiment.program = force_ramp_program(
      20.0, 10.0, 3.0, Vec3::UnitX(),
      controlled_point(sc.experiment.scene, sc.experiment.scene.config.positions));
  const RunResult r = simulate(sc.experiment);
  std::stringstream ss;
  r.trace.write_csv(ss);
  RunReport again = compute_report(Trace::read_csv(ss));
  again.name = r.report.name;
  again.seed = r.report.seed;
  EXPECT_EQ(report_text(again), report_text(r.report));
}

TEST(Report, HardwareReferenceOnlyForSuiteLabels) {
  RunReport r;
  r.name = "x";
  const auto j = report_json(r, "xy");
  ASSERT_TRUE(j.contains("reference"));
  EXPECT_EQ(j["reference"]["label"], "hardware (paper)");
  EXPECT_DOUBLE_EQ(j["reference"]["position_rmse_m"]["x"].get<double>(), 0.0244);
  EXPECT_DOUBLE_EQ(j["reference"]["force_rmse_n"].get<double>(), 5.05);
  EXPECT_FALSE(report_json(r, "").contains("reference"));
}

TEST(Scenario, BundledFilesParse) {
  for (const auto& entry : fs::directory_iterator(TRUSSFORGE_SCENARIO_DIR)) {
    if (entry.path().extension() != ".json") continue;
    EXPECT_NO_THROW(load_scenario(entry.path().string())) << entry.path();
  }
}

TEST(Scenario, UnknownKeysAndVersionRejected) {
  nlohmann::json doc = load_scenario_document(scenario("single_member_ramp.json"));
  nlohmann::json typo = doc;
  typo["actuator"]["dead_zone"] = 0.1;
  EXPECT_THROW(parse_scenario(typo), ConfigError);
  nlohmann::json version = doc;
  version["schema_version"] = 7;
  EXPECT_THROW(parse_scenario(version), ConfigError);
  nlohmann::json missing = doc;
  missing.erase("program");
  EXPECT_THROW(parse_scenario(missing), ConfigError);
  nlohmann::json bad_range = doc;
  bad_range["actuator"]["min_length_m"] = 5.0;
  EXPECT_THROW(parse_scenario(bad_range), ConfigError);
}

TEST(Scenario, DottedOverrides) {
  nlohmann::json doc = load_scenario_document(scenario("double_tet_suite.json"));
  apply_override(doc, "program.trajectory", "oblique");
  apply_override(doc, "gains.k_pos_n_per_m", "650");
  apply_override(doc, "environment.contact_stiffness_n_per_m", "4e4");
  const Scenario sc = parse_scenario(doc);
  EXPECT_EQ(sc.experiment.trajectory, "oblique");
  EXPECT_DOUBLE_EQ(sc.experiment.scene.control.k_pos, 650.0);
  EXPECT_DOUBLE_EQ(sc.experiment.scene.env.contact_stiffness, 4e4);
  EXPECT_THROW(apply_override(doc, "a..b", "1"), ConfigError);
}

TEST(Scenario, SegmentProgram) {
  const Scenario sc = load_scenario(scenario("tetra_circle.json"));
  EXPECT_EQ(sc.experiment.program.segments().size(), 4u);
  EXPECT_DOUBLE_EQ(sc.experiment.program.duration(), 62.0);
}

TEST(Scenario, FrictionlessCarryDrops) {
  const Scenario sc = load_scenario(scenario("frictionless_carry.json"));
  const RunResult r = simulate(sc.experiment);
  EXPECT_EQ(r.exit_code, kExitDropped);
  EXPECT_TRUE(r.report.grasp_dropped);
  ASSERT_FALSE(r.report.grasp_timeline.empty());
  EXPECT_EQ(r.report.grasp_timeline.back().status, GraspStatus::dropped);
}

TEST(Sweep, GridCells) {
  const auto cells = grid_cells({parse_grid_axis("a=1,2"), parse_grid_axis("b=[\"x\",\"y,z\"]")});
  ASSERT_EQ(cells.size(), 4u);
  EXPECT_EQ(cells[1].overrides[1].second, "y,z");
  EXPECT_EQ(grid_cells({}).size(), 1u);
  EXPECT_THROW(parse_grid_axis("novalues="), ConfigError);
}

TEST(Sweep, OneCellOneRepeatEqualsRun) {
  const nlohmann::json doc = load_scenario_document(scenario("single_member_ramp.json"));
  SweepOptions opts;
  opts.repeats = 1;
  opts.seed = 5;
  opts.workers = 2;
  const SweepTable t = sweep(doc, grid_cells({}), opts);
  Scenario sc = parse_scenario(doc);
  sc.experiment.seed = 5;
  const RunResult r = simulate(sc.experiment);
  ASSERT_EQ(t.runs.size(), 1u);
  EXPECT_EQ(report_text(t.runs[0].report), report_text(r.report));
}

TEST(Sweep, DeterministicRepeatsAgreeAndErrorsStayInTheirCell) {
  const nlohmann::json doc = load_scenario_document(scenario("single_member_ramp.json"));
  SweepOptions opts;
  opts.repeats = 2;
  opts.deterministic = true;
  opts.workers = 2;
  const SweepTable t =
      sweep(doc, grid_cells({parse_grid_axis("program.target_n=20,-5")}), opts);
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_EQ(t.rows[0].failures, 0);
  EXPECT_EQ(*t.rows[0].holding_error, *t.runs[1].report.holding_error);
  EXPECT_EQ(t.runs[0].report.holding_error, t.runs[1].report.holding_error);
  EXPECT_EQ(t.rows[1].failures, 2);
  EXPECT_EQ(t.runs[2].exit_code, kExitConfig);
  EXPECT_NE(sweep_csv(t).find("cell,runs"), std::string::npos);
  EXPECT_NE(sweep_markdown(t).find("| 20 |"), std::string::npos);
}
