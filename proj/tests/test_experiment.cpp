#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "pustat/error.hpp"
#include "pustat/experiment.hpp"

namespace pustat {
namespace {

namespace fs = std::filesystem;

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path temp_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("pustat_test_" + name);
  fs::remove_all(p);
  return p;
}

const char* kSmall = R"({
  "kind": "moments",
  "kernel": {"family": "gilbert", "delta": 0.1},
  "window": {"shape": "box", "dim": 2, "extent": 0.5, "center": [0.5, 0.5]},
  "schedule": {"t": [50]},
  "replicates": 100,
  "mc_samples": 2000,
  "inner_samples": 8,
  "seed": 3
})";

std::string field_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "<none>";
}

TEST(Config, ErrorsNameTheField) {
  EXPECT_EQ(field_of(R"({"schedule": {"t": [1]}})"), "kind");
  EXPECT_EQ(field_of(R"({"kind": "moments"})"), "schedule.t");
  EXPECT_EQ(field_of(R"({"kind": "moments", "schedule": {"t": []}})"), "schedule.t");
  EXPECT_EQ(field_of(R"({"kind": "moments", "schedule": {"t": [1]}, "replicates": 0})"),
            "replicates");
  EXPECT_EQ(field_of(R"({"kind": "bogus", "schedule": {"t": [1]}})"), "kind");
  EXPECT_EQ(field_of(R"({"kind": "moments", "schedule": {"t": [1]}, "extra": 1})"), "extra");
  EXPECT_EQ(field_of(R"({"kind": "moments", "schedule": {"t": [1, 2], "v_t": [1]}})"),
            "schedule.v_t");
  EXPECT_EQ(field_of(R"({"kind": "moments", "schedule": {"t": [1]}, "mode": "fast"})"), "mode");
  EXPECT_EQ(field_of(R"({"kind": "moments", "schedule": {"t": "x"}})"), "schedule.t");
  EXPECT_THROW(parse_config("{not json"), ConfigError);
}

TEST(Config, RoundTrip) {
  ExperimentConfig c = parse_config(kSmall);
  c.marks = CategoricalMarks{{1.0, 2.0}};
  c.kernel.torus_period = 2.0;
  const std::string canon = canonical_json(c);
  const ExperimentConfig back = parse_config(canon);
  EXPECT_EQ(canonical_json(back), canon);
  EXPECT_EQ(config_hash(back), config_hash(c));
  EXPECT_EQ(config_hash(c).size(), 16u);
  ExperimentConfig other = c;
  other.seed = 4;
  EXPECT_NE(config_hash(other), config_hash(c));
}

TEST(Run, MomentsSmoke) {
  const auto r = run_experiment(parse_config(kSmall));
  ASSERT_EQ(r.rows.size(), 1u);
  const auto& row = r.rows[0];
  EXPECT_TRUE(row.emp_mean && row.emp_var && row.theory_mean && row.theory_var);
  EXPECT_TRUE(row.ks && row.w1 && row.fourth_gap);
  EXPECT_FALSE(row.B.has_value());
  EXPECT_EQ(r.config_hash, config_hash(r.config));
  EXPECT_EQ(r.samples[0].size(), 100u);
}

TEST(Run, ScheduleEcho) {
  ExperimentConfig c = parse_config(kSmall);
  c.kind = ExperimentKind::clt_rate;
  c.t = {16, 32, 64, 128, 256, 512};
  c.theory = false;
  c.replicates = 20;
  const auto r = run_experiment(c);
  ASSERT_EQ(r.rows.size(), 6u);
  for (std::size_t i = 1; i < r.rows.size(); ++i) EXPECT_GT(r.rows[i].t, r.rows[i - 1].t);
}

TEST(Run, DeterministicAcrossWorkers) {
  const ExperimentConfig c = parse_config(kSmall);
  const auto a = to_csv(run_experiment(c, 1).rows);
  const auto b = to_csv(run_experiment(c, 1).rows);
  const auto d = to_csv(run_experiment(c, 3).rows);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a, d);
}

TEST(Run, ChaosIdentityEmptyTheoryCells) {
  const auto c = parse_config(R"({
    "kind": "chaos_identity",
    "kernel": {"family": "gilbert", "delta": 0.1, "torus_period": 1.0},
    "window": {"shape": "box", "dim": 1, "extent": 0.5, "center": [0.5]},
    "schedule": {"t": [10]},
    "replicates": 50
  })");
  const auto r = run_experiment(c);
  ASSERT_EQ(r.rows.size(), 1u);
  EXPECT_EQ(r.rows[0].bound_violations, 0);
  EXPECT_FALSE(r.rows[0].theory_var.has_value());
  const std::string csv = to_csv(r.rows);
  EXPECT_EQ(csv.find("nan"), std::string::npos);
  EXPECT_EQ(csv.find("NaN"), std::string::npos);
  EXPECT_NE(csv.find(",,"), std::string::npos);
}

TEST(Run, ChaosIdentityNeedsClosedForm) {
  auto c = parse_config(kSmall);
  c.kind = ExperimentKind::chaos_identity;
  EXPECT_THROW(run_experiment(c), ConfigError);
}

TEST(Run, DomainMismatchIsConfigError) {
  auto c = parse_config(kSmall);
  c.kernel.family = "line_intersection";
  EXPECT_THROW(run_experiment(c), ConfigError);
  c = parse_config(kSmall);
  c.kernel.family = "nope";
  EXPECT_THROW(run_experiment(c), ConfigError);
}

TEST(Output, HeaderOnlyAndRoundTrips) {
  const std::string header = to_csv({});
  EXPECT_EQ(header,
            "kind,t,v_t,replicates,seed,emp_mean,emp_mean_se,emp_var,emp_var_se,theory_mean,"
            "theory_var,ks,w1,fourth_gap,B,B_prime,regime,bound_violations\n");
  EXPECT_TRUE(parse_csv(header).empty());
  ResultRow row;
  row.kind = "moments";
  row.t = 12.5;
  row.replicates = 10;
  row.seed = 99;
  row.emp_mean = 1.0 / 3.0;
  row.ks = 0.125;
  row.regime = "small";
  row.bound_violations = 2;
  ResultRow bare;
  bare.kind = "chaos_identity";
  bare.t = 3;
  const std::vector<ResultRow> rows = {row, bare};
  EXPECT_EQ(parse_jsonl(to_jsonl(rows)), rows);
  const auto csv_back = parse_csv(to_csv(rows));
  ASSERT_EQ(csv_back.size(), 2u);
  EXPECT_EQ(to_csv(csv_back), to_csv(rows));
  EXPECT_NE(to_csv(rows).find("0.333333333333,"), std::string::npos);
}

TEST(Output, WritesFilesAndPlots) {
  auto c = parse_config(kSmall);
  c.t = {20, 40, 80};
  c.replicates = 30;
  const auto r = run_experiment(c);
  const fs::path dir = temp_dir("write");
  write_results(r, dir, OutputFormat::jsonl, true);
  EXPECT_TRUE(fs::exists(dir / "results.jsonl"));
  EXPECT_TRUE(fs::exists(dir / "meta.json"));
  EXPECT_TRUE(fs::exists(dir / "series_emp_var.dat"));
  EXPECT_NE(read_file(dir / "rates.svg").find("<svg"), std::string::npos);
  EXPECT_NE(read_file(dir / "meta.json").find(r.config_hash), std::string::npos);
  EXPECT_EQ(parse_jsonl(read_file(dir / "results.jsonl")), r.rows);
  EXPECT_THROW(write_results(r, "/proc/pustat_not_writable", OutputFormat::csv, false),
               std::runtime_error);
  fs::remove_all(dir);
}

TEST(Output, GoldenSchema) {
  const fs::path src = PUSTAT_SOURCE_DIR;
  const auto r = run_experiment(load_config(src / "tests/golden/pinned.json"));
  EXPECT_EQ(to_csv(r.rows), read_file(src / "tests/golden/pinned.csv"));
}

int cli(const std::string& args) {
  const std::string cmd = std::string(PUSTAT_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

TEST(Cli, ExitCodes) {
  const fs::path dir = temp_dir("cli");
  fs::create_directories(dir);
  {
    std::ofstream(dir / "good.json") << kSmall;
    std::ofstream(dir / "bad.json") << R"({"kind": "moments", "schedule": {"t": []}})";
    std::ofstream(dir / "unstable.json") << R"({
      "kind": "moments", "kernel": {"family": "gilbert", "delta": 0.05},
      "window": {"shape": "box", "dim": 2, "extent": 0.5},
      "schedule": {"t": [40]}, "replicates": 5, "mc_samples": 200, "seed": 1})";
  }
  const std::string d = dir.string();
  EXPECT_EQ(cli("moments --config " + d + "/good.json --out " + d + "/a"), 0);
  EXPECT_EQ(cli("simulate --config " + d + "/good.json --out " + d + "/b --workers 2"), 0);
  EXPECT_EQ(read_file(dir / "a/results.csv"), read_file(dir / "b/results.csv"));
  EXPECT_EQ(cli("report " + d + "/a/results.csv"), 0);
  EXPECT_EQ(cli("moments --config " + d + "/bad.json --out " + d + "/c"), 2);
  EXPECT_EQ(cli("clt-rate --config " + d + "/good.json --out " + d + "/c"), 2);
  EXPECT_EQ(cli("moments --config " + d + "/good.json --format xml"), 2);
  EXPECT_EQ(cli("moments --config " + d + "/unstable.json --out " + d + "/u"), 3);
  EXPECT_EQ(cli("moments --config " + d + "/good.json --seed 11 --format jsonl --out " + d + "/j"),
            0);
  EXPECT_TRUE(fs::exists(dir / "j/results.jsonl"));
  fs::remove_all(dir);
}

}  // namespace
}  // namespace pustat
