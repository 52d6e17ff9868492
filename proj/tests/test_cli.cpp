#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "tdas/cli.hpp"
#include "tdas/tensor_io.hpp"

namespace fs = std::filesystem;
using namespace tdas;

namespace {

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun tdas_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("tdas_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string p(const std::string& name) const { return (dir_ / name).string(); }

  void make_data(const std::string& name, const std::string& kind = "low_freq_blobs", const std::string& count = "12") {
    const CliRun r = tdas_cli({"make-data", "--out", p(name), "--kind", kind, "--count", count, "--shape", "1,8,8", "--seed", "5"});
    ASSERT_EQ(r.code, 0) << r.err;
  }

  fs::path dir_;
};

std::vector<std::string> sample_args(const std::string& mode, const std::string& data, const std::string& out) {
  return {"sample", mode, "--data", data, "--out", out, "--iterations", "40", "--levels", "4", "--count", "3", "--seed", "9"};
}

}  // namespace

TEST_F(CliTest, MakeDataWritesDatasetAndManifest) {
  make_data("data");
  const ImageDataset ds = load_dataset(p("data"));
  EXPECT_EQ(ds.size(), 12u);
  EXPECT_EQ(ds.shape(), (Shape{1, 8, 8}));
  const auto m = read_json(p("data/run_manifest.json"));
  EXPECT_EQ(m["command"], "make-data");
  EXPECT_EQ(m["version"], cli::kVersion);
  EXPECT_EQ(m["seed"], 5);
  EXPECT_TRUE(m["timings"].contains("generate"));
  EXPECT_EQ(m["config"]["kind"], "low_freq_blobs");
}

TEST_F(CliTest, IdentityTdasEqualsVanillaAndManifestReplays) {
  make_data("data");
  ASSERT_EQ(tdas_cli(sample_args("--vanilla", p("data"), p("v"))).code, 0);
  ASSERT_EQ(tdas_cli(sample_args("--tdas", p("data"), p("t"))).code, 0);
  const ImageDataset v = load_dataset(p("v")), t = load_dataset(p("t"));
  for (std::size_t i = 0; i < v.size(); ++i) EXPECT_EQ(v[i], t[i]);

  // Re-running from the manifest reproduces the samples bit for bit.
  const CliRun replay = tdas_cli({"sample", "--config", p("v/run_manifest.json"), "--out", p("replay")});
  ASSERT_EQ(replay.code, 0) << replay.err;
  const ImageDataset r = load_dataset(p("replay"));
  for (std::size_t i = 0; i < v.size(); ++i) EXPECT_EQ(v[i], r[i]);

  // jobs does not change the output.
  auto args = sample_args("--vanilla", p("data"), p("v4"));
  args.insert(args.end(), {"--jobs", "3"});
  ASSERT_EQ(tdas_cli(args).code, 0);
  const ImageDataset v4 = load_dataset(p("v4"));
  for (std::size_t i = 0; i < v.size(); ++i) EXPECT_EQ(v[i], v4[i]);
}

TEST_F(CliTest, ConfigFileWithFlagOverride) {
  make_data("data");
  {
    std::ofstream cfg(p("cfg.json"));
    cfg << R"({"data": ")" << p("data") << R"(", "iterations": 40, "levels": 4, "count": 2, "seed": 9, "vanilla": true})";
  }
  ASSERT_EQ(tdas_cli({"sample", "--config", p("cfg.json"), "--out", p("a")}).code, 0);
  ASSERT_EQ(tdas_cli({"sample", "--config", p("cfg.json"), "--out", p("b"), "--seed", "10"}).code, 0);
  const auto m = read_json(p("b/run_manifest.json"));
  EXPECT_EQ(m["seed"], 10);
  EXPECT_EQ(m["config"]["iterations"], "40");
  EXPECT_NE(load_dataset(p("a"))[0], load_dataset(p("b"))[0]);

  {
    std::ofstream cfg(p("bad.json"));
    cfg << R"({"no-such-option": 1})";
  }
  const CliRun bad = tdas_cli({"sample", "--vanilla", "--config", p("bad.json"), "--out", p("c")});
  EXPECT_EQ(bad.code, 1);
}

TEST_F(CliTest, CalibrateOnIdenticalSetsGivesIdentityFilter) {
  make_data("data");
  const CliRun r = tdas_cli({"calibrate", "--reference", p("data"), "--generated", p("data"), "--out", p("cal")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto params = read_json(p("cal/params.json"));
  EXPECT_EQ(params["lambda1"], 1.0);
  EXPECT_EQ(params["lambda2"], 1.0);
  std::ifstream csv(p("cal/kappa.csv"));
  std::string header;
  std::getline(csv, header);
  EXPECT_EQ(header, "r,kappa");
  EXPECT_TRUE(fs::exists(p("cal/gamma.tdt")));

  // The parameter file feeds straight into sample --tdas.
  auto args = sample_args("--tdas", p("data"), p("t"));
  args.insert(args.end(), {"--filter", p("cal/params.json"), "--space-mask", "--export-images"});
  const CliRun s = tdas_cli(args);
  ASSERT_EQ(s.code, 0) << s.err;
  EXPECT_TRUE(fs::exists(p("t/item_00000.pgm")));
}

TEST_F(CliTest, StatsAndMetrics) {
  make_data("data");
  ASSERT_EQ(tdas_cli({"stats", "--samples", p("data"), "--transform", "dft", "--out", p("st")}).code, 0);
  EXPECT_EQ(load_tensor(p("st/power.tdt")).shape(), (Shape{1, 8, 8}));
  std::ifstream csv(p("st/radial.csv"));
  std::string header;
  std::getline(csv, header);
  EXPECT_EQ(header, "radius,power,cells");

  const CliRun m = tdas_cli({"validate", "--metrics", "--reference", p("data"), "--samples", p("data"), "--out", p("m")});
  ASSERT_EQ(m.code, 0) << m.err;
  const auto report = read_json(p("m/report.json"));
  EXPECT_EQ(report["results"][0]["spectral_deviation"], 0.0);
  EXPECT_EQ(report["results"][0]["sliced_wasserstein"], 0.0);
}

TEST_F(CliTest, ValidateHarnessesAndFailureCode) {
  CliRun r = tdas_cli({"validate", "--theorem1", "--shape", "1,8,8", "--out", p("t1")});
  EXPECT_EQ(r.code, 0) << r.err;
  r = tdas_cli({"validate", "--theorem1", "--map", "permutation", "--shape", "1,8,8", "--out", p("t1p")});
  EXPECT_EQ(r.code, 0) << r.err;
  r = tdas_cli({"validate", "--theorem2", "--draws", "1000", "--out", p("t2")});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(read_json(p("t2/report.json"))["pass"].get<bool>());

  r = tdas_cli({"validate", "--theorem1", "--shape", "1,8,8", "--tolerance", "-1", "--out", p("fail")});
  EXPECT_EQ(r.code, 2);
  EXPECT_TRUE(fs::exists(p("fail/run_manifest.json")));
  EXPECT_EQ(r.err.rfind("error: validation:", 0), 0u);
}

TEST_F(CliTest, Bench) {
  const CliRun r = tdas_cli({"bench", "--filter-overhead", "--sizes", "16,32", "--runs", "3", "--out", p("b")});
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream csv(p("b/bench.csv"));
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "size,channels,runs,median_ms,min_ms,ratio");
  int rows = 0;
  while (std::getline(csv, line)) ++rows;
  EXPECT_EQ(rows, 2);
}

TEST_F(CliTest, ErrorsAreSingleLinesWithExitCodeOne) {
  for (const auto& args : std::vector<std::vector<std::string>>{
           {"sample", "--vanilla", "--out", p("x"), "--no-such-flag"},
           {"sample", "--vanilla", "--out", p("x")},
           {"sample", "--vanilla", "--tdas", "--data", p("x"), "--out", p("x")},
           {"calibrate", "--reference", p("missing"), "--generated", p("missing"), "--out", p("x")},
           {"frobnicate"},
           {}}) {
    const CliRun r = tdas_cli(args);
    EXPECT_EQ(r.code, 1) << r.err;
    EXPECT_EQ(r.err.rfind("error: ", 0), 0u) << r.err;
    EXPECT_EQ(std::count(r.err.begin(), r.err.end(), '\n'), 1) << r.err;
  }
}

TEST_F(CliTest, HelpDocumentsEveryFlag) {
  for (const char* cmd : {"make-data", "sample", "calibrate", "stats", "validate", "bench"}) {
    const CliRun r = tdas_cli({cmd, "--help"});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("--out"), std::string::npos) << cmd;
    EXPECT_NE(r.out.find("--config"), std::string::npos) << cmd;
  }
  const CliRun r = tdas_cli({"sample", "--help"});
  for (const char* flag : {"--vanilla", "--tdas", "--iterations", "--accel", "--filter", "--space-mask", "--jobs"})
    EXPECT_NE(r.out.find(flag), std::string::npos) << flag;
}
