#include "tucker/cli.hpp"
#include "tucker/dtns_io.hpp"
#include "tucker/solvers.hpp"
#include "tucker/testbed.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace tucker;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct CliRun {
  int code = -1;
  std::string out;
  std::string err;
};

CliRun run(std::vector<std::string> args) {
  args.insert(args.begin(), "tucker_cli");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  CliRun r;
  r.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("tucker_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, DecomposeExactRankWritesFactorsAndSummary) {
  const auto r = run({"decompose", "--recipe", "exact:dims=20x18x16;ranks=3x4x2", "--algorithm", "shifted-sthosvd",
                      "--ranks", "3,4,2", "--oversample", "3", "--power", "2", "--seed", "5", "--out", path("o")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const json j = json::parse(r.out);
  EXPECT_EQ(j["algorithm"], "shifted-sthosvd");
  EXPECT_LE(j["relative_error"].get<double>(), 1e-9);
  EXPECT_EQ(j["order"], (std::vector<int>{1, 2, 3}));
  EXPECT_EQ(j["s"], (std::vector<int>{3, 3, 3}));
  EXPECT_EQ(j["q"], 2);
  EXPECT_EQ(j["seed"], 5);
  EXPECT_EQ(j["shift_trace"].size(), 3u);
  EXPECT_EQ(j["shift_trace"][0]["mode"], 1);

  std::ifstream summary(path("o/summary.json"));
  EXPECT_EQ(json::parse(summary), j);

  TuckerFactorization f{load_dtns(path("o/core.dtns")), {}};
  for (int k = 1; k <= 3; ++k) f.factors.push_back(load_matrix_dtns(path("o/factor_" + std::to_string(k) + ".dtns")));
  EXPECT_EQ(f.core.dims(), (Dims{3, 4, 2}));
  const DenseTensor t = generate(parse_recipe("exact:dims=20x18x16;ranks=3x4x2"), tensor_seed(5));
  EXPECT_NEAR(relative_error(t, f), j["relative_error"].get<double>(), 1e-12);
}

TEST_F(CliTest, DecomposeFromFileWithOrderAndBroadcastRank) {
  ASSERT_EQ(run({"gen", "--recipe", "b-fast:n=15", "--seed", "3", "--out", path("t.dtns")}).code, kExitOk);
  const auto r = run({"decompose", "--input", path("t.dtns"), "--algorithm", "sthosvd", "--ranks", "4", "--order",
                      "3,1,2", "--seed", "1", "--out", path("o")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const json j = json::parse(r.out);
  EXPECT_EQ(j["ranks"], (std::vector<int>{4, 4, 4}));
  EXPECT_EQ(j["order"], (std::vector<int>{3, 1, 2}));
  EXPECT_FALSE(j.contains("s"));
  EXPECT_EQ(j["input"], "file:" + path("t.dtns"));
  const DenseTensor t = load_dtns(path("t.dtns"));
  EXPECT_EQ(t, generate(parse_recipe("b-fast:n=15"), tensor_seed(3)));
  EXPECT_NEAR(j["relative_error"].get<double>(), relative_error(t, sthosvd(t, {4, 4, 4}, {2, 0, 1})), 1e-14);
}

TEST_F(CliTest, PveToleranceReportsRealizedIterationTuple) {
  const auto r = run({"decompose", "--recipe", "exact:dims=30x30x30;ranks=4x4x4", "--algorithm", "shifted-sthosvd",
                      "--ranks", "4", "--oversample", "3", "--pve-tol", "0.5", "--qmax", "50", "--seed", "2", "--out",
                      path("o")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const json j = json::parse(r.out);
  EXPECT_EQ(j["algorithm"], "pve");
  ASSERT_TRUE(j["q"].is_array());
  EXPECT_EQ(j["q"].size(), 3u);
  for (const auto& q : j["q"]) EXPECT_LE(q.get<int>(), 3);
  EXPECT_EQ(j["pve_tol"], 0.5);
  EXPECT_EQ(j["qmax"], 50);
}

TEST_F(CliTest, MissingSeedIsDrawnAndLogged) {
  const auto r = run({"decompose", "--recipe", "b-fast:n=10", "--algorithm", "rand-thosvd", "--ranks", "2",
                      "--oversample", "2", "--out", path("o")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(r.err.rfind("seed: ", 0), 0u);
  const json j = json::parse(r.out);
  EXPECT_EQ(r.err, "seed: " + std::to_string(j["seed"].get<std::uint64_t>()) + "\n");
}

TEST_F(CliTest, BenchCsvIsByteIdenticalWithoutTiming) {
  const std::vector<std::string> args = {"bench",  "--recipe", "b-slow:n=12", "--algorithm", "rand-sthosvd,shifted-sthosvd",
                                         "--ranks", "2",       "--ranks",     "3",           "--oversample",
                                         "2",      "--power",  "2",           "--trials",    "3",
                                         "--seed", "9",        "--no-timing"};
  const auto a = run(args);
  const auto b = run(args);
  ASSERT_EQ(a.code, kExitOk) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(std::count(a.out.begin(), a.out.end(), '\n'), 13);

  auto with_file = args;
  with_file.insert(with_file.end(), {"--out", path("bench.csv"), "--serial-cells"});
  ASSERT_EQ(run(with_file).code, kExitOk);
  std::ifstream in(path("bench.csv"), std::ios::binary);
  const std::string file((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  EXPECT_EQ(file, a.out);
}

TEST_F(CliTest, BenchTimingColumnFilledByDefault) {
  const auto r = run({"bench", "--recipe", "b-slow:n=10", "--algorithm", "thosvd", "--ranks", "2", "--seed", "1"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  std::istringstream row(r.out.substr(r.out.find('\n') + 1));
  std::vector<std::string> fields;
  for (std::string f; std::getline(row, f, ',');) fields.push_back(f);
  ASSERT_GE(fields.size(), 9u);
  EXPECT_TRUE(fields[3].empty());  // s
  EXPECT_TRUE(fields[4].empty());  // q
  EXPECT_FALSE(fields[8].empty());
  EXPECT_GE(std::stod(fields[8]), 0.0);
}

TEST_F(CliTest, BoundWithLargeKnobsHasFloorNearOne) {
  const auto r = run({"bound", "--recipe", "b-slow:n=12", "--algorithm", "shifted-thosvd", "--ranks", "2",
                      "--oversample", "2", "--power", "2", "--seed", "4", "--j", "1", "--beta", "10", "--gamma",
                      "10"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const json j = json::parse(r.out);
  EXPECT_EQ(j["bound_kind"], "randomized-thosvd");
  EXPECT_TRUE(j["hypotheses_hold"].get<bool>());
  EXPECT_GT(j["probability_floor"].get<double>(), 0.99);
  EXPECT_TRUE(j["bound_holds"].get<bool>());
  EXPECT_LE(j["observed_error"].get<double>(), j["bound"].get<double>());
}

TEST_F(CliTest, BoundFromSummaryMatchesDirectRun) {
  ASSERT_EQ(run({"decompose", "--recipe", "b-slow:n=12", "--algorithm", "rand-sthosvd", "--ranks", "3",
                 "--oversample", "2", "--power", "1", "--seed", "8", "--out", path("o")})
                .code,
            kExitOk);
  const auto from_summary = run({"bound", "--summary", path("o/summary.json"), "--j", "1"});
  const auto direct = run({"bound", "--recipe", "b-slow:n=12", "--algorithm", "rand-sthosvd", "--ranks", "3",
                           "--oversample", "2", "--power", "1", "--seed", "8", "--j", "1"});
  ASSERT_EQ(from_summary.code, kExitOk) << from_summary.err;
  ASSERT_EQ(direct.code, kExitOk) << direct.err;
  EXPECT_EQ(json::parse(from_summary.out)["bound"], json::parse(direct.out)["bound"]);
  EXPECT_EQ(json::parse(from_summary.out)["observed_error"], json::parse(direct.out)["observed_error"]);
}

TEST_F(CliTest, DeterministicBound) {
  const auto r = run({"bound", "--recipe", "b-fast:n=10", "--algorithm", "thosvd", "--ranks", "3", "--seed", "1"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const json j = json::parse(r.out);
  EXPECT_EQ(j["bound_kind"], "deterministic");
  EXPECT_TRUE(j["bound_holds"].get<bool>());
}

TEST_F(CliTest, ViolatedHypothesesExitFive) {
  // l + r = 12 exceeds n = 10.
  const auto r = run({"bound", "--recipe", "b-fast:n=10", "--algorithm", "rand-thosvd", "--ranks", "4", "--oversample",
                      "4", "--seed", "1"});
  EXPECT_EQ(r.code, kExitHypothesis);
  EXPECT_FALSE(json::parse(r.out)["hypotheses_hold"].get<bool>());
  EXPECT_NE(r.err.find("hypotheses"), std::string::npos);
}

TEST_F(CliTest, ConfigErrorsExitTwo) {
  EXPECT_EQ(run({"decompose", "--recipe", "b-fast:n=10", "--algorithm", "hooi", "--ranks", "2"}).code, kExitConfig);
  EXPECT_EQ(run({"decompose", "--recipe", "b-fast:n=10", "--algorithm", "thosvd", "--ranks", "20", "--seed", "1",
                 "--out", path("o")})
                .code,
            kExitConfig);
  EXPECT_EQ(run({"decompose", "--recipe", "b-fast:n=10", "--algorithm", "thosvd", "--ranks", "2,2", "--seed", "1"}).code,
            kExitConfig);
  EXPECT_EQ(run({"decompose", "--algorithm", "thosvd", "--ranks", "2", "--seed", "1"}).code, kExitConfig);
  EXPECT_EQ(run({"decompose", "--recipe", "zz", "--algorithm", "thosvd", "--ranks", "2", "--seed", "1"}).code,
            kExitConfig);
  EXPECT_EQ(run({"decompose", "--recipe", "b-fast:n=10", "--algorithm", "rand-thosvd", "--ranks", "2", "--sketch",
                 "cauchy", "--seed", "1"})
                .code,
            kExitConfig);
  EXPECT_EQ(run({"decompose", "--recipe", "b-fast:n=10", "--algorithm", "rand-thosvd", "--ranks", "2", "--order",
                 "0,1,2", "--seed", "1"})
                .code,
            kExitConfig);
  EXPECT_EQ(run({"bound", "--recipe", "b-fast:n=10", "--algorithm", "holistic", "--ranks", "2", "--oversample", "2",
                 "--seed", "1"})
                .code,
            kExitConfig);
  EXPECT_EQ(run({"frobnicate"}).code, kExitConfig);
  EXPECT_EQ(run({"decompose", "--bogus"}).code, kExitConfig);
}

TEST_F(CliTest, IoErrorsExitThree) {
  EXPECT_EQ(run({"decompose", "--input", path("missing.dtns"), "--algorithm", "thosvd", "--ranks", "2", "--seed",
                 "1"})
                .code,
            kExitIo);
  std::ofstream(path("junk.dtns")) << "not a tensor";
  EXPECT_EQ(run({"decompose", "--input", path("junk.dtns"), "--algorithm", "thosvd", "--ranks", "2", "--seed", "1"})
                .code,
            kExitIo);
  EXPECT_EQ(run({"bound", "--summary", path("missing.json")}).code, kExitIo);
}

TEST_F(CliTest, DegenerateSketchExitsFour) {
  // The holistic solver orthonormalizes the sketch; an all-zero tensor leaves
  // no range to keep.
  save_dtns(path("zero.dtns"), DenseTensor({6, 6, 6}));
  const auto r = run({"decompose", "--input", path("zero.dtns"), "--algorithm", "holistic", "--ranks", "2",
                      "--oversample", "1", "--seed", "1", "--out", path("o")});
  EXPECT_EQ(r.code, kExitSolver) << r.err;
}

TEST_F(CliTest, GenWritesRequestedRecipe) {
  const auto r = run({"gen", "--recipe", "c:dims=10x12x14", "--seed", "6", "--out", path("c.dtns")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(load_dtns(path("c.dtns")).dims(), (Dims{10, 12, 14}));
  EXPECT_EQ(run({"gen", "--recipe", "a:n=5"}).code, kExitConfig);
}

TEST_F(CliTest, HelpExitsZero) {
  const auto r = run({"--help"});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_NE(r.out.find("decompose"), std::string::npos);
}
