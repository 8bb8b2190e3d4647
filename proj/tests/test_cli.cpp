#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "cli.hpp"
#include "midal/io.hpp"
#include "midal/phantom.hpp"
#include "midal/speckle.hpp"

namespace midal {
namespace {

namespace fs = std::filesystem;

struct CliRun {
  int code;
  std::string out, err;
};

CliRun run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "midal");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("midal_cli_" + std::to_string(std::random_device{}()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
    clean_ = rescale_image(make_phantom("cli", 64, 64), 0.05, 1.0);
    write_pfm(clean_, path("clean.pfm"));
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
  ImageGrid clean_;
};

TEST_F(CliTest, SimulateRejectsFractionalLooksBelowOne) {
  const CliRun r = run_cli({"simulate", "--input", path("clean.pfm"), "--looks", "0.5", "--seed", "1",
                         "--xmin", "0.05", "--xmax", "1", "--output", path("y.pfm")});
  EXPECT_EQ(r.code, cli::kExitUsage);
  EXPECT_FALSE(fs::exists(path("y.pfm")));
}

TEST_F(CliTest, SimulateIsReproducibleAndSnrTracksLooks) {
  for (const char* name : {"a.pfm", "b.pfm"}) {
    const CliRun r = run_cli({"simulate", "--input", path("clean.pfm"), "--looks", "5", "--seed", "11",
                           "--xmin", "0.05", "--xmax", "1", "--output", path(name)});
    ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  }
  EXPECT_EQ(slurp(path("a.pfm")), slurp(path("b.pfm")));
  EXPECT_TRUE(fs::exists(path("a_clean.pfm")));

  const CliRun big = run_cli({"simulate", "--input", path("clean.pfm"), "--looks", "5", "--seed", "3",
                           "--xmin", "0.05", "--xmax", "1", "--output", path("c.pfm")});
  const auto at = big.out.find("empirical_snr: ");
  ASSERT_NE(at, std::string::npos);
  const double snr = std::stod(big.out.substr(at + 15));
  EXPECT_NEAR(snr, 5.0, 0.5);  // 4096 samples: SE of the SNR estimate is ~0.16 here
}

TEST_F(CliTest, DenoiseTinyLambdaReturnsInputAndMuDefaultsToLambda) {
  const ImageGrid noisy = apply_speckle(clean_, {3.0, 2});
  write_pfm(noisy, path("y.pfm"));
  const CliRun r = run_cli({"denoise", "--input", path("y.pfm"), "--looks", "3", "--lambda", "1e-8",
                         "--output", path("x.pfm"), "--trace", path("t.csv"), "--trace-json",
                         path("t.json"), "--preview", path("p.pgm")});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  const ImageGrid est = read_image(path("x.pfm"));
  const ImageGrid in = read_image(path("y.pfm"));
  for (std::size_t i = 0; i < est.size(); ++i) EXPECT_NEAR(est[i], in[i], 1e-3 * in[i]);

  std::ifstream csv(path("t.csv"));
  std::string header;
  std::getline(csv, header);
  EXPECT_EQ(header, "# looks=3 lambda=1e-08 mu=1e-08");
  const auto trace = nlohmann::json::parse(slurp(path("t.json")));
  EXPECT_EQ(trace.at("mu"), trace.at("lambda"));
  EXPECT_EQ(read_image(path("p.pgm")).shape(), est.shape());
}

TEST_F(CliTest, DenoiseRejectsBadParameters) {
  write_pfm(apply_speckle(clean_, {3.0, 2}), path("y.pfm"));
  EXPECT_EQ(run_cli({"denoise", "--input", path("y.pfm"), "--looks", "3", "--lambda", "-1",
                     "--output", path("x.pfm")})
                .code,
            cli::kExitUsage);
  EXPECT_EQ(run_cli({"denoise", "--input", path("missing.pfm"), "--looks", "3", "--lambda", "1",
                     "--output", path("x.pfm")})
                .code,
            cli::kExitRuntime);
}

TEST_F(CliTest, BenchmarkEmptyListAndDeterminism) {
  std::ofstream(path("empty.json")) << R"({"experiments": []})";
  ASSERT_EQ(run_cli({"benchmark", "--config", path("empty.json"), "--out", path("r0.json")}).code,
            cli::kExitOk);
  const auto empty = nlohmann::json::parse(slurp(path("r0.json")));
  EXPECT_TRUE(empty.at("experiments").empty());

  std::ofstream(path("one.json")) << R"({"experiments": [{"index": 1, "name": "tiny",
      "image": "phantom:tiny", "height": 24, "width": 24, "looks": 3, "xmin": 0.05, "xmax": 1,
      "lambda": 3, "mu": "auto", "stop_exponent": 3, "seed": 4, "inner_iters": 20}]})";
  for (const char* out : {"r1.json", "r2.json"}) {
    const CliRun r = run_cli({"benchmark", "--config", path("one.json"), "--out", path(out), "--seeds", "2"});
    ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  }
  EXPECT_EQ(slurp(path("r1.json")), slurp(path("r2.json")));

  std::ofstream(path("bad.json")) << R"({"experiments": [{"name": 3}]})";
  EXPECT_EQ(run_cli({"benchmark", "--config", path("bad.json"), "--out", path("r3.json")}).code,
            cli::kExitUsage);
}

TEST_F(CliTest, SweepSingletonAndUnsortedGrid) {
  write_pfm(apply_speckle(clean_, {3.0, 5}), path("y.pfm"));
  const CliRun one = run_cli({"sweep", "--noisy", path("y.pfm"), "--truth", path("clean.pfm"), "--looks",
                           "3", "--grid", "2.5", "--out", path("s1.json")});
  ASSERT_EQ(one.code, cli::kExitOk) << one.err;
  EXPECT_EQ(nlohmann::json::parse(slurp(path("s1.json"))).at("best_lambda"), 2.5);

  run_cli({"sweep", "--noisy", path("y.pfm"), "--truth", path("clean.pfm"), "--looks", "3", "--grid",
           "1,4,8", "--out", path("sa.json")});
  run_cli({"sweep", "--noisy", path("y.pfm"), "--truth", path("clean.pfm"), "--looks", "3", "--grid",
           "8, 1,4,4", "--out", path("sb.json")});
  EXPECT_EQ(slurp(path("sa.json")), slurp(path("sb.json")));

  EXPECT_EQ(run_cli({"sweep", "--noisy", path("y.pfm"), "--truth", path("clean.pfm"), "--looks", "3",
                     "--grid", "1,abc", "--out", path("sc.json")})
                .code,
            cli::kExitUsage);
}

TEST_F(CliTest, Metrics) {
  const CliRun same = run_cli({"metrics", "--estimate", path("clean.pfm"), "--truth", path("clean.pfm")});
  ASSERT_EQ(same.code, cli::kExitOk);
  const auto j = nlohmann::json::parse(same.out);
  EXPECT_EQ(j.at("err"), 0.0);
  EXPECT_EQ(j.at("mae"), 0.0);

  write_pfm(ImageGrid(4, 4, 1.0), path("one.pfm"));
  write_pfm(ImageGrid(4, 4, 1.1), path("onept1.pfm"));
  const auto k = nlohmann::json::parse(
      run_cli({"metrics", "--estimate", path("onept1.pfm"), "--truth", path("one.pfm")}).out);
  EXPECT_NEAR(k.at("err").get<double>(), 0.1, 1e-6);  // float32 storage

  write_pfm(ImageGrid(4, 5, 1.0), path("other.pfm"));
  EXPECT_EQ(run_cli({"metrics", "--estimate", path("other.pfm"), "--truth", path("one.pfm")}).code,
            cli::kExitUsage);
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(run_cli({"frobnicate"}).code, cli::kExitUsage);
  EXPECT_EQ(run_cli({}).code, cli::kExitUsage);
  EXPECT_EQ(run_cli({"denoise", "--looks", "3"}).code, cli::kExitUsage);
  EXPECT_EQ(run_cli({"--help"}).code, cli::kExitOk);
}

}  // namespace
}  // namespace midal
