#include <gtest/gtest.h>

#include <sys/wait.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "rankbench/dataset.hpp"
#include "rankbench/rankings.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path kTmp = fs::path(RANKBENCH_TEST_TMP) / "cli";

const char* kSmall = R"(seed = 7

[synthetic]
n_samples = 600
pareto = 6
intercept = -1

[model]
kind = logreg
C = 1.0

[rank]
methods = bsp, bmp, fsp, coefficients, shap, sage, lime
n_permute = 5
n_permute_multipass = 3
shap_samples = 8
shap_instances = 15
sage_samples = 64
lime_instances = 10
top_k = 6
top3 = bsp, bmp, fsp

[experiment]
n_subsets = 50
k = 3
k_max = 6
n_boot = 20
ci_boot = 100

[complexity]
n_boot = 3

[select]
n_boot = 100
)";

struct Result {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path write_config(const std::string& name, const std::string& text) {
  fs::create_directories(kTmp);
  const auto path = kTmp / name;
  std::ofstream(path) << text;
  return path;
}

Result run(const std::string& args) {
  fs::create_directories(kTmp);
  const auto out = kTmp / "stdout.txt";
  const auto err = kTmp / "stderr.txt";
  const std::string cmd =
      std::string("\"") + RANKBENCH_CLI + "\" " + args + " >\"" + out.string() + "\" 2>\"" + err.string() + "\"";
  const int status = std::system(cmd.c_str());
  Result r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

std::string with_methods(const std::string& methods) {
  std::string text = kSmall;
  const auto pos = text.find("methods = ");
  const auto end = text.find('\n', pos);
  text.replace(pos, end - pos, "methods = " + methods);
  const auto top3 = text.find("top3 = ");
  text.erase(top3, text.find('\n', top3) - top3 + 1);
  return text;
}

}  // namespace

TEST(Cli, RankIsDeterministicAcrossRunsAndWorkers) {
  const auto cfg = write_config("small.ini", kSmall);
  fs::remove_all(kTmp / "rank_a");
  fs::remove_all(kTmp / "rank_b");
  const auto a = run("rank --config " + cfg.string() + " --out " + (kTmp / "rank_a").string() + " --workers 1");
  ASSERT_EQ(a.code, 0) << a.err;
  const auto b = run("rank --config " + cfg.string() + " --out " + (kTmp / "rank_b").string() + " --workers 3");
  ASSERT_EQ(b.code, 0) << b.err;
  for (const auto* name : {"rank.json", "model.json", "rankings.csv", "rankings.svg", "resolved_config.ini"}) {
    ASSERT_TRUE(fs::exists(kTmp / "rank_a" / name)) << name;
    EXPECT_EQ(slurp(kTmp / "rank_a" / name), slurp(kTmp / "rank_b" / name)) << name;
  }
  const auto doc = nlohmann::json::parse(slurp(kTmp / "rank_a" / "rank.json"));
  EXPECT_EQ(doc.at("scorecards").size(), 7u);
  EXPECT_TRUE(doc.contains("uncertainty_ratio"));
  for (const auto& entry : fs::directory_iterator(kTmp / "rank_a")) {
    EXPECT_EQ(entry.path().extension().string().find("partial"), std::string::npos);
  }
}

TEST(Cli, UnknownMethodExitsTwoAndListsValidNames) {
  const auto cfg = write_config("bad_method.ini", with_methods("bsp, shapely"));
  const auto r = run("rank --config " + cfg.string() + " --out " + (kTmp / "bad").string());
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("shapely"), std::string::npos);
  for (const auto& m : rankbench::ranking_methods()) EXPECT_NE(r.err.find(m), std::string::npos) << m;
}

TEST(Cli, ModelSpecificMethodNeedsMatchingModel) {
  const auto cfg = write_config("gini_logreg.ini", with_methods("bsp, gini"));
  const auto r = run("rank --config " + cfg.string() + " --out " + (kTmp / "gini").string());
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("gini"), std::string::npos);
}

TEST(Cli, UsageAndConfigErrorsExitTwo) {
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("rank").code, 2);
  EXPECT_EQ(run("rank --config /nonexistent.ini").code, 2);
  EXPECT_EQ(run("teleport --config x").code, 2);
  const auto cfg = write_config("small_fmt.ini", kSmall);
  EXPECT_EQ(run("rank --config " + cfg.string() + " --format pdf").code, 2);

  std::string unseeded = kSmall;
  unseeded.replace(unseeded.find("seed = 7"), 8, "");
  const auto no_seed = write_config("no_seed.ini", unseeded);
  const auto r = run("synth --config " + no_seed.string() + " --out " + (kTmp / "noseed").string());
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("seed"), std::string::npos);
  EXPECT_EQ(run("synth --config " + no_seed.string() + " --seed 3 --out " + (kTmp / "seeded").string()).code, 0);

  const auto typo = write_config("typo.ini", std::string(kSmall) + "[rank]\n");
  const auto t = run("rank --config " + typo.string());
  EXPECT_EQ(t.code, 2);
  EXPECT_NE(t.err.find("line"), std::string::npos);
}

TEST(Cli, SelectWithNothingToDropKeepsEverything) {
  std::string text = kSmall;
  text.replace(text.find("[select]\n"), 9, "[select]\nC = 1000000\n");
  const auto cfg = write_config("select_all.ini", text);
  fs::remove_all(kTmp / "select");
  const auto r = run("select --config " + cfg.string() + " --out " + (kTmp / "select").string());
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = nlohmann::json::parse(slurp(kTmp / "select" / "select.json"));
  const auto& report = doc.at("report");
  EXPECT_TRUE(report.at("dropped_l1").empty());
  EXPECT_TRUE(report.at("dropped_manual").empty());
  EXPECT_EQ(report.at("retained").size(), 6u);
  EXPECT_EQ(report.at("before"), report.at("after"));
  EXPECT_EQ(report.at("naupdc_difference").get<double>(), 0.0);
}

TEST(Cli, FaithfulnessSmallRunIsFastAndFormatFiltered) {
  const auto cfg = write_config("faith.ini", kSmall);
  fs::remove_all(kTmp / "faith");
  const auto start = std::chrono::steady_clock::now();
  const auto r = run("faithfulness --config " + cfg.string() + " --out " + (kTmp / "faith").string() +
                     " --format json --workers 1");
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_LT(seconds, 60.0);
  EXPECT_TRUE(fs::exists(kTmp / "faith" / "faithfulness.json"));
  EXPECT_FALSE(fs::exists(kTmp / "faith" / "records.csv"));
  EXPECT_FALSE(fs::exists(kTmp / "faith" / "pareto.svg"));
  const auto doc = nlohmann::json::parse(slurp(kTmp / "faith" / "faithfulness.json"));
  EXPECT_EQ(doc.at("report").at("records").size(), 50u);
}

TEST(Cli, SynthWritesLoadableCsv) {
  const auto cfg = write_config("synth.ini", kSmall);
  fs::remove_all(kTmp / "synth");
  const auto r = run("synth --config " + cfg.string() + " --out " + (kTmp / "synth").string());
  ASSERT_EQ(r.code, 0) << r.err;
  const auto d = rankbench::load_csv(kTmp / "synth" / "synthetic.csv", "target");
  EXPECT_EQ(d.rows(), 600);
  EXPECT_EQ(d.cols(), 6);
  const auto truth = nlohmann::json::parse(slurp(kTmp / "synth" / "ground_truth.json"));
  EXPECT_EQ(truth.at("seed").get<int>(), 7);
}
