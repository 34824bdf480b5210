#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include <gtest/gtest.h>

#include "iet/experiment.hpp"

using namespace iet;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("ietk_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

int run(const std::string& args) {
  const std::string cmd = std::string(IETK_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Json, ScalarRoundTrip) {
  for (const Scalar& s : {Scalar::rational(mpz_class(3), mpz_class(7)), Scalar::quadratic(1, -3, 2, 5),
                          Scalar::rational(mpz_class("123456789012345678901234567890"), mpz_class(7))}) {
    EXPECT_EQ(scalar_from_json(scalar_to_json(s)), s);
  }
  EXPECT_EQ(scalar_from_json("1e-4"), Scalar::rational(mpz_class(1), mpz_class(10000)));
}

TEST(Json, InstanceRoundTrip) {
  for (const auto& name : builtin_names()) {
    const Iet t = builtin_instance(name);
    const Iet u = iet_from_json(iet_to_json(t));
    EXPECT_EQ(u.comb(), t.comb());
    EXPECT_EQ(u.lengths(), t.lengths());
  }
  const auto j = nlohmann::json::parse(
      R"({"alphabet":["A","B","C"],"pi0":["A","B","C"],"pi1":["C","B","A"],)"
      R"("lengths":[{"kind":"rational","num":1,"den":3},"1/3",{"kind":"rational","num":1,"den":3}]})");
  EXPECT_EQ(iet_from_json(j).length(1), Scalar::rational(mpz_class(1), mpz_class(3)));
}

TEST(Json, RoofRoundTrip) {
  const Iet t = builtin_instance("genus2-loop");
  RoofSpec s = symmetric_single_pair(t);
  s.g.push_back({1, Real(0.125), Real(-0.5)});
  const RoofSpec u = roof_from_json(t, roof_to_json(t, s));
  EXPECT_EQ(u.c_plus, s.c_plus);
  EXPECT_EQ(u.c_minus, s.c_minus);
  ASSERT_EQ(u.g.size(), 1u);
  EXPECT_EQ(u.g[0].freq, 1);
  EXPECT_EQ(u.g[0].b.to_double(), -0.5);
}

TEST(Hash, Fnv1aVectors) {
  EXPECT_EQ(fnv1a_hex(""), "cbf29ce484222325");
  EXPECT_EQ(fnv1a_hex("a"), "af63dc4c8601ec8c");
  EXPECT_EQ(fnv1a_hex("foobar"), "85944171f73967e8");
}

TEST(Commands, InductGoldenMmy) {
  ExperimentConfig cfg;
  cfg.out = scratch("induct").string();
  std::ostringstream err;
  ASSERT_EQ(cmd_induct(cfg, err), kExitOk);
  const auto blocks = nlohmann::json::parse(slurp(fs::path(cfg.out) / "blocks.json"));
  ASSERT_EQ(blocks["norms"].size(), 50u);
  for (const auto& n : blocks["norms"]) EXPECT_EQ(n.get<long>(), 1);
  std::ifstream trace(fs::path(cfg.out) / "trace.jsonl");
  std::string line;
  std::getline(trace, line);
  EXPECT_EQ(nlohmann::json::parse(line)["version"], kVersion);
  long records = 0;
  while (std::getline(trace, line)) {
    const auto rec = nlohmann::json::parse(line);
    EXPECT_EQ(rec["step"].get<long>(), records++);
  }
  EXPECT_EQ(records, blocks["times"].back().get<long>());
}

TEST(Commands, InductExitCodes) {
  ExperimentConfig cfg;
  cfg.out = scratch("induct_codes").string();
  std::ostringstream err;
  cfg.instance = "euclid";
  EXPECT_EQ(cmd_induct(cfg, err), kExitInduction);
  EXPECT_NE(err.str().find("TiedLengths at step 2"), std::string::npos);
  cfg.instance = "golden";
  cfg.depth = 0;
  EXPECT_EQ(cmd_induct(cfg, err), kExitOk);
  std::ifstream trace(fs::path(cfg.out) / "trace.jsonl");
  std::string line;
  long lines = 0;
  while (std::getline(trace, line)) ++lines;
  EXPECT_EQ(lines, 1);  // header only
}

TEST(Commands, Certify) {
  ExperimentConfig cfg;
  cfg.out = scratch("certify").string();
  std::ostringstream err;
  ASSERT_EQ(cmd_certify(cfg, err), kExitOk);
  auto cert = nlohmann::json::parse(slurp(fs::path(cfg.out) / "certificate.json"));
  EXPECT_TRUE(cert["certified"].get<bool>());
  EXPECT_EQ(cert["periodic"]["period"], 2);
  EXPECT_TRUE(cert["audit"]["pass"].get<bool>());

  cfg.instance = "unbounded-quotients";
  cfg.K = 20;
  ASSERT_EQ(cmd_certify(cfg, err), kExitOk);
  cert = nlohmann::json::parse(slurp(fs::path(cfg.out) / "certificate.json"));
  EXPECT_FALSE(cert["certified"].get<bool>());
  EXPECT_GE(cert["C_K"].get<long>(), 10);
  cfg.K = 0;
  EXPECT_EQ(cmd_certify(cfg, err), kExitUsage);
}

TEST(Commands, SweepZeroPairsAndDeterminism) {
  ExperimentConfig cfg;
  cfg.samples = 100;
  cfg.scales = {"1e-4"};
  cfg.pairs = 0;
  cfg.out = scratch("sweep0").string();
  std::ostringstream err;
  EXPECT_EQ(cmd_sweep(cfg, err), kExitOk);
  const auto s = nlohmann::json::parse(slurp(fs::path(cfg.out) / "sweep_summary.json"));
  EXPECT_EQ(s["pairs"], 0);

  cfg.pairs = 6;
  cfg.out = scratch("sweep_a").string();
  cfg.jobs = 1;
  const int ca = cmd_sweep(cfg, err);
  const std::string out_a = cfg.out;
  cfg.out = scratch("sweep_b").string();
  cfg.jobs = 3;
  EXPECT_EQ(cmd_sweep(cfg, err), ca);
  for (const char* f : {"sweep_summary.json", "sweep_pairs.csv"}) {
    EXPECT_EQ(slurp(fs::path(out_a) / f), slurp(fs::path(cfg.out) / f)) << f;
  }
  EXPECT_NE(slurp(fs::path(cfg.out) / "sweep_pairs.csv").find("# config_hash="), std::string::npos);
}

TEST(Commands, StrictModeAtDeskScaleFails) {
  ExperimentConfig cfg;
  cfg.samples = 100;
  cfg.scales = {"1e-4"};
  cfg.pairs = 3;
  cfg.mode = "strict";
  cfg.out = scratch("strict").string();
  std::ostringstream err;
  EXPECT_EQ(cmd_sweep(cfg, err), kExitSweep);
  EXPECT_TRUE(fs::exists(fs::path(cfg.out) / "witnesses" / "pair_0.json"));
  const auto w = nlohmann::json::parse(slurp(fs::path(cfg.out) / "witnesses" / "pair_0.json"));
  EXPECT_EQ(w["status"], "PairTooFar");
  EXPECT_TRUE(w.contains("instance") && w.contains("roof") && w.contains("constants"));
}

TEST(Binary, ExitCodes) {
  const std::string out = scratch("bin").string();
  EXPECT_EQ(run("certify --K 0 --out " + out), kExitUsage);
  EXPECT_EQ(run("induct --instance euclid --out " + out), kExitInduction);
  EXPECT_EQ(run("induct --instance golden --depth 5 --out " + out), kExitOk);
  EXPECT_EQ(run("sweep --mode sideways --out " + out), kExitUsage);
  EXPECT_EQ(run("frobnicate"), kExitUsage);
  EXPECT_EQ(run("induct --instance nosuchfile.json --out " + out), kExitUsage);
}
