#include <gtest/gtest.h>
#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "json.hpp"
#include "recdiv/baselines.hpp"
#include "recdiv/data.hpp"

namespace fs = std::filesystem;
using recdiv::cli::run_cli;

namespace {

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

nlohmann::json read_json(const fs::path& p) { return nlohmann::json::parse(slurp(p)); }

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::vector<std::string> cells(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

class CliTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = fs::temp_directory_path() / ("recdiv_cli_" + std::to_string(::getpid()));
    fs::remove_all(dir_);
    const CliRun s = cli({"synth", "--out-dir", dir_.string(), "--users", "120", "--items", "150",
                       "--candidates-per-user", "30", "--seed", "5"});
    ASSERT_EQ(s.code, 0) << s.err;
    const CliRun r = cli({"split", "--ratings", path("ratings.tsv"), "--out-dir", path("folds"),
                       "--min-ratings", "20", "--seed", "9"});
    ASSERT_EQ(r.code, 0) << r.err;
  }
  static void TearDownTestSuite() { fs::remove_all(dir_); }

  static std::string path(const std::string& name) { return (dir_ / name).string(); }

  // Candidates, training fold and the disjoint groupings.
  static std::vector<std::string> disjoint_inputs() {
    return {"--candidates", path("candidates.tsv"), "--train", path("folds/train_0.tsv"),
            "--user-groups", path("user_genders.tsv"), "--item-groups", path("item_studios.tsv")};
  }

  static std::vector<std::string> with(std::vector<std::string> head,
                                       const std::vector<std::string>& tail) {
    head.insert(head.end(), tail.begin(), tail.end());
    return head;
  }

  static fs::path dir_;
};

fs::path CliTest::dir_;

TEST_F(CliTest, SplitWritesTwoFilesPerFold) {
  int files = 0;
  for (const auto& e : fs::directory_iterator(dir_ / "folds")) files += e.is_regular_file();
  EXPECT_EQ(files, 10);
}

TEST_F(CliTest, SplitIsByteIdenticalForASeed) {
  ASSERT_EQ(cli({"split", "--ratings", path("ratings.tsv"), "--out-dir", path("folds2"),
                 "--min-ratings", "20", "--seed", "9"})
                .code,
            0);
  for (int f = 0; f < 5; ++f) {
    for (const char* side : {"train_", "test_"}) {
      const std::string name = side + std::to_string(f) + ".tsv";
      EXPECT_EQ(slurp(dir_ / "folds" / name), slurp(dir_ / "folds2" / name)) << name;
    }
  }
}

TEST_F(CliTest, SingleFoldIsAUsageError) {
  EXPECT_EQ(cli({"split", "--ratings", path("ratings.tsv"), "--out-dir", path("x"), "--folds",
                 "1"})
                .code,
            2);
}

TEST_F(CliTest, TopMatchesTopK) {
  ASSERT_EQ(cli(with({"diversify", "--method", "top", "--out", path("top.tsv")}, disjoint_inputs()))
                .code,
            0);
  const auto load = recdiv::load_candidates(path("candidates.tsv"), 0, {10, {}});
  std::ostringstream expected;
  recdiv::write_solution(expected, load.graph, recdiv::top_k(load.graph), "top");
  EXPECT_EQ(slurp(path("top.tsv")), expected.str());
}

TEST_F(CliTest, LogDecompositionAddsUp) {
  for (const char* method : {"greedy", "flow"}) {
    const std::string out = path(std::string(method) + ".tsv");
    const CliRun r = cli(with({"diversify", "--method", method, "--beta", "4", "--mu", "0.2",
                            "--out", out},
                           disjoint_inputs()));
    ASSERT_EQ(r.code, 0) << r.err;
    const auto log = read_json(out + ".log.json");
    const double rel = log["relevance"], tu = log["tudiv"], ti = log["tidiv"];
    EXPECT_NEAR(log["objective"].get<double>(), rel + 4 * tu + 0.2 * ti, 1e-9);
    EXPECT_EQ(log["thresholds"], "derived");
    EXPECT_GT(log["edges"].get<int>(), 0);
    EXPECT_TRUE(log.contains("wall_seconds"));
  }
}

TEST_F(CliTest, FlowBeatsGreedyOnDisjointGroups) {
  double objective[2];
  int i = 0;
  for (const char* method : {"greedy", "flow"}) {
    const std::string out = path(std::string("cmp_") + method + ".tsv");
    ASSERT_EQ(cli(with({"diversify", "--method", method, "--beta", "1", "--mu", "1", "--out", out},
                       disjoint_inputs()))
                  .code,
              0);
    objective[i++] = read_json(out + ".log.json")["objective"];
  }
  EXPECT_GE(objective[1], objective[0] - 1e-6);
}

TEST_F(CliTest, FlowWithZeroWeightsMatchesTop) {
  ASSERT_EQ(cli(with({"diversify", "--method", "top", "--out", path("t0.tsv")}, disjoint_inputs()))
                .code,
            0);
  ASSERT_EQ(cli(with({"diversify", "--method", "flow", "--beta", "0", "--mu", "0", "--out",
                      path("f0.tsv")},
                     disjoint_inputs()))
                .code,
            0);
  EXPECT_NEAR(read_json(path("t0.tsv.log.json"))["objective"].get<double>(),
              read_json(path("f0.tsv.log.json"))["objective"].get<double>(), 1e-6);
}

TEST_F(CliTest, ExitCodes) {
  // Overlapping groupings cannot go through the flow reduction.
  EXPECT_EQ(cli({"diversify", "--candidates", path("candidates.tsv"), "--train",
                 path("folds/train_0.tsv"), "--user-groups", path("user_demographics.tsv"),
                 "--item-groups", path("item_genres.tsv"), "--method", "flow", "--beta", "1",
                 "--mu", "1", "--out", path("o.tsv")})
                .code,
            3);
  // No thresholds and nothing to derive them from.
  EXPECT_EQ(cli({"diversify", "--candidates", path("candidates.tsv"), "--method", "greedy",
                 "--beta", "1", "--mu", "1", "--out", path("o.tsv")})
                .code,
            2);
  EXPECT_EQ(cli(with({"diversify", "--method", "mmr", "--out", path("o.tsv")}, disjoint_inputs()))
                .code,
            2);
  EXPECT_EQ(cli({"diversify", "--method", "top"}).code, 2);
  EXPECT_EQ(cli({"bogus"}).code, 2);
  EXPECT_EQ(cli({"--help"}).code, 0);

  std::ofstream(path("bad.tsv")) << "u1\tv1\t0.5\nu1\tv2\tnot-a-number\n";
  EXPECT_EQ(cli({"diversify", "--candidates", path("bad.tsv"), "--method", "top", "--out",
                 path("o.tsv")})
                .code,
            3);
}

TEST_F(CliTest, EvaluateReportsAllFieldsWithFullInputs) {
  ASSERT_EQ(cli(with({"diversify", "--method", "top", "--out", path("ev_top.tsv")},
                     disjoint_inputs()))
                .code,
            0);
  const CliRun r = cli(with({"evaluate", "--solution", path("ev_top.tsv"), "--test",
                          path("folds/test_0.tsv"), "--json", path("ev.json"), "--csv",
                          path("ev.csv")},
                         disjoint_inputs()));
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = read_json(path("ev.json"));
  EXPECT_EQ(j.size(), 12u);  // cutoff plus 11 metrics
  for (const auto& [key, value] : j.items()) EXPECT_FALSE(value.is_null()) << key;
  const auto csv = lines(slurp(path("ev.csv")));
  ASSERT_EQ(csv.size(), 2u);
  EXPECT_EQ(cells(csv[0]).size(), cells(csv[1]).size());
}

TEST_F(CliTest, CutoffBeyondListsUsesFullLists) {
  ASSERT_EQ(cli(with({"diversify", "--method", "top", "--out", path("cut.tsv")}, disjoint_inputs()))
                .code,
            0);
  auto report = [&](const char* k) {
    const CliRun r = cli(with({"evaluate", "--solution", path("cut.tsv"), "--test",
                            path("folds/test_0.tsv"), "--cutoff", k},
                           disjoint_inputs()));
    EXPECT_EQ(r.code, 0) << r.err;
    auto j = nlohmann::json::parse(r.out);
    j.erase("cutoff");
    return j;
  };
  EXPECT_EQ(report("500"), report("0"));
}

TEST_F(CliTest, MissingGroupingMakesDependentMetricsAbsent) {
  ASSERT_EQ(cli(with({"diversify", "--method", "top", "--out", path("mg.tsv")}, disjoint_inputs()))
                .code,
            0);
  const CliRun r = cli({"evaluate", "--candidates", path("candidates.tsv"), "--train",
                     path("folds/train_0.tsv"), "--user-groups", path("user_genders.tsv"),
                     "--solution", path("mg.tsv"), "--test", path("folds/test_0.tsv")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  for (const char* absent : {"ild", "err_ia", "tudiv", "userdiv", "div"}) {
    EXPECT_TRUE(j[absent].is_null()) << absent;
  }
  for (const char* present :
       {"precision", "tidiv", "itemdiv", "aggregate_diversity", "gini", "relevance_sum"}) {
    EXPECT_FALSE(j[present].is_null()) << present;
  }
}

TEST_F(CliTest, GridHasOneRowPerSettingAndFlagsMembers) {
  const CliRun r = cli(with({"gridsearch", "--method", "greedy", "--betas", "0,1", "--mus", "0,1",
                          "--jobs", "3", "--test", path("folds/test_0.tsv")},
                         disjoint_inputs()));
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = lines(r.out);
  ASSERT_EQ(rows.size(), 5u);
  const auto header = cells(rows[0]);
  EXPECT_EQ(header.back(), "flag");
  int tudiv_flags = 0, tidiv_flags = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto c = cells(rows[i]);
    ASSERT_EQ(c.size(), header.size());
    tudiv_flags += c.back().find("argmax_tudiv") != std::string::npos;
    tidiv_flags += c.back().find("argmax_tidiv") != std::string::npos;
  }
  EXPECT_EQ(tudiv_flags, 1);
  EXPECT_EQ(tidiv_flags, 1);

  // Parallel and serial runs agree.
  const CliRun serial = cli(with({"gridsearch", "--method", "greedy", "--betas", "0,1", "--mus",
                               "0,1", "--test", path("folds/test_0.tsv")},
                              disjoint_inputs()));
  EXPECT_EQ(serial.out, r.out);
}

TEST_F(CliTest, ZeroGridMatchesTop) {
  ASSERT_EQ(cli(with({"diversify", "--method", "top", "--out", path("zg.tsv")}, disjoint_inputs()))
                .code,
            0);
  const CliRun top = cli(with({"evaluate", "--solution", path("zg.tsv"), "--test",
                            path("folds/test_0.tsv"), "--csv", path("zg.csv"), "--json",
                            path("zg.json")},
                           disjoint_inputs()));
  ASSERT_EQ(top.code, 0) << top.err;
  for (const char* method : {"greedy", "flow"}) {
    const CliRun g = cli(with({"gridsearch", "--method", method, "--betas", "0", "--mus", "0",
                            "--test", path("folds/test_0.tsv")},
                           disjoint_inputs()));
    ASSERT_EQ(g.code, 0) << g.err;
    const auto row = cells(lines(g.out).at(1));
    const auto expected = cells(lines(slurp(path("zg.csv"))).at(1));
    // Skip method, beta, mu, lambda; drop the trailing flag.
    const std::vector<std::string> metrics(row.begin() + 4, row.end() - 1);
    EXPECT_EQ(metrics, expected) << method;
  }
}

TEST_F(CliTest, ConfigFileSuppliesOptionsAndFlagsWin) {
  nlohmann::json cfg = {{"candidates", path("candidates.tsv")},
                        {"train", path("folds/train_0.tsv")},
                        {"user_groups", path("user_genders.tsv")},
                        {"item_groups", path("item_studios.tsv")},
                        {"diversify", {{"method", "greedy"}, {"beta", 4}, {"mu", 0.2}}},
                        {"gridsearch", {{"method", "flow"}}}};
  std::ofstream(path("cfg.json")) << cfg.dump();
  ASSERT_EQ(cli({"diversify", "--config", path("cfg.json"), "--out", path("c1.tsv")}).code, 0);
  auto log = read_json(path("c1.tsv.log.json"));
  EXPECT_EQ(log["method"], "greedy");
  EXPECT_EQ(log["beta"], 4.0);

  ASSERT_EQ(cli({"diversify", "--config", path("cfg.json"), "--beta", "1", "--method", "flow",
                 "--out", path("c2.tsv")})
                .code,
            0);
  log = read_json(path("c2.tsv.log.json"));
  EXPECT_EQ(log["method"], "flow");
  EXPECT_EQ(log["beta"], 1.0);
  EXPECT_EQ(log["mu"], 0.2);

  std::ofstream(path("bad_cfg.json")) << "{\"no_such_option\": 1}";
  EXPECT_EQ(cli({"diversify", "--config", path("bad_cfg.json"), "--out", path("c3.tsv")}).code,
            2);
  std::ofstream(path("broken.json")) << "{";
  EXPECT_EQ(cli({"diversify", "--config", path("broken.json")}).code, 3);
}

TEST_F(CliTest, ReportTabulatesRuns) {
  ASSERT_EQ(cli(with({"diversify", "--method", "top", "--out", path("rp.tsv")}, disjoint_inputs()))
                .code,
            0);
  ASSERT_EQ(cli(with({"evaluate", "--solution", path("rp.tsv"), "--json", path("rp_a.json")},
                     disjoint_inputs()))
                .code,
            0);
  const CliRun r = cli({"report", path("rp_a.json"), path("rp_a.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = lines(r.out);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[1].rfind("rp_a,", 0), 0u);
  const CliRun md = cli({"report", "--format", "markdown", path("rp_a.json")});
  EXPECT_EQ(lines(md.out).size(), 3u);
}

TEST_F(CliTest, DeriveThresholdsRoundTrips) {
  const CliRun r = cli(with({"derive-thresholds", "--out", path("th.tsv")}, disjoint_inputs()));
  ASSERT_EQ(r.code, 0) << r.err;
  // Explicit thresholds reproduce the derived run.
  ASSERT_EQ(cli(with({"diversify", "--method", "greedy", "--beta", "1", "--mu", "1", "--out",
                      path("d1.tsv")},
                     disjoint_inputs()))
                .code,
            0);
  ASSERT_EQ(cli({"diversify", "--candidates", path("candidates.tsv"), "--user-groups",
                 path("user_genders.tsv"), "--item-groups", path("item_studios.tsv"),
                 "--thresholds", path("th.tsv"), "--method", "greedy", "--beta", "1", "--mu",
                 "1", "--out", path("d2.tsv")})
                .code,
            0);
  EXPECT_EQ(slurp(path("d1.tsv")), slurp(path("d2.tsv")));
}

}  // namespace
