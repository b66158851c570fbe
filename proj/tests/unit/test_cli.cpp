#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "folmt/cli.hpp"
#include "folmt/errors.hpp"

namespace folmt {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

fs::path fresh_dir(const std::string& name) {
  auto d = fs::temp_directory_path() / ("folmt_cli_" + std::to_string(::getpid())) / name;
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

// Mock config writing everything under `dir`.
fs::path mock_config(const fs::path& dir, nlohmann::json extra = nlohmann::json::object()) {
  nlohmann::json j = {
      {"dataset", (fs::path(FOLMT_SOURCE_DIR) / "data/desk_corpus.jsonl").string()},
      {"pool", "pool.jsonl"},
      {"samples", "samples.jsonl"},
      {"run_log", "run_log.jsonl"},
      {"report_dir", "report"},
      {"seed", 20240601},
      {"sample", {{"cap", 200}, {"minimum", 385}}},
      {"suts",
       {{{"name", "mock-gold"}, {"kind", "mock"}, {"policy", "gold"}},
        {{"name", "mock-flip-c"}, {"kind", "mock"}, {"policy", "flip-category:C"}}}},
      {"auditor", {{"name", "rule-auditor"}, {"kind", "mock"}}}};
  j.update(extra);
  const auto p = dir / "config.json";
  std::ofstream(p) << j.dump(2);
  return p;
}

void expect_config_error(const nlohmann::json& j, const std::string& field) {
  try {
    cli_config_from_json(j, "/base");
    ADD_FAILURE() << "accepted " << j.dump();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find(field), std::string::npos) << e.what();
  }
}

TEST(Config, FieldsAndErrors) {
  const auto c = cli_config_from_json({{"dataset", "d/x.jsonl"}, {"strategy", "few-shot"}, {"mrs", {"E1_1", "C3"}},
                                       {"parse_errors", "include"}},
                                      "/base/cfg");
  EXPECT_EQ(*c.dataset, fs::path("/base/cfg/d/x.jsonl"));
  EXPECT_EQ(c.strategy, PromptStrategy::FewShot);
  EXPECT_EQ(c.mrs, (std::vector<MrId>{MrId::E1_1, MrId::C3}));
  EXPECT_EQ(c.parse_errors, ParsePolicy::Include);
  EXPECT_EQ(c.sample_cap, 200u);

  expect_config_error({{"strategy", "telepathy"}}, "strategy");
  expect_config_error({{"mrs", {"E7"}}}, "mrs");
  expect_config_error({{"max_domain", 0}}, "max_domain");
  expect_config_error({{"seed", "abc"}}, "seed");
  expect_config_error({{"suts", {{{"kind", "mock"}}}}}, "name");
  expect_config_error({{"parse_errors", "maybe"}}, "parse_errors");
  expect_config_error(nlohmann::json::array(), "object");
  EXPECT_THROW(load_cli_config("/nonexistent/config.json"), Error);
}

TEST(Cli, Normalize) {
  const auto r = cli({"normalize", "-(P(a) & Q(b))"});
  EXPECT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(r.out,
            "(-P(a) | -Q(b))\nsteps: 1\nE1_2\t.\t-(P(a) & Q(b))\t(-P(a) | -Q(b))\t(0,9,0,0,0,0)\t(0,0,0,0,0,0)\n");
}

TEST(Cli, ParseAndTransform) {
  auto p = cli({"parse", "forall x. P(x)"});
  EXPECT_EQ(p.code, kExitOk);
  EXPECT_EQ(p.out.rfind("forall x. P(x)\n", 0), 0u);
  auto t = cli({"transform", "--mr", "E1_1", "P(a) -> Q(b)"});
  EXPECT_EQ(t.code, kExitOk) << t.err;
  EXPECT_EQ(t.out.substr(0, t.out.find('\n')), "(-P(a) | Q(b))");
  EXPECT_EQ(cli({"transform", "--mr", "E2_4", "P(a)"}).code, kExitUsage);
}

TEST(Cli, Check) {
  auto t = cli({"check", "--premise", "forall x. (P(x) -> Q(x))", "--premise", "P(a)", "--conclusion", "Q(a)"});
  EXPECT_EQ(t.code, kExitOk) << t.err;
  EXPECT_EQ(t.out.rfind("True (bounded, domains 1..3)", 0), 0u) << t.out;
  auto exact = cli({"check", "--premise", "forall x. (P(x) -> Q(x))", "--premise", "P(a)", "--conclusion", "Q(a)",
                    "--max-domain", "auto"});
  EXPECT_EQ(exact.out.rfind("True (exact, domains 1..4)", 0), 0u) << exact.out;
  auto neg = cli({"check", "--premise", "-P(a)", "--conclusion", "-Q(a)", "--max-domain", "auto"});
  EXPECT_EQ(neg.out.rfind("Unknown", 0), 0u) << neg.out << neg.err;
  auto corpus = cli({"check", "--input", (fs::path(FOLMT_SOURCE_DIR) / "data/desk_corpus.jsonl").string(),
                     "--max-domain", "auto"});
  EXPECT_EQ(corpus.code, kExitOk) << corpus.out << corpus.err;
  EXPECT_EQ(corpus.out.find("DISAGREE"), std::string::npos);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(cli({}).code, kExitUsage);
  EXPECT_EQ(cli({"frobnicate"}).code, kExitUsage);
  EXPECT_EQ(cli({"parse", "P(a"}).code, kExitUsage);
  EXPECT_EQ(cli({"run"}).code, kExitUsage);
  EXPECT_EQ(cli({"check", "--premise", "P(a)", "--conclusion", "P(a)", "--max-domain", "lots"}).code, kExitUsage);
  const auto dir = fresh_dir("bad");
  std::ofstream(dir / "c.json") << R"({"suts": [{"name": "x", "kind": "mock", "policy": "psychic"}]})";
  const auto r = cli({"run", "--config", (dir / "c.json").string()});
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_NE(r.err.find("psychic"), std::string::npos) << r.err;
}

TEST(Cli, TransportFailureExitCode) {
  const auto dir = fresh_dir("transport");
  // nothing listens on the discard port
  const nlohmann::json down = {{"name", "down"},
                               {"endpoint", "http://127.0.0.1:9/v1/chat/completions"},
                               {"model_id", "m"},
                               {"max_retries", 0},
                               {"timeout_seconds", 1}};
  const auto cfg = mock_config(dir, {{"suts", nlohmann::json::array({down})}});
  ASSERT_EQ(cli({"generate", "--config", cfg.string()}).code, kExitOk);
  ASSERT_EQ(cli({"sample", "--config", cfg.string()}).code, kExitOk);
  EXPECT_EQ(cli({"run", "--config", cfg.string()}).code, kExitTransport);
}

// Full offline run compared against checked-in reports.
TEST(Cli, MockEndToEndMatchesGolden) {
  const auto dir = fresh_dir("e2e");
  const auto cfg = mock_config(dir).string();
  for (const char* step : {"generate", "sample", "run"}) {
    auto r = cli({step, "--config", cfg});
    ASSERT_EQ(r.code, kExitOk) << step << ": " << r.err;
  }
  auto again = cli({"run", "--config", cfg});
  EXPECT_NE(again.out.find("skipped 988"), std::string::npos) << again.out;

  auto rep = cli({"report", "--config", cfg});
  EXPECT_EQ(rep.code, kExitViolations);
  const fs::path golden = fs::path(FOLMT_SOURCE_DIR) / "tests/golden";
  for (const char* name : {"report.txt", "report.csv", "report.json"})
    EXPECT_EQ(slurp(dir / "report" / name), slurp(golden / name)) << name;

  auto audit = cli({"audit", "--config", cfg});
  EXPECT_EQ(audit.code, kExitOk) << audit.err;
  EXPECT_NE(audit.out.find("mock-flip-c\tinspected 150\tdrift 0\tparse 0\tFRR 0.00%"), std::string::npos) << audit.out;

  auto gold_only = cli({"report", "--config", cfg, "--sut", "mock-gold", "--format", "csv"});
  EXPECT_EQ(gold_only.code, kExitOk);
  EXPECT_EQ(gold_only.out.find("mock-flip-c"), std::string::npos);
}

}  // namespace
}  // namespace folmt
