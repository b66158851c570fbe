#ifndef FOLMT_CLI_HPP
#define FOLMT_CLI_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "folmt/chat.hpp"
#include "folmt/harness.hpp"
#include "folmt/metrics.hpp"
#include "folmt/pipeline.hpp"

namespace folmt {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitViolations = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitTransport = 3;
inline constexpr int kExitInternal = 4;

// Batch settings read from a JSON file. Relative paths are taken relative to
// the file's directory.
struct CliConfig {
  std::optional<std::filesystem::path> dataset;
  std::optional<std::filesystem::path> pool;
  std::optional<std::filesystem::path> samples;
  std::optional<std::filesystem::path> run_log;
  std::optional<std::filesystem::path> report_dir;
  std::optional<std::uint64_t> seed;
  PromptStrategy strategy = PromptStrategy::ZeroShot;
  std::size_t max_domain = 3;
  std::vector<MrId> mrs{kAllMrs.begin(), kAllMrs.end()};
  bool rewrite_conclusion = false;
  std::size_t sample_cap = 200;
  std::size_t category_minimum = 385;
  std::vector<SutConfig> suts;
  std::optional<SutConfig> auditor;
  // Zero audits every inspected group.
  std::size_t audit_sample = 0;
  bool strict_parse = false;
  ParsePolicy parse_errors = ParsePolicy::Exclude;
  std::size_t workers = 0;
};

// Throws ConfigError naming the offending field.
CliConfig cli_config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
CliConfig load_cli_config(const std::filesystem::path& path);

// Entry point behind the `folmt` binary. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace folmt

#endif  // FOLMT_CLI_HPP
