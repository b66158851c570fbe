#ifndef FOLMT_PIPELINE_HPP
#define FOLMT_PIPELINE_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "folmt/realizer.hpp"
#include "folmt/rewrite.hpp"
#include "folmt/syntax.hpp"

namespace folmt {

// A source test case paired with its transformed follow-up. Every relation
// expects equal labels on both members.
struct MetamorphicGroup {
  std::string id;
  MrId mr = MrId::E1_1;
  std::uint64_t rng_seed = 0;
  SourceRecord source;
  // gold_label is copied from the source.
  SourceRecord follow_up;
  // The rewrite step for formula rules, a short description otherwise.
  std::string edit;
  // Premise positions in follow_up whose text was produced by the realizer.
  std::vector<std::size_t> changed_premises;
  bool conclusion_changed = false;
};

nlohmann::json group_to_json(const MetamorphicGroup& g);
// Throws ConfigError or SyntaxError on malformed input.
MetamorphicGroup group_from_json(const nlohmann::json& j);

void write_groups(const std::filesystem::path& path, const std::vector<MetamorphicGroup>& groups);
// Throws IoError when unreadable and ConfigError naming the line on bad input.
std::vector<MetamorphicGroup> load_groups(const std::filesystem::path& path);

struct PipelineOptions {
  // Formula rules rewrite the conclusion as well as the premises.
  bool rewrite_conclusion = false;
  Lexicon lexicon;
  // Domain bound for the consistency check behind P3.
  std::size_t max_domain = 3;
};

// Stable id: 16 hex digits of a hash over (source id, relation, seed).
std::string group_id(const std::string& source_id, MrId mr, std::uint64_t seed);

// Builds one group. Throws NotApplicable naming the failed precondition.
MetamorphicGroup apply_mr(const SourceRecord& record, MrId mr, std::uint64_t seed,
                          const PipelineOptions& options = {});

// Cheap applicability test that does not build the follow-up. P3 is reported
// applicable here even though its consistency check may still fail.
bool mr_applicable(const SourceRecord& record, MrId mr, const PipelineOptions& options = {});

struct Pool {
  std::vector<MetamorphicGroup> groups;
  std::map<MrId, std::size_t> applicable;
  std::map<MrId, std::size_t> skipped;
};

// Every applicable relation on every record, sorted by group id.
Pool generate_pool(const std::vector<SourceRecord>& records, const std::vector<MrId>& mrs, std::uint64_t seed,
                   const PipelineOptions& options = {});

struct SamplePlan {
  std::size_t per_subrule_cap = 200;
  std::uint64_t rng_seed = 0;
  std::size_t category_minimum = 385;
};

struct Sample {
  std::vector<MetamorphicGroup> groups;
  std::map<MrId, std::size_t> per_mr;
  std::map<MrCategory, std::size_t> per_category;
  std::vector<std::string> warnings;
};

// Seeded uniform sample of min(cap, available) groups per relation, in
// relation order.
Sample sample_pool(const std::vector<MetamorphicGroup>& pool, const SamplePlan& plan);

}  // namespace folmt

#endif  // FOLMT_PIPELINE_HPP
