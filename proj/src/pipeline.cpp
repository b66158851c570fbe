#include "folmt/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "folmt/core.hpp"
#include "folmt/entailment.hpp"
#include "folmt/errors.hpp"
#include "folmt/random.hpp"

namespace folmt {

namespace {

std::uint64_t group_hash(const std::string& source_id, MrId mr, std::uint64_t seed) {
  return Fnv1a().add(source_id).add(std::string_view(to_string(mr))).add(seed).digest();
}

[[noreturn]] void not_applicable(MrId mr, const std::string& why) {
  throw NotApplicable(std::string(to_string(mr)) + ": " + why);
}

std::vector<Formula> all_formulas(const SourceRecord& r) {
  std::vector<Formula> fs = r.premises_fol;
  fs.push_back(r.conclusion_fol);
  return fs;
}

NameSet record_constants(const SourceRecord& r) {
  NameSet out;
  for (const auto& f : all_formulas(r)) {
    auto c = constants(f);
    out.insert(c.begin(), c.end());
  }
  return out;
}

NameSet record_variables(const SourceRecord& r) {
  NameSet out;
  for (const auto& f : all_formulas(r)) {
    auto v = all_vars(f);
    out.insert(v.begin(), v.end());
  }
  return out;
}

NameSet record_predicates(const SourceRecord& r) {
  NameSet out;
  for (const auto& f : all_formulas(r))
    for (const auto& [p, a] : predicates(f)) {
      (void)a;
      out.insert(p);
    }
  return out;
}

template <class T>
const T& pick(const std::vector<T>& v, Rng& rng) {
  return v[uniform_index(rng, v.size())];
}

struct Site {
  std::size_t premise;  // SIZE_MAX for the conclusion
  Redex redex;
};

class Builder {
 public:
  Builder(const SourceRecord& record, MrId mr, std::uint64_t seed, const PipelineOptions& options)
      : opt_(options), rng_(group_hash(record.id, mr, seed)) {
    g_.id = group_id(record.id, mr, seed);
    g_.mr = mr;
    g_.rng_seed = seed;
    g_.source = record;
    g_.follow_up = record;
    g_.follow_up.id = record.id + "#" + to_string(mr);
  }

  MetamorphicGroup build() {
    const MrId mr = g_.mr;
    switch (category(mr)) {
      case MrCategory::E: formula_rule(); break;
      case MrCategory::S: rename(mr == MrId::S1 ? SymbolKind::Constant : SymbolKind::Predicate); break;
      case MrCategory::P: premise_rule(); break;
      case MrCategory::C: conclusion_rule(); break;
    }
    return std::move(g_);
  }

 private:
  SourceRecord& fu() { return g_.follow_up; }

  void set_premise(std::size_t i, Formula f) {
    fu().premises_nl[i] = realize(f, opt_.lexicon);
    fu().premises_fol[i] = std::move(f);
    if (std::find(g_.changed_premises.begin(), g_.changed_premises.end(), i) == g_.changed_premises.end())
      g_.changed_premises.push_back(i);
  }

  void append_premise(Formula f) {
    fu().premises_nl.push_back(realize(f, opt_.lexicon));
    fu().premises_fol.push_back(std::move(f));
    g_.changed_premises.push_back(fu().premises_fol.size() - 1);
  }

  void set_conclusion(Formula f) {
    fu().conclusion_nl = realize(f, opt_.lexicon);
    fu().conclusion_fol = std::move(f);
    g_.conclusion_changed = true;
  }

  void formula_rule() {
    std::vector<Site> sites;
    const auto& premises = g_.source.premises_fol;
    for (std::size_t i = 0; i < premises.size(); ++i)
      for (auto& r : find_redexes(premises[i], g_.mr)) sites.push_back({i, std::move(r)});
    if (opt_.rewrite_conclusion)
      for (auto& r : find_redexes(g_.source.conclusion_fol, g_.mr)) sites.push_back({SIZE_MAX, std::move(r)});
    if (sites.empty()) not_applicable(g_.mr, opt_.rewrite_conclusion ? "no redex in any formula" : "no redex in any premise");
    const Site& s = pick(sites, rng_);
    const Formula& before = s.premise == SIZE_MAX ? g_.source.conclusion_fol : premises[s.premise];
    Formula after = apply(before, s.redex);
    RewriteStep step{before, after, s.redex, measure(before), measure(after)};
    g_.edit = (s.premise == SIZE_MAX ? std::string("conclusion") : "premise " + std::to_string(s.premise)) + "\t" +
              format_step(step);
    if (s.premise == SIZE_MAX)
      set_conclusion(std::move(after));
    else
      set_premise(s.premise, std::move(after));
  }

  void rename(SymbolKind kind) {
    const bool constant = kind == SymbolKind::Constant;
    NameSet symbols = constant ? record_constants(g_.source) : record_predicates(g_.source);
    if (symbols.empty()) not_applicable(g_.mr, constant ? "no constant symbol" : "no predicate symbol");
    NameSet avoid = symbols;
    if (constant) {
      auto v = record_variables(g_.source);
      avoid.insert(v.begin(), v.end());
    }
    const std::vector<std::string> names(symbols.begin(), symbols.end());
    const std::string from = pick(names, rng_);
    const std::string to = fresh_name(constant ? "Con" : "Pre", avoid);
    g_.edit = std::string(constant ? "constant " : "predicate ") + from + " -> " + to;
    auto mentions = [&](const Formula& f) {
      if (constant) return constants(f).contains(from);
      return predicates(f).contains(from);
    };
    for (std::size_t i = 0; i < g_.source.premises_fol.size(); ++i) {
      const auto& p = g_.source.premises_fol[i];
      if (mentions(p)) set_premise(i, rename_symbol(p, kind, from, to));
    }
    if (mentions(g_.source.conclusion_fol)) set_conclusion(rename_symbol(g_.source.conclusion_fol, kind, from, to));
  }

  void premise_rule() {
    auto& fol = fu().premises_fol;
    auto& nl = fu().premises_nl;
    const std::size_t n = fol.size();
    switch (g_.mr) {
      case MrId::P1: {
        if (n < 2) not_applicable(g_.mr, "fewer than two premises");
        std::vector<std::size_t> perm(n);
        for (std::size_t i = 0; i < n; ++i) perm[i] = i;
        const auto identity = perm;
        while (perm == identity) seeded_shuffle(perm, rng_);
        std::vector<Formula> f2;
        std::vector<std::string> n2;
        for (auto i : perm) {
          f2.push_back(g_.source.premises_fol[i]);
          n2.push_back(g_.source.premises_nl[i]);
        }
        fol = std::move(f2);
        nl = std::move(n2);
        std::ostringstream os;
        os << "permutation";
        for (auto i : perm) os << ' ' << i;
        g_.edit = os.str();
        return;
      }
      case MrId::P2: {
        if (n < 1) not_applicable(g_.mr, "no premise to duplicate");
        const auto i = uniform_index(rng_, n);
        fol.push_back(fol[i]);
        nl.push_back(nl[i]);
        g_.edit = "duplicate premise " + std::to_string(i);
        return;
      }
      case MrId::P3: {
        const auto preds = record_predicates(g_.source);
        auto taken = record_constants(g_.source);
        auto vars = record_variables(g_.source);
        taken.insert(vars.begin(), vars.end());
        std::size_t k = 1;
        while (preds.contains("Pad" + std::to_string(k)) || taken.contains("padObj" + std::to_string(k))) ++k;
        Formula fact = atom("Pad" + std::to_string(k), {Term::constant("padObj" + std::to_string(k))});
        std::vector<Formula> extended = g_.source.premises_fol;
        extended.push_back(fact);
        EntailmentOptions eo;
        eo.max_domain = opt_.max_domain;
        bool ok = false;
        try {
          ok = consistent(extended, eo).consistent;
        } catch (const BudgetExceeded&) {
          not_applicable(g_.mr, "consistency check exceeded its budget");
        }
        if (!ok)
          not_applicable(g_.mr, "no model of the extended premises up to domain size " +
                                    std::to_string(opt_.max_domain));
        g_.edit = "append irrelevant premise " + print_formula(fact);
        append_premise(std::move(fact));
        return;
      }
      case MrId::P4: {
        if (n < 2) not_applicable(g_.mr, "fewer than two premises");
        std::size_t i = uniform_index(rng_, n);
        std::size_t j = uniform_index(rng_, n - 1);
        if (j >= i) ++j;
        if (i > j) std::swap(i, j);
        g_.edit = "conjoin premises " + std::to_string(i) + " and " + std::to_string(j);
        append_premise(conjunction({fol[i], fol[j]}));
        return;
      }
      case MrId::P5: {
        std::vector<std::size_t> conj;
        for (std::size_t i = 0; i < n; ++i)
          if (fol[i].kind() == FormulaKind::And) conj.push_back(i);
        if (conj.empty()) not_applicable(g_.mr, "no conjunctive premise");
        const auto i = pick(conj, rng_);
        const Formula whole = fol[i];
        const auto kids = whole.children();
        Formula left = kids[0];
        Formula right = kids.size() == 2 ? kids[1] : conjunction({kids.begin() + 1, kids.end()});
        g_.edit = "split premise " + std::to_string(i);
        append_premise(std::move(left));
        append_premise(std::move(right));
        return;
      }
      default:
        not_applicable(g_.mr, "not a premise rule");
    }
  }

  void conclusion_rule() {
    const Formula& q = g_.source.conclusion_fol;
    switch (g_.mr) {
      case MrId::C1:
        if (q.kind() == FormulaKind::And && q.children().back() == truth())
          not_applicable(g_.mr, "conclusion already ends in a conjunction with 1");
        set_conclusion(conjunction({q, truth()}));
        g_.edit = "conclusion & 1";
        return;
      case MrId::C2:
        if (q.kind() == FormulaKind::Or && q.children().back() == falsity())
          not_applicable(g_.mr, "conclusion already ends in a disjunction with 0");
        set_conclusion(disjunction({q, falsity()}));
        g_.edit = "conclusion | 0";
        return;
      case MrId::C3:
        set_conclusion(negation(negation(q)));
        g_.edit = "double negation of conclusion";
        return;
      default:
        not_applicable(g_.mr, "not a conclusion rule");
    }
  }

  const PipelineOptions& opt_;
  Rng rng_;
  MetamorphicGroup g_;
};

}  // namespace

std::string group_id(const std::string& source_id, MrId mr, std::uint64_t seed) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << group_hash(source_id, mr, seed);
  return os.str();
}

MetamorphicGroup apply_mr(const SourceRecord& record, MrId mr, std::uint64_t seed, const PipelineOptions& options) {
  return Builder(record, mr, seed, options).build();
}

bool mr_applicable(const SourceRecord& record, MrId mr, const PipelineOptions& options) {
  const auto n = record.premises_fol.size();
  const auto& q = record.conclusion_fol;
  switch (category(mr)) {
    case MrCategory::E: {
      for (const auto& p : record.premises_fol)
        if (!find_redexes(p, mr).empty()) return true;
      return options.rewrite_conclusion && !find_redexes(q, mr).empty();
    }
    case MrCategory::S:
      return mr == MrId::S1 ? !record_constants(record).empty() : !record_predicates(record).empty();
    default:
      break;
  }
  switch (mr) {
    case MrId::P1:
    case MrId::P4: return n >= 2;
    case MrId::P2: return n >= 1;
    case MrId::P3: return true;
    case MrId::P5:
      return std::any_of(record.premises_fol.begin(), record.premises_fol.end(),
                         [](const Formula& f) { return f.kind() == FormulaKind::And; });
    case MrId::C1: return !(q.kind() == FormulaKind::And && q.children().back() == truth());
    case MrId::C2: return !(q.kind() == FormulaKind::Or && q.children().back() == falsity());
    case MrId::C3: return true;
    default: return false;
  }
}

Pool generate_pool(const std::vector<SourceRecord>& records, const std::vector<MrId>& mrs, std::uint64_t seed,
                   const PipelineOptions& options) {
  Pool pool;
  for (auto mr : mrs) {
    pool.applicable[mr] = 0;
    pool.skipped[mr] = 0;
  }
  for (const auto& r : records) {
    for (auto mr : mrs) {
      if (!mr_applicable(r, mr, options)) {
        ++pool.skipped[mr];
        continue;
      }
      try {
        pool.groups.push_back(apply_mr(r, mr, seed, options));
        ++pool.applicable[mr];
      } catch (const NotApplicable&) {
        ++pool.skipped[mr];
      }
    }
  }
  std::stable_sort(pool.groups.begin(), pool.groups.end(),
                   [](const MetamorphicGroup& a, const MetamorphicGroup& b) { return a.id < b.id; });
  return pool;
}

Sample sample_pool(const std::vector<MetamorphicGroup>& pool, const SamplePlan& plan) {
  Sample out;
  for (auto c : kAllCategories) out.per_category[c] = 0;
  for (auto mr : kAllMrs) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < pool.size(); ++i)
      if (pool[i].mr == mr) idx.push_back(i);
    Rng rng(Fnv1a().add(std::string_view("sample")).add(plan.rng_seed).add(std::string_view(to_string(mr))).digest());
    seeded_shuffle(idx, rng);
    const auto take = std::min(plan.per_subrule_cap, idx.size());
    for (std::size_t k = 0; k < take; ++k) out.groups.push_back(pool[idx[k]]);
    out.per_mr[mr] = take;
    out.per_category[category(mr)] += take;
  }
  for (auto c : kAllCategories) {
    if (out.per_category[c] < plan.category_minimum) {
      out.warnings.push_back(std::string(to_string(c)) + ": " + std::to_string(out.per_category[c]) +
                             " sampled groups, below the minimum of " + std::to_string(plan.category_minimum));
    }
  }
  return out;
}

nlohmann::json group_to_json(const MetamorphicGroup& g) {
  return {{"id", g.id},
          {"mr", to_string(g.mr)},
          {"seed", g.rng_seed},
          {"edit", g.edit},
          {"changed_premises", g.changed_premises},
          {"conclusion_changed", g.conclusion_changed},
          {"source", record_to_json(g.source)},
          {"follow_up", record_to_json(g.follow_up)}};
}

MetamorphicGroup group_from_json(const nlohmann::json& j) {
  MetamorphicGroup g;
  try {
    g.id = j.at("id").get<std::string>();
    auto mr = mr_from_string(j.at("mr").get<std::string>());
    if (!mr) throw ConfigError("group " + g.id + " has an unknown relation " + j.at("mr").dump());
    g.mr = *mr;
    g.rng_seed = j.at("seed").get<std::uint64_t>();
    g.edit = j.value("edit", std::string());
    g.changed_premises = j.value("changed_premises", std::vector<std::size_t>{});
    g.conclusion_changed = j.value("conclusion_changed", false);
    g.source = record_from_json(j.at("source"));
    g.follow_up = record_from_json(j.at("follow_up"));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed group: ") + e.what());
  }
  return g;
}

void write_groups(const std::filesystem::path& path, const std::vector<MetamorphicGroup>& groups) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  for (const auto& g : groups) out << group_to_json(g).dump() << '\n';
  if (!out) throw IoError("error while writing " + path.string());
}

std::vector<MetamorphicGroup> load_groups(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<MetamorphicGroup> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded()) throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": not valid JSON");
    try {
      out.push_back(group_from_json(j));
    } catch (const Error& e) {
      throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace folmt
