#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <regex>
#include <set>
#include <sys/wait.h>

#include "mj/repair/corpus.hpp"
#include "mj/repair/explorer.hpp"
#include "mj/repair/patch.hpp"
#include "mj/repair/template_repair.hpp"
#include "oracle.hpp"
#include "support.hpp"

using namespace mj;
using namespace mj::repair;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Verdict {
  bool ok = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt_seconds(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f s", s);
  return buf;
}

fs::path root() { return testing_support::source_root(); }

std::vector<LoadedCase> corpus() {
  std::vector<LoadedCase> out;
  for (const CorpusCase& c : load_corpus(root() / "fixtures" / "corpus")) out.push_back(load_case(c));
  return out;
}

RepairConfig config() {
  RepairConfig c;
  c.policy = ExecPolicy::Parallel;
  return c;
}

LoadedCase named(const std::vector<LoadedCase>& cases, const std::string& id) {
  for (const LoadedCase& c : cases)
    if (c.info.bug_id == id) return c;
  throw std::runtime_error("corpus has no case " + id);
}

std::set<std::string> labels(const ExplorationReport& r) {
  std::set<std::string> out;
  for (const DecisionResult& d : r.decisions) out.insert(d.decision.label());
  return out;
}

// Values visible at the failing site just before the dereference.
std::map<std::string, Value> values_at_failure(const Metaprogram& mp, MethodRef test, int site) {
  std::map<std::string, Value> out;
  MetaRuntime off(mp, HookMode::Off);
  off.observer = [&](const Interpreter& in, const Frame& frame, int id, const std::vector<PoolValue>&) {
    if (id != site) return;
    out.clear();
    for (const VarCandidate& v : mp.scope[id]) out[v.text] = in.read_var(frame, v.ref);
  };
  run_meta(mp, test, off, 1'000'000);
  return out;
}

std::string var_text(const Decision& d) {
  if (const auto* v = std::get_if<VarParam>(&d.param)) return v->text;
  return {};
}

// ---------------------------------------------------------------------------

Verdict hooks_off_equivalence(const std::vector<LoadedCase>& cases) {
  const auto t0 = Clock::now();
  std::vector<TypedProgramPtr> programs;
  for (const LoadedCase& c : cases) programs.push_back(c.program);
  int extra = 0;
  for (const auto& p : testing_support::mj_files(root() / "tests" / "programs")) {
    auto tp = testing_support::compile_file(p);
    bool npe_free = true;
    for (MethodRef t : tp->tests()) npe_free &= !run_test(*tp, t).outcome.is_npe();
    if (!npe_free) continue;
    programs.push_back(tp);
    ++extra;
  }
  int runs = 0, mismatches = 0;
  for (const auto& tp : programs) {
    const Metaprogram mp = transform(tp);
    for (MethodRef t : tp->tests()) {
      const Outcome plain = run_test(*tp, t).outcome;
      MetaRuntime off(mp, HookMode::Off);
      mismatches += !run_meta(mp, t, off, 1'000'000).outcome.same_verdict(plain);
      ++runs;
    }
  }
  const double s = seconds_since(t0);
  const bool ok = cases.size() == 16 && extra >= 20 && mismatches == 0 && s < 10;
  return {ok, std::to_string(cases.size()) + " corpus + " + std::to_string(extra) + " NPE-free programs, " +
                  std::to_string(runs) + " runs, " + std::to_string(mismatches) + " mismatches, " + fmt_seconds(s)};
}

Verdict patch_fidelity(const std::vector<LoadedCase>& cases, const std::vector<ExplorationReport>& meta) {
  const auto t0 = Clock::now();
  int checked = 0, divergent = 0, unsynthesizable = 0;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    for (const DecisionResult& d : meta[i].decisions) {
      if (!d.valid) continue;
      if (!d.diff) {
        ++unsynthesizable;
        continue;
      }
      ++checked;
      try {
        auto patched = compile(apply_patch(cases[i].source, *d.diff), cases[i].info.bug_id + ".mj");
        auto ref = patched->find_test(cases[i].info.test);
        divergent += !(ref && run_test(*patched, *ref).outcome.passed());
      } catch (const std::exception&) {
        ++divergent;
      }
    }
  }
  const double s = seconds_since(t0);
  return {divergent == 0 && checked > 0 && s < 30,
          std::to_string(checked) + " valid meta patches applied, " + std::to_string(divergent) + " divergences, " +
              std::to_string(unsynthesizable) + " unsynthesizable, " + fmt_seconds(s)};
}

Verdict oracle_equivalence() {
  const std::vector<std::pair<std::string, std::string>> fixtures = {
      {"coincide_void.mj", "coincideVoid"},         {"coincide_int.mj", "coincideInt"},
      {"coincide_compound.mj", "coincideCompound"}, {"coincide_object.mj", "coincideObject"},
      {"coincide_str.mj", "coincideStr"},
  };
  int equal = 0;
  std::string failures;
  for (const auto& [file, test] : fixtures) {
    auto f = testing_support::load_fixture(testing_support::fixture_path(file), test);
    ExplorationReport tpl = explore_templates(*f.program, f.source, f.test, config());
    ExplorationReport meta = explore_decisions(transform(f.program), f.source, f.test, config());
    const auto want = oracle::template_labels(f.source, *f.program, tpl.site_id, config().ctor_depth);
    if (labels(tpl) == want && labels(meta) == want && !want.empty())
      ++equal;
    else
      failures += " " + file;
  }
  return {equal == static_cast<int>(fixtures.size()),
          std::to_string(equal) + "/" + std::to_string(fixtures.size()) +
              " fixtures with template = meta = brute-force sets" + failures};
}

Verdict runtime_narrowing(const LoadedCase& c, const ExplorationReport& tpl, const ExplorationReport& meta) {
  const std::set<std::string> fixed = labels(tpl);
  int extra = 0;
  bool narrowed = true;
  for (const DecisionResult& d : meta.decisions) {
    if (fixed.count(d.decision.label())) continue;
    ++extra;
    const auto* v = std::get_if<VarParam>(&d.decision.param);
    if (!v || v->runtime_class.empty() || v->runtime_class == v->type.class_name) {
      narrowed = false;
      continue;
    }
    const ProgramInfo& info = c.program->info;
    narrowed &= info.is_subclass(info.find_class(v->runtime_class), info.find_class(v->type.class_name));
  }
  return {meta.tentative >= tpl.tentative + 1 && extra >= 1 && narrowed,
          "meta " + std::to_string(meta.tentative) + " vs template " + std::to_string(tpl.tentative) + ", " +
              std::to_string(extra) + " extra decisions" + (narrowed ? ", all runtime-narrowed" : ", NOT narrowed")};
}

Verdict felix_shape(const LoadedCase& c, const ExplorationReport& tpl, const ExplorationReport& meta) {
  const auto values = values_at_failure(transform(c.program), c.test, meta.site_id);
  std::set<std::string> null_vars;
  int reuses = 0, reuse_valid = 0;
  for (const DecisionResult& d : tpl.decisions) {
    const std::string v = var_text(d.decision);
    if (v.empty() || !values.count(v) || !values.at(v).is_null()) continue;
    null_vars.insert(v);
    ++reuses;
    reuse_valid += d.valid;
  }
  std::set<std::string> listed;
  for (const FilteredDecision& f : meta.filtered_out)
    if (f.reason == FilterReason::NullValued) listed.insert(var_text(f.decision));
  const bool all_listed = std::includes(listed.begin(), listed.end(), null_vars.begin(), null_vars.end());
  return {tpl.tentative > meta.tentative && reuses > 0 && reuse_valid == 0 && all_listed,
          "template " + std::to_string(tpl.tentative) + " vs meta " + std::to_string(meta.tentative) + ", " +
              std::to_string(reuses) + " null-valued reuse patches (" + std::to_string(reuse_valid) + " valid), " +
              std::to_string(null_vars.size()) + " variables" + (all_listed ? " all" : " NOT all") +
              " filtered as NullValued"};
}

Verdict pdfbox_shape(const LoadedCase& c, const ExplorationReport& tpl, const ExplorationReport& meta) {
  const auto values = values_at_failure(transform(c.program), c.test, meta.site_id);
  auto null_return = [&](const Decision& d) {
    const std::string v = var_text(d);
    return d.strategy == Strategy::S4c && !v.empty() && values.count(v) && values.at(v).is_null();
  };
  bool meta_s4a = false, meta_equivalent = false, tpl_s4a = false, tpl_equivalent = false;
  for (const DecisionResult& d : meta.decisions) {
    meta_s4a |= d.decision.strategy == Strategy::S4a;
    meta_equivalent |= null_return(d.decision);
  }
  for (const DecisionResult& d : tpl.decisions) {
    tpl_s4a |= d.decision.strategy == Strategy::S4a;
    tpl_equivalent |= null_return(d.decision);
  }
  return {meta_s4a && !meta_equivalent && tpl_s4a && tpl_equivalent,
          std::string("meta: S4a ") + (meta_s4a ? "yes" : "no") + ", null-valued S4c " +
              (meta_equivalent ? "yes" : "no") + "; template: S4a " + (tpl_s4a ? "yes" : "no") +
              ", null-valued S4c " + (tpl_equivalent ? "yes" : "no")};
}

Verdict math305_shape(const ExplorationReport& meta) {
  std::set<Strategy> valid;
  int arithmetic = 0;
  for (const DecisionResult& d : meta.decisions) {
    if (d.valid) valid.insert(d.decision.strategy);
    arithmetic += d.outcome.kind == OutcomeKind::Uncaught && d.outcome.exception == ExceptionKind::ArithmeticError;
  }
  const bool creation = valid.count(Strategy::S2a) || valid.count(Strategy::S2b);
  return {meta.valid >= 3 && creation && valid.count(Strategy::S3) && arithmetic >= 1,
          std::to_string(meta.valid) + " valid (" + std::to_string(valid.size()) + " strategies, S2a/S2b " +
              (creation ? "yes" : "no") + ", S3 " + (valid.count(Strategy::S3) ? "yes" : "no") + "), " +
              std::to_string(arithmetic) + " invalid with ArithmeticError"};
}

Verdict coverage(const std::vector<ExplorationReport>& meta) {
  std::set<Strategy> valid;
  for (const ExplorationReport& r : meta)
    for (const DecisionResult& d : r.decisions)
      if (d.valid) valid.insert(d.decision.strategy);
  std::string missing;
  for (Strategy s : kAllStrategies)
    if (!valid.count(s)) missing += " " + std::string(strategy_id(s));
  return {missing.empty(), std::to_string(valid.size()) + "/9 strategies with a valid meta patch" +
                               (missing.empty() ? "" : ", missing:" + missing)};
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(MJREPAIR_PATH) + " " + args + " > /dev/null 2>&1";
  const int raw = std::system(cmd.c_str());
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

std::map<std::string, std::string> read_tree(const fs::path& dir) {
  static const std::regex elapsed("\"elapsedMs\": [^,\n]*");
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file())
      out[fs::relative(e.path(), dir).string()] =
          std::regex_replace(testing_support::read_file(e.path()), elapsed, "\"elapsedMs\": _");
  return out;
}

Verdict determinism() {
  const fs::path base = fs::temp_directory_path() / "mj-acceptance";
  fs::remove_all(base);
  const fs::path a = base / "a", b = base / "b";
  const std::string corpus_dir = (root() / "fixtures" / "corpus").string();
  const int ra = run_cli("corpus run " + corpus_dir + " --out " + a.string());
  const int rb = run_cli("corpus run " + corpus_dir + " --out " + b.string());
  if (ra != 0 || rb != 0) return {false, "corpus run exited with " + std::to_string(ra) + "/" + std::to_string(rb)};
  const auto ta = read_tree(a), tb = read_tree(b);
  int reports = 0, differing = 0;
  for (const auto& [name, text] : ta) {
    reports += name.size() > 5 && name.substr(name.size() - 5) == ".json";
    differing += !tb.count(name) || tb.at(name) != text;
  }
  differing += static_cast<int>(tb.size() > ta.size() ? tb.size() - ta.size() : 0);
  fs::remove_all(base);
  return {differing == 0 && reports == 32,
          std::to_string(reports) + " reports and " + std::to_string(ta.size() - reports) + " diffs, " +
              std::to_string(differing) + " differ outside elapsedMs"};
}

Verdict performance(double seconds, const std::vector<ExplorationReport>& all, std::int64_t budget) {
  int over = 0, valid = 0;
  for (const ExplorationReport& r : all)
    for (const DecisionResult& d : r.decisions) {
      if (!d.valid) continue;
      ++valid;
      over += d.steps > budget;
    }
  return {seconds < 60 && over == 0, "corpus in both modes took " + fmt_seconds(seconds) + ", " +
                                         std::to_string(valid) + " valid patches, " + std::to_string(over) +
                                         " over the step budget"};
}

}  // namespace

int main() {
  std::vector<std::pair<std::string, std::function<Verdict()>>> criteria;
  std::vector<LoadedCase> cases;
  std::vector<ExplorationReport> tpl, meta;
  double corpus_seconds = 0;
  try {
    cases = corpus();
    const auto t0 = Clock::now();
    for (const LoadedCase& c : cases) {
      tpl.push_back(run_case(c, Mode::Template, config()));
      meta.push_back(run_case(c, Mode::Meta, config()));
    }
    corpus_seconds = seconds_since(t0);
  } catch (const std::exception& e) {
    std::cout << "FAIL corpus could not be run: " << e.what() << "\n";
    return 1;
  }
  auto index_of = [&](const std::string& id) {
    for (std::size_t i = 0; i < cases.size(); ++i)
      if (cases[i].info.bug_id == id) return i;
    throw std::runtime_error("corpus has no case " + id);
  };

  criteria.emplace_back("hooks-off equivalence", [&] { return hooks_off_equivalence(cases); });
  criteria.emplace_back("patch round-trip fidelity", [&] { return patch_fidelity(cases, meta); });
  criteria.emplace_back("oracle equivalence on coinciding contexts", [&] { return oracle_equivalence(); });
  criteria.emplace_back("runtime-narrowing superiority", [&] {
    const auto i = index_of("runtime_narrowing");
    return runtime_narrowing(cases[i], tpl[i], meta[i]);
  });
  criteria.emplace_back("null-valued reuse shape", [&] {
    const auto i = index_of("felix_like");
    return felix_shape(cases[i], tpl[i], meta[i]);
  });
  criteria.emplace_back("return-null equivalence shape", [&] {
    const auto i = index_of("pdfbox_like");
    return pdfbox_shape(cases[i], tpl[i], meta[i]);
  });
  criteria.emplace_back("downstream failure shape", [&] { return math305_shape(meta[index_of("math305_like")]); });
  criteria.emplace_back("strategy coverage", [&] { return coverage(meta); });
  criteria.emplace_back("determinism", [&] { return determinism(); });
  criteria.emplace_back("performance", [&] {
    std::vector<ExplorationReport> all = tpl;
    all.insert(all.end(), meta.begin(), meta.end());
    return performance(corpus_seconds, all, config().step_budget);
  });

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    failed += !v.ok;
    std::cout << (v.ok ? "PASS " : "FAIL ") << (i + 1 < 10 ? " " : "") << i + 1 << ". " << criteria[i].first << ": "
              << v.detail << "\n";
  }
  return failed ? 1 : 0;
}
