#include "mj/repair/template_repair.hpp"

#include <chrono>

#include "mj/repair/patch.hpp"
#include "mj/repair/rewrite.hpp"
#include "mj/scope.hpp"

namespace mj::repair {

NotAnNpeBug::NotAnNpeBug(Outcome baseline)
    : std::runtime_error("baseline run does not fail with an uncaught NPE: " + baseline.summary()),
      baseline_(std::move(baseline)) {}

namespace {

void add_vars(const TypedProgram& tp, const DerefSite& site, Strategy s, const StaticType& required,
              std::vector<Decision>& out) {
  for (const VarCandidate& v : accessible_vars(tp, site)) {
    if (!tp.info.is_subtype(v.type, required)) continue;
    out.push_back(Decision{site.id, s, VarParam{v.ref, v.type, v.text, ""}, Provenance::Static});
  }
}

}  // namespace

std::vector<Decision> enumerate_static_candidates(const TypedProgram& tp, const DerefSite& site, int ctor_depth) {
  std::vector<Decision> out;
  for (const Applicable& a : applicable_strategies(site)) {
    if (!a.template_ok) continue;
    const Strategy s = a.strategy;
    switch (s) {
      case Strategy::S1a:
      case Strategy::S1b:
        add_vars(tp, site, s, site.receiver_type, out);
        out.push_back(Decision{site.id, s, ConstParam{ConstParam::Kind::Null}, Provenance::Static});
        break;
      case Strategy::S2a:
      case Strategy::S2b:
        for (auto& plan : plan_constructions(tp.info, site.receiver_type, ctor_depth))
          out.push_back(Decision{site.id, s, CtorParam{std::move(plan)}, Provenance::Static});
        break;
      case Strategy::S4b:
        for (auto& plan : plan_constructions(tp.info, site.return_type, ctor_depth))
          out.push_back(Decision{site.id, s, CtorParam{std::move(plan)}, Provenance::Static});
        break;
      case Strategy::S4c:
        add_vars(tp, site, s, site.return_type, out);
        for (const ConstParam& c : return_constants(site.return_type))
          out.push_back(Decision{site.id, s, c, Provenance::Static});
        break;
      case Strategy::S3:
      case Strategy::S4a:
      case Strategy::S4d: out.push_back(Decision{site.id, s, NoParam{}, Provenance::Static}); break;
    }
  }
  return out;
}

RunResult baseline_run(const TypedProgram& tp, MethodRef test, std::int64_t budget) {
  RunOptions opt;
  opt.step_budget = budget;
  RunResult r = run_test(tp, test, opt);
  if (!(r.outcome.kind == OutcomeKind::Uncaught && r.outcome.is_npe() && r.outcome.site_id >= 0))
    throw NotAnNpeBug(r.outcome);
  return r;
}

namespace {

struct CandidateRun {
  bool compiled = false;
  Outcome outcome;
  std::int64_t steps = 0;
  std::string diff;
};

}  // namespace

ExplorationReport explore_templates(const TypedProgram& tp, std::string_view source, MethodRef test,
                                    const RepairConfig& config) {
  const auto started = std::chrono::steady_clock::now();
  const RunResult base = baseline_run(tp, test, config.step_budget);
  const DerefSite& site = tp.sites.at(base.outcome.site_id);
  const std::string test_name = tp.info.method(test).name;

  ExplorationReport report;
  report.bug_id = config.bug_id;
  report.mode = Mode::Template;
  report.test = test_name;
  report.site_id = site.id;
  report.steps = base.steps;

  const std::vector<Decision> candidates = enumerate_static_candidates(tp, site, config.ctor_depth);
  report.candidates = static_cast<int>(candidates.size());
  std::vector<CandidateRun> runs(candidates.size());

  for_each_index(candidates.size(), config.policy, [&](std::size_t i) {
    CandidateRun& run = runs[i];
    CheckResult checked = typecheck(apply_template(tp, candidates[i]));
    if (!checked.ok()) return;
    run.compiled = true;
    const auto ref = checked.program->find_test(test_name);
    RunOptions opt;
    opt.step_budget = config.step_budget;
    RunResult r = run_test(*checked.program, ref.value_or(test), opt);
    run.outcome = r.outcome;
    run.steps = r.steps;
    run.diff = emit_unified_diff(source, splice_rewrite(tp, source, candidates[i], false), config.path);
  });

  for (std::size_t i = 0; i < candidates.size(); ++i) {
    report.steps += runs[i].steps;
    if (!runs[i].compiled) continue;
    DecisionResult d;
    d.id = "template-" + std::to_string(report.decisions.size());
    d.decision = candidates[i];
    d.outcome = runs[i].outcome;
    d.steps = runs[i].steps;
    d.valid = runs[i].outcome.passed();
    d.diff = runs[i].diff;
    report.decisions.push_back(std::move(d));
  }
  report.tentative = static_cast<int>(report.decisions.size());
  for (const auto& d : report.decisions) report.valid += d.valid;
  report.elapsed_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
  return report;
}

}  // namespace mj::repair
