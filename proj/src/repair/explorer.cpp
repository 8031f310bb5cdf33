#include "mj/repair/explorer.hpp"

#include <chrono>
#include <map>

#include "mj/repair/patch.hpp"
#include "mj/repair/template_repair.hpp"

namespace mj::repair {

NoNpeObserved::NoNpeObserved(Outcome outcome)
    : std::runtime_error("no harmful null dereference observed: " + outcome.summary()),
      outcome_(std::move(outcome)) {}

DecisionSet filter_equivalent(int site_id, std::vector<Collected> collected) {
  DecisionSet ds;
  ds.site_id = site_id;
  std::map<std::pair<Strategy, std::string>, std::string> seen;
  for (const Collected& c : collected) {
    if (c.value) {
      const bool is_var = std::holds_alternative<VarParam>(c.decision.param);
      if (is_var && c.value->is_null) {
        ds.filtered_out.push_back({c.decision, FilterReason::NullValued, "holds null"});
        continue;
      }
      const auto key = std::make_pair(c.decision.strategy, c.value->key);
      if (auto it = seen.find(key); it != seen.end()) {
        ds.filtered_out.push_back({c.decision, FilterReason::DuplicateValue, "same value as " + it->second});
        continue;
      }
      seen.emplace(key, param_text(c.decision.param));
    }
    ds.decisions.push_back(c.decision);
  }
  ds.collected = std::move(collected);
  return ds;
}

DecisionSet detect_and_collect(const Metaprogram& mp, MethodRef test, const RepairConfig& config) {
  MetaRuntime hooks(mp, HookMode::Detect, std::nullopt, config.ctor_depth);
  RunResult r = run_meta(mp, test, hooks, config.step_budget);
  if (hooks.detected_site < 0) throw NoNpeObserved(r.outcome);
  DecisionSet ds = filter_equivalent(hooks.detected_site, std::move(hooks.collected));
  ds.steps = r.steps;
  return ds;
}

RunResult replay(const Metaprogram& mp, MethodRef test, const Decision& d, const RepairConfig& config) {
  MetaRuntime hooks(mp, HookMode::Replay, d, config.ctor_depth);
  return run_meta(mp, test, hooks, config.step_budget);
}

namespace {

struct ReplayResult {
  RunResult run;
  std::optional<std::string> diff;
  PatchCheck check = PatchCheck::NotChecked;
  std::optional<Outcome> patched;
  std::int64_t patched_steps = 0;
};

}  // namespace

ExplorationReport explore_decisions(const Metaprogram& mp, std::string_view source, MethodRef test,
                                    const RepairConfig& config) {
  const auto started = std::chrono::steady_clock::now();
  const TypedProgram& tp = *mp.original;
  const RunResult base = baseline_run(tp, test, config.step_budget);
  const DecisionSet ds = detect_and_collect(mp, test, config);

  ExplorationReport report;
  report.bug_id = config.bug_id;
  report.mode = Mode::Meta;
  report.test = tp.info.method(test).name;
  report.site_id = ds.site_id;
  report.candidates = static_cast<int>(ds.collected.size());
  report.filtered_out = ds.filtered_out;
  report.steps = base.steps + ds.steps;

  std::vector<ReplayResult> results(ds.decisions.size());
  for_each_index(ds.decisions.size(), config.policy, [&](std::size_t i) {
    ReplayResult& out = results[i];
    out.run = replay(mp, test, ds.decisions[i], config);
    try {
      Patch p = decision_to_patch(tp, source, ds.decisions[i], config.path);
      out.diff = std::move(p.diff);
      if (config.check_patches) {
        auto patched = compile(apply_patch(source, *out.diff), config.path);
        RunOptions opt;
        opt.step_budget = config.step_budget;
        RunResult pr = run_test(*patched, patched->find_test(report.test).value_or(test), opt);
        out.patched = pr.outcome;
        out.patched_steps = pr.steps;
        out.check = pr.outcome.passed() == out.run.outcome.passed() ? PatchCheck::Agrees : PatchCheck::Diverges;
      }
    } catch (const Unsynthesizable&) {
      out.check = PatchCheck::Unsynthesizable;
    }
  });

  for (std::size_t i = 0; i < ds.decisions.size(); ++i) {
    DecisionResult d;
    d.id = "meta-" + std::to_string(i);
    d.decision = ds.decisions[i];
    d.outcome = results[i].run.outcome;
    d.steps = results[i].run.steps;
    d.valid = d.outcome.passed();
    d.diff = results[i].diff;
    d.check = results[i].check;
    d.patched_outcome = results[i].patched;
    report.steps += results[i].run.steps + results[i].patched_steps;
    report.valid += d.valid;
    report.decisions.push_back(std::move(d));
  }
  report.tentative = static_cast<int>(report.decisions.size());
  report.elapsed_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
  return report;
}

}  // namespace mj::repair
