#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mj/repair/parallel.hpp"
#include "mj/repair/strategy.hpp"

namespace mj::repair {

enum class Mode : std::uint8_t { Template, Meta };

std::string_view mode_name(Mode m);
Mode mode_from_name(std::string_view name);  // throws std::invalid_argument

struct RepairConfig {
  std::int64_t step_budget = 1'000'000;
  int ctor_depth = 3;
  ExecPolicy policy = ExecPolicy::Parallel;
  /// Meta mode: apply each synthesized patch and rerun the test on the plain
  /// interpreter.
  bool check_patches = true;
  std::string bug_id = "bug";
  std::string path = "input.mj";  // file name in diff headers
};

enum class PatchCheck : std::uint8_t { NotChecked, Agrees, Diverges, Unsynthesizable };
std::string_view to_string(PatchCheck c);

struct DecisionResult {
  std::string id;
  Decision decision;
  Outcome outcome;
  std::int64_t steps = 0;
  bool valid = false;
  std::optional<std::string> diff;  // absent when the decision has no source form
  PatchCheck check = PatchCheck::NotChecked;
  std::optional<Outcome> patched_outcome;
  std::string diff_path;  // relative to the diff directory once written

  /// `valid` or `invalid: <outcome>`.
  std::string verdict() const;
};

enum class FilterReason : std::uint8_t { NullValued, DuplicateValue };
std::string_view to_string(FilterReason r);

struct FilteredDecision {
  Decision decision;
  FilterReason reason;
  std::string detail;
};

struct ExplorationReport {
  std::string bug_id;
  Mode mode = Mode::Meta;
  std::string test;
  int site_id = -1;
  int candidates = 0;  // enumerated (template) or collected (meta)
  int tentative = 0;
  int valid = 0;
  double elapsed_ms = 0;
  std::int64_t steps = 0;  // interpreter steps over all runs
  std::vector<DecisionResult> decisions;
  std::vector<FilteredDecision> filtered_out;

  int unsynthesizable() const;
  int divergences() const;
};

/// Report as pretty-printed JSON (keys in a fixed order).
std::string report_to_json(const ExplorationReport& r);

// ---------------------------------------------------------------------------
// Mode comparison

struct ModeStats {
  double tentative = 0;
  double valid = 0;
  double elapsed_ms = 0;
  double steps = 0;
};

struct ComparisonRow {
  std::string bug_id;
  ModeStats template_mode;
  ModeStats meta_mode;
};

struct Comparison {
  std::vector<ComparisonRow> rows;
  ComparisonRow total;
  ComparisonRow average;
  ComparisonRow median;
};

ModeStats stats_of(const ExplorationReport& r);
/// Reads the counts of a report written by report_to_json.
ModeStats stats_from_json(const std::string& json_text, std::string* bug_id = nullptr, Mode* mode = nullptr);

Comparison compare_modes(std::vector<ComparisonRow> rows);
std::string format_comparison(const Comparison& c);
std::string format_comparison_csv(const Comparison& c);

}  // namespace mj::repair
