#pragma once

#include <stdexcept>
#include <string_view>
#include <vector>

#include "mj/repair/metaprogram.hpp"
#include "mj/repair/report.hpp"

namespace mj::repair {

class NoNpeObserved : public std::runtime_error {
 public:
  explicit NoNpeObserved(Outcome outcome);
  const Outcome& outcome() const { return outcome_; }

 private:
  Outcome outcome_;
};

struct DecisionSet {
  int site_id = -1;
  std::vector<Collected> collected;
  std::vector<Decision> decisions;
  std::vector<FilteredDecision> filtered_out;
  std::int64_t steps = 0;  // of the detection run
};

/// Detection run: stops at the first harmful null dereference and collects
/// every runtime decision there, then filters equivalent ones.
DecisionSet detect_and_collect(const Metaprogram& mp, MethodRef test, const RepairConfig& config);

/// Drops null-valued variables and later decisions of a strategy whose value
/// duplicates an earlier one.
DecisionSet filter_equivalent(int site_id, std::vector<Collected> collected);

/// One run with `d` active.
RunResult replay(const Metaprogram& mp, MethodRef test, const Decision& d, const RepairConfig& config);

/// Runtime repair: detection, one replay per decision, and patch synthesis.
ExplorationReport explore_decisions(const Metaprogram& mp, std::string_view source, MethodRef test,
                                    const RepairConfig& config);

}  // namespace mj::repair
