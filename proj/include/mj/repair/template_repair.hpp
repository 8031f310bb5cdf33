#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mj/repair/report.hpp"

namespace mj::repair {

class NotAnNpeBug : public std::runtime_error {
 public:
  explicit NotAnNpeBug(Outcome baseline);
  const Outcome& baseline() const { return baseline_; }

 private:
  Outcome baseline_;
};

/// Static parameter space at `site`: strategies in taxonomy order, each
/// crossed with its statically derived parameters.
std::vector<Decision> enumerate_static_candidates(const TypedProgram& tp, const DerefSite& site, int ctor_depth);

/// Plain run of `test`; throws NotAnNpeBug unless it ends in an uncaught NPE.
RunResult baseline_run(const TypedProgram& tp, MethodRef test, std::int64_t budget);

/// Template repair: apply, re-check and run every static candidate at the
/// baseline NPE site.
ExplorationReport explore_templates(const TypedProgram& tp, std::string_view source, MethodRef test,
                                    const RepairConfig& config);

}  // namespace mj::repair
