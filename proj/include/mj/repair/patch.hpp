#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "mj/repair/strategy.hpp"

namespace mj::repair {

class HunkMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The decision has no source form that compiles at its site.
class Unsynthesizable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Unified diff with three lines of context; empty when the texts are equal.
std::string emit_unified_diff(std::string_view original, std::string_view patched, const std::string& path);

/// Applies a diff made by emit_unified_diff. Lines starting with `#` are
/// ignored.
std::string apply_patch(std::string_view original, std::string_view diff);

struct Patch {
  Decision decision;
  SourceSpan span;  // replaced statement in the original
  std::string patched_source;
  std::string diff;
};

/// Source form of a decision. Throws Unsynthesizable when the rewritten
/// program does not compile.
Patch decision_to_patch(const TypedProgram& tp, std::string_view source, const Decision& d, const std::string& path);

}  // namespace mj::repair
