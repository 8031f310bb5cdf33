#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mj/repair/report.hpp"

namespace mj::repair {

struct CorpusCase {
  std::string bug_id;
  std::filesystem::path source;
  std::string test;
  std::vector<std::string> tags;
};

class BaselineMismatch : public std::runtime_error {
 public:
  BaselineMismatch(const std::string& bug_id, const Outcome& outcome);
  const Outcome& outcome() const { return outcome_; }

 private:
  Outcome outcome_;
};

/// Reads `cases.json` in `dir`: [{"bugId", "file", "test", "tags"}].
std::vector<CorpusCase> load_corpus(const std::filesystem::path& dir);

struct LoadedCase {
  CorpusCase info;
  std::string source;
  TypedProgramPtr program;
  MethodRef test;
};

/// Compiles the case and checks that its test fails with an uncaught NPE.
LoadedCase load_case(const CorpusCase& c);

ExplorationReport run_case(const LoadedCase& c, Mode mode, RepairConfig config);

/// Writes via a temporary file and rename.
void write_atomic(const std::filesystem::path& path, const std::string& content);

/// Writes one diff per decision as `<diff_dir>/<bugId>/<id>.diff` (with a
/// `# verdict:` trailer) and records the relative paths in the report.
void write_diffs(ExplorationReport& report, const std::filesystem::path& diff_dir);

}  // namespace mj::repair
