#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace mj {

/// Location of a node in its source file. Line and column are 1-based; the
/// byte range is half-open. The file name lives on the owning Program.
struct SourceSpan {
  int line = 0;
  int column = 0;
  std::size_t begin = 0;
  std::size_t end = 0;

  bool valid() const { return line > 0; }
};

enum class Severity { Error, Warning, Note };

struct Diagnostic {
  std::string file;
  int line = 0;
  int column = 0;
  Severity severity = Severity::Error;
  std::string message;
};

/// Renders `file:line:col: severity: message`.
std::string format_diagnostic(const Diagnostic& d);

class SyntaxError : public std::runtime_error {
 public:
  SyntaxError(Diagnostic diag, std::vector<std::string> expected);

  const Diagnostic& diagnostic() const { return diag_; }
  const std::vector<std::string>& expected() const { return expected_; }

 private:
  Diagnostic diag_;
  std::vector<std::string> expected_;
};

}  // namespace mj
