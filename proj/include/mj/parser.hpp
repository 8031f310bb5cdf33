#pragma once

#include <string>
#include <string_view>

#include "mj/ast.hpp"

namespace mj {

/// Parses an MJ compilation unit. Throws SyntaxError carrying the offending
/// position and the set of tokens that would have been accepted there.
Program parse(std::string_view source, const std::string& file = "<input>");

/// Parses a single statement (used by tests and the patch machinery).
Stmt parse_statement(std::string_view source, const std::string& file = "<input>");

}  // namespace mj
