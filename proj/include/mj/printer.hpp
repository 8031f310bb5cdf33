#pragma once

#include <string>
#include <string_view>

#include "mj/ast.hpp"

namespace mj {

/// Deterministic source rendering. Intrinsic nodes print as calls into the
/// repair runtime (`checkForNull(...)`, `skipLine(...)`, ...); such output is
/// for reading only and does not parse back.
std::string print_program(const Program& program);
std::string print_class(const ClassDecl& cls, int indent = 0);

/// Renders one statement. The first line carries no indentation; following
/// lines start with `base_indent` followed by their own nesting.
std::string print_stmt(const Stmt& stmt, std::string_view base_indent = "");
std::string print_expr(const Expr& expr);

inline constexpr int kIndentWidth = 4;

}  // namespace mj
