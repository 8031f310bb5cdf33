#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mj/repair/strategy.hpp"

namespace mj::repair {

class TemplateInapplicable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The parameter expression as written at the site. Variables whose declared
/// type is not a subtype of `required` are cast to it.
Expr param_expr(const ProgramInfo& info, const StrategyParam& p, const StaticType& required);

/// Statements that replace the statement of `d`'s site. With
/// `runtime_forms` false, decisions without a template (S3 on a declaration)
/// throw TemplateInapplicable; with it true they use the declaration-split
/// form.
std::vector<Stmt> rewrite_statement(const TypedProgram& tp, const Decision& d, bool runtime_forms);

/// Copy of the program with the site's statement rewritten.
Program apply_template(const TypedProgram& tp, const Decision& d);

/// Copy of `source` with the site's statement replaced by the rewritten
/// statements, printed at the statement's indentation.
std::string splice_rewrite(const TypedProgram& tp, std::string_view source, const Decision& d, bool runtime_forms);

/// Finds the block holding statement `stmt_id` and its index there.
std::pair<Block*, std::size_t> find_parent_block(Program& program, int stmt_id);

}  // namespace mj::repair
