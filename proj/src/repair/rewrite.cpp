#include "mj/repair/rewrite.hpp"

#include "mj/printer.hpp"

namespace mj::repair {

namespace {

Expr null_check(const Expr& receiver, BinaryOp op) {
  return make_expr(BinaryExpr{op, receiver, make_expr(NullLit{})});
}

Expr name_expr(const std::string& name) {
  NameExpr n;
  n.name = name;
  return make_expr(std::move(n));
}

Block block_of(std::vector<Stmt> stmts) {
  Block b;
  b.stmts = std::move(stmts);
  return b;
}

Stmt if_else(Expr cond, std::vector<Stmt> then_stmts, std::optional<std::vector<Stmt>> else_stmts) {
  IfStmt s{std::move(cond), block_of(std::move(then_stmts)), std::nullopt};
  if (else_stmts) s.else_block = block_of(std::move(*else_stmts));
  return make_stmt(std::move(s));
}

bool substitute_in(Expr& e, int site_id, const Expr& replacement);

bool substitute_in(std::vector<Expr>& es, int site_id, const Expr& replacement) {
  for (Expr& e : es)
    if (substitute_in(e, site_id, replacement)) return true;
  return false;
}

// Replaces the receiver of the dereference numbered `site_id`.
bool substitute_in(Expr& e, int site_id, const Expr& replacement) {
  return std::visit(
      [&](auto& n) -> bool {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, FieldAccess>) {
          if (n.site_id == site_id) {
            *n.object = replacement;
            return true;
          }
          return substitute_in(*n.object, site_id, replacement);
        } else if constexpr (std::is_same_v<T, MethodCall>) {
          if (n.receiver && n.site_id == site_id) {
            **n.receiver = replacement;
            return true;
          }
          if (n.receiver && substitute_in(**n.receiver, site_id, replacement)) return true;
          return substitute_in(n.args, site_id, replacement);
        } else if constexpr (std::is_same_v<T, NewExpr>) {
          return substitute_in(n.args, site_id, replacement);
        } else if constexpr (std::is_same_v<T, BinaryExpr>) {
          return substitute_in(*n.lhs, site_id, replacement) || substitute_in(*n.rhs, site_id, replacement);
        } else if constexpr (std::is_same_v<T, UnaryExpr> || std::is_same_v<T, CastExpr>) {
          return substitute_in(*n.operand, site_id, replacement);
        } else if constexpr (std::is_same_v<T, CheckForNullExpr> || std::is_same_v<T, PoolVarExpr>) {
          return substitute_in(*n.inner, site_id, replacement);
        } else {
          return false;
        }
      },
      e.node);
}

// Substitutes within the statement's own expressions (not nested blocks).
bool substitute_in(Stmt& s, int site_id, const Expr& replacement) {
  return std::visit(
      [&](auto& n) -> bool {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, VarDecl>) {
          return n.init && substitute_in(*n.init, site_id, replacement);
        } else if constexpr (std::is_same_v<T, AssignStmt>) {
          return substitute_in(n.target, site_id, replacement) || substitute_in(n.value, site_id, replacement);
        } else if constexpr (std::is_same_v<T, ExprStmt>) {
          return substitute_in(n.expr, site_id, replacement);
        } else if constexpr (std::is_same_v<T, IfStmt> || std::is_same_v<T, WhileStmt> ||
                             std::is_same_v<T, AssertStmt>) {
          return substitute_in(n.cond, site_id, replacement);
        } else if constexpr (std::is_same_v<T, ReturnStmt>) {
          return n.value && substitute_in(*n.value, site_id, replacement);
        } else {
          return false;
        }
      },
      s.node);
}

Stmt fresh_copy(const Stmt& s) {
  Stmt c = s;
  c.stmt_id = -1;
  return c;
}

Expr default_literal(const StaticType& t) {
  switch (t.kind) {
    case StaticType::Kind::Int: return make_expr(IntLit{0});
    case StaticType::Kind::Bool: return make_expr(BoolLit{false});
    case StaticType::Kind::Str: return make_expr(StrLit{""});
    default: return make_expr(NullLit{});
  }
}

}  // namespace

Expr param_expr(const ProgramInfo& info, const StrategyParam& p, const StaticType& required) {
  if (auto* v = std::get_if<VarParam>(&p)) {
    Expr e;
    const auto dot = v->text.find('.');
    if (dot == std::string::npos) {
      e = name_expr(v->text);
    } else {
      e = make_expr(FieldAccess{name_expr(v->text.substr(0, dot)), v->text.substr(dot + 1)});
    }
    if (required.is_class() && !info.is_subtype(v->type, required))
      return make_expr(CastExpr{required.class_name, std::move(e)});
    return e;
  }
  if (auto* c = std::get_if<CtorParam>(&p)) return c->plan.to_expr();
  if (auto* k = std::get_if<ConstParam>(&p)) {
    switch (k->kind) {
      case ConstParam::Kind::Null: return make_expr(NullLit{});
      case ConstParam::Kind::Zero: return make_expr(IntLit{0});
      case ConstParam::Kind::One: return make_expr(IntLit{1});
      case ConstParam::Kind::Empty: return make_expr(StrLit{""});
    }
  }
  throw std::invalid_argument("decision has no parameter expression");
}

std::vector<Stmt> rewrite_statement(const TypedProgram& tp, const Decision& d, bool runtime_forms) {
  validate(d);
  const DerefSite& site = tp.sites.at(d.site_id);
  const Stmt* original = find_stmt(tp.program, site.stmt_id);
  if (!original) throw std::logic_error("site statement not found");
  const bool is_decl = original->is<VarDecl>();
  if (d.strategy == Strategy::S3 && is_decl && !runtime_forms)
    throw TemplateInapplicable("skip statement cannot be applied to a local variable declaration");

  const Expr& r = site.receiver;
  Stmt stmt = fresh_copy(*original);

  // Statement with the receiver replaced; declarations become assignments
  // in the declaration-split form.
  auto as_branch = [&](Stmt s) -> Stmt {
    if (!is_decl) return s;
    const VarDecl& v = s.as<VarDecl>();
    return make_stmt(AssignStmt{name_expr(v.name), *v.init});
  };
  auto split_head = [&]() -> Stmt {
    const VarDecl& v = original->as<VarDecl>();
    return make_stmt(VarDecl{v.type, v.name, std::nullopt});
  };

  auto guarded_before = [&](std::vector<Stmt> then_stmts) {
    std::vector<Stmt> out;
    out.push_back(if_else(null_check(r, BinaryOp::Eq), std::move(then_stmts), std::nullopt));
    out.push_back(stmt);
    return out;
  };

  switch (d.strategy) {
    case Strategy::S1a:
    case Strategy::S2a: {
      Stmt replaced = stmt;
      if (!substitute_in(replaced, d.site_id, param_expr(tp.info, d.param, site.receiver_type)))
        throw std::logic_error("site not found in its statement");
      std::vector<Stmt> out;
      if (is_decl) out.push_back(split_head());
      std::vector<Stmt> then_branch;
      then_branch.push_back(as_branch(std::move(replaced)));
      std::vector<Stmt> else_branch;
      else_branch.push_back(as_branch(stmt));
      out.push_back(if_else(null_check(r, BinaryOp::Eq), std::move(then_branch), std::move(else_branch)));
      return out;
    }
    case Strategy::S1b:
    case Strategy::S2b: {
      std::vector<Stmt> assign;
      assign.push_back(make_stmt(AssignStmt{r, param_expr(tp.info, d.param, site.receiver_type)}));
      return guarded_before(std::move(assign));
    }
    case Strategy::S3: {
      std::vector<Stmt> out;
      if (!is_decl) {
        std::vector<Stmt> body;
        body.push_back(stmt);
        out.push_back(if_else(null_check(r, BinaryOp::Ne), std::move(body), std::nullopt));
        return out;
      }
      const VarDecl& v = original->as<VarDecl>();
      out.push_back(split_head());
      std::vector<Stmt> then_branch;
      then_branch.push_back(make_stmt(AssignStmt{name_expr(v.name), default_literal(v.type)}));
      std::vector<Stmt> else_branch;
      else_branch.push_back(as_branch(stmt));
      out.push_back(if_else(null_check(r, BinaryOp::Eq), std::move(then_branch), std::move(else_branch)));
      return out;
    }
    case Strategy::S4a:
    case Strategy::S4b:
    case Strategy::S4c:
    case Strategy::S4d: {
      std::optional<Expr> value;
      if (d.strategy == Strategy::S4a) value = make_expr(NullLit{});
      if (d.strategy == Strategy::S4b || d.strategy == Strategy::S4c)
        value = param_expr(tp.info, d.param, site.return_type);
      std::vector<Stmt> ret;
      ret.push_back(make_stmt(ReturnStmt{std::move(value)}));
      return guarded_before(std::move(ret));
    }
  }
  return {};
}

namespace {

std::pair<Block*, std::size_t> find_in_block(Block& b, int id);

std::pair<Block*, std::size_t> find_in_stmt(Stmt& s, int id) {
  return std::visit(
      [&](auto& n) -> std::pair<Block*, std::size_t> {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Block>) {
          return find_in_block(n, id);
        } else if constexpr (std::is_same_v<T, IfStmt>) {
          auto r = find_in_block(n.then_block, id);
          if (!r.first && n.else_block) r = find_in_block(*n.else_block, id);
          return r;
        } else if constexpr (std::is_same_v<T, WhileStmt>) {
          return find_in_block(n.body, id);
        } else if constexpr (std::is_same_v<T, TryStmt>) {
          auto r = find_in_block(n.body, id);
          if (!r.first) r = find_in_block(n.handler, id);
          return r;
        } else if constexpr (std::is_same_v<T, ForceReturnScope>) {
          return find_in_block(n.body, id);
        } else if constexpr (std::is_same_v<T, SkipGuardStmt>) {
          return find_in_stmt(*n.inner, id);
        } else {
          return {nullptr, 0};
        }
      },
      s.node);
}

std::pair<Block*, std::size_t> find_in_block(Block& b, int id) {
  for (std::size_t i = 0; i < b.stmts.size(); ++i) {
    if (b.stmts[i].stmt_id == id) return {&b, i};
    auto r = find_in_stmt(b.stmts[i], id);
    if (r.first) return r;
  }
  return {nullptr, 0};
}

std::string line_indent(std::string_view source, std::size_t pos) {
  std::size_t start = source.rfind('\n', pos == 0 ? 0 : pos - 1);
  start = start == std::string_view::npos ? 0 : start + 1;
  std::size_t end = start;
  while (end < pos && (source[end] == ' ' || source[end] == '\t')) ++end;
  return std::string(source.substr(start, end - start));
}

}  // namespace

std::pair<Block*, std::size_t> find_parent_block(Program& program, int stmt_id) {
  for (ClassDecl& c : program.classes) {
    for (CtorDecl& k : c.ctors)
      if (auto r = find_in_block(k.body, stmt_id); r.first) return r;
    for (MethodDecl& m : c.methods)
      if (auto r = find_in_block(m.body, stmt_id); r.first) return r;
  }
  return {nullptr, 0};
}

Program apply_template(const TypedProgram& tp, const Decision& d) {
  std::vector<Stmt> replacement = rewrite_statement(tp, d, false);
  Program copy = tp.program;
  auto [block, index] = find_parent_block(copy, tp.sites.at(d.site_id).stmt_id);
  if (!block) throw std::logic_error("site statement has no enclosing block");
  block->stmts.erase(block->stmts.begin() + static_cast<std::ptrdiff_t>(index));
  block->stmts.insert(block->stmts.begin() + static_cast<std::ptrdiff_t>(index),
                      std::make_move_iterator(replacement.begin()), std::make_move_iterator(replacement.end()));
  return copy;
}

std::string splice_rewrite(const TypedProgram& tp, std::string_view source, const Decision& d, bool runtime_forms) {
  std::vector<Stmt> replacement = rewrite_statement(tp, d, runtime_forms);
  const SourceSpan& span = tp.sites.at(d.site_id).stmt_span;
  const std::string indent = line_indent(source, span.begin);
  std::string text;
  for (std::size_t i = 0; i < replacement.size(); ++i) {
    if (i) text += "\n" + indent;
    text += print_stmt(replacement[i], indent);
  }
  std::string out(source.substr(0, span.begin));
  out += text;
  out += source.substr(span.end);
  return out;
}

}  // namespace mj::repair
