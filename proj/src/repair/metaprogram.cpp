#include "mj/repair/metaprogram.hpp"

#include <map>
#include <stdexcept>

namespace mj::repair {

namespace {

Expr default_literal(const StaticType& t) {
  switch (t.kind) {
    case StaticType::Kind::Int: return make_expr(IntLit{0});
    case StaticType::Kind::Bool: return make_expr(BoolLit{false});
    case StaticType::Kind::Str: return make_expr(StrLit{""});
    default: return make_expr(NullLit{});
  }
}

class Transformer {
 public:
  explicit Transformer(const TypedProgram& tp) : tp_(tp) {
    for (const DerefSite& s : tp.sites) by_stmt_[s.stmt_id].push_back(s.id);
  }

  Program run() {
    Program p = tp_.program;
    for (std::size_t c = 0; c < p.classes.size(); ++c) {
      ClassDecl& cls = p.classes[c];
      const int ci = static_cast<int>(c);
      for (CtorDecl& k : cls.ctors) wrap_body(k.body, ci, k.params, false);
      for (MethodDecl& m : cls.methods) wrap_body(m.body, ci, m.params, m.static_context());
    }
    return p;
  }

 private:
  const TypedProgram& tp_;
  std::map<int, std::vector<int>> by_stmt_;

  void wrap_body(Block& body, int cls, const std::vector<mj::Param>& params, bool static_ctx) {
    block(body);
    PoolCollectStmt collect;
    for (std::size_t i = 0; i < params.size(); ++i)
      collect.seeds.push_back(
          PoolSeed{VarRef{VarKind::Param, params[i].name, cls, static_cast<int>(i)}, params[i].type});
    if (!static_ctx)
      for (const FieldInfo& f : tp_.info.classes[cls].layout)
        collect.seeds.push_back(PoolSeed{VarRef{VarKind::Field, f.name, f.owner, f.slot}, f.type});
    for (const FieldInfo& f : tp_.info.statics)
      collect.seeds.push_back(PoolSeed{VarRef{VarKind::Static, f.name, f.owner, f.slot}, f.type});
    ForceReturnScope scope;
    scope.body = std::move(body);
    Block wrapped;
    wrapped.stmts.push_back(make_stmt(std::move(collect)));
    wrapped.stmts.push_back(make_stmt(std::move(scope)));
    body = std::move(wrapped);
  }

  void block(Block& b) {
    for (Stmt& s : b.stmts) stmt(s);
  }

  void stmt(Stmt& s) {
    const int id = s.stmt_id;
    std::visit(
        [&](auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, Block>) {
            block(n);
          } else if constexpr (std::is_same_v<T, VarDecl>) {
            Expr init = n.init ? std::move(*n.init) : default_literal(n.type);
            expr(init);
            n.init = make_expr(PoolVarExpr{PoolEvent::InitVar, n.name, std::move(init), {}, {}});
          } else if constexpr (std::is_same_v<T, AssignStmt>) {
            expr(n.target);
            expr(n.value);
            if (auto* name = std::get_if<NameExpr>(&n.target.node);
                name && (name->ref.kind == VarKind::Local || name->ref.kind == VarKind::Param))
              n.value = make_expr(PoolVarExpr{PoolEvent::ModifyVar, name->name, std::move(n.value), {}, {}});
          } else if constexpr (std::is_same_v<T, ExprStmt>) {
            expr(n.expr);
          } else if constexpr (std::is_same_v<T, IfStmt>) {
            expr(n.cond);
            block(n.then_block);
            if (n.else_block) block(*n.else_block);
          } else if constexpr (std::is_same_v<T, WhileStmt>) {
            expr(n.cond);
            block(n.body);
          } else if constexpr (std::is_same_v<T, ReturnStmt>) {
            if (n.value) expr(*n.value);
          } else if constexpr (std::is_same_v<T, TryStmt>) {
            block(n.body);
            block(n.handler);
          } else if constexpr (std::is_same_v<T, AssertStmt>) {
            expr(n.cond);
          } else if constexpr (std::is_same_v<T, SuperCallStmt>) {
            for (Expr& a : n.args) expr(a);
          }
        },
        s.node);

    auto it = by_stmt_.find(id);
    if (it == by_stmt_.end()) return;
    SkipGuardStmt guard;
    for (int site_id : it->second) {
      const DerefSite& site = tp_.sites[site_id];
      GuardSite g;
      g.site_id = site_id;
      if (site.pure) g.receiver = site.receiver;
      guard.sites.push_back(std::move(g));
    }
    const SourceSpan span = s.span;
    guard.inner = Box<Stmt>(std::move(s));
    s = make_stmt(std::move(guard));
    s.span = span;
  }

  Expr check_for_null(Expr receiver, int site_id) {
    const SourceSpan span = receiver.span;
    Expr e = make_expr(CheckForNullExpr{std::move(receiver), site_id, tp_.sites[site_id].receiver_type});
    e.span = span;
    return e;
  }

  void expr(Expr& e) {
    std::visit(
        [&](auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, FieldAccess>) {
            expr(*n.object);
            if (n.site_id >= 0) *n.object = check_for_null(std::move(*n.object), n.site_id);
          } else if constexpr (std::is_same_v<T, MethodCall>) {
            if (n.receiver) {
              expr(**n.receiver);
              if (n.site_id >= 0) **n.receiver = check_for_null(std::move(**n.receiver), n.site_id);
            }
            for (Expr& a : n.args) expr(a);
          } else if constexpr (std::is_same_v<T, NewExpr>) {
            for (Expr& a : n.args) expr(a);
          } else if constexpr (std::is_same_v<T, BinaryExpr>) {
            expr(*n.lhs);
            expr(*n.rhs);
          } else if constexpr (std::is_same_v<T, UnaryExpr> || std::is_same_v<T, CastExpr>) {
            expr(*n.operand);
          }
        },
        e.node);
  }
};

}  // namespace

Metaprogram transform(TypedProgramPtr original) {
  Metaprogram mp;
  Program p = Transformer(*original).run();
  CheckResult r = typecheck(std::move(p));
  if (!r.ok()) throw CompileError(r.diagnostics);
  if (r.program->sites.size() != original->sites.size())
    throw std::logic_error("metaprogram changed the dereference sites");
  for (const DerefSite& s : original->sites) mp.scope.push_back(accessible_vars(*original, s));
  mp.original = std::move(original);
  mp.program = std::move(r.program);
  return mp;
}

}  // namespace mj::repair
