#include "mj/ast.hpp"

namespace mj {
namespace {

void dump(std::string& out, const Expr& e);
void dump(std::string& out, const Stmt& s);

void dump_list(std::string& out, const std::vector<Expr>& xs) {
  out += '[';
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ' ';
    dump(out, xs[i]);
  }
  out += ']';
}

void dump_block(std::string& out, const Block& b) {
  out += "(block";
  for (const Stmt& s : b.stmts) {
    out += ' ';
    dump(out, s);
  }
  out += ')';
}

const char* op_name(BinaryOp op) {
  static const char* names[] = {"+", "-", "*", "/", "%", "==", "!=",
                                "<", "<=", ">", ">=", "&&", "||"};
  return names[static_cast<int>(op)];
}

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + '"';
}

void dump(std::string& out, const Expr& e) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, IntLit>) {
          out += std::to_string(n.value);
        } else if constexpr (std::is_same_v<T, BoolLit>) {
          out += n.value ? "true" : "false";
        } else if constexpr (std::is_same_v<T, StrLit>) {
          out += quoted(n.value);
        } else if constexpr (std::is_same_v<T, NullLit>) {
          out += "null";
        } else if constexpr (std::is_same_v<T, ThisExpr>) {
          out += "this";
        } else if constexpr (std::is_same_v<T, NameExpr>) {
          out += "(name " + n.name + ")";
        } else if constexpr (std::is_same_v<T, FieldAccess>) {
          out += "(field ";
          dump(out, *n.object);
          out += " " + n.field + ")";
        } else if constexpr (std::is_same_v<T, MethodCall>) {
          out += "(call ";
          if (n.receiver) {
            dump(out, **n.receiver);
          } else {
            out += '_';
          }
          out += " " + n.method + " ";
          dump_list(out, n.args);
          out += ')';
        } else if constexpr (std::is_same_v<T, NewExpr>) {
          out += "(new " + n.class_name + " ";
          dump_list(out, n.args);
          out += ')';
        } else if constexpr (std::is_same_v<T, BinaryExpr>) {
          out += "(";
          out += op_name(n.op);
          out += ' ';
          dump(out, *n.lhs);
          out += ' ';
          dump(out, *n.rhs);
          out += ')';
        } else if constexpr (std::is_same_v<T, UnaryExpr>) {
          out += n.op == UnaryOp::Not ? "(! " : "(neg ";
          dump(out, *n.operand);
          out += ')';
        } else if constexpr (std::is_same_v<T, CastExpr>) {
          out += "(cast " + n.class_name + " ";
          dump(out, *n.operand);
          out += ')';
        } else if constexpr (std::is_same_v<T, CheckForNullExpr>) {
          out += "(checkForNull ";
          dump(out, *n.inner);
          out += " " + n.expected.to_string() + " " + std::to_string(n.site_id) + ")";
        } else if constexpr (std::is_same_v<T, PoolVarExpr>) {
          out += n.event == PoolEvent::InitVar ? "(initVar " : "(modifyVar ";
          dump(out, *n.inner);
          out += " " + n.name + ")";
        }
      },
      e.node);
}

void dump(std::string& out, const Stmt& s) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Block>) {
          dump_block(out, n);
        } else if constexpr (std::is_same_v<T, VarDecl>) {
          out += "(var " + n.type.to_string() + " " + n.name;
          if (n.init) {
            out += ' ';
            dump(out, *n.init);
          }
          out += ')';
        } else if constexpr (std::is_same_v<T, AssignStmt>) {
          out += "(assign ";
          dump(out, n.target);
          out += ' ';
          dump(out, n.value);
          out += ')';
        } else if constexpr (std::is_same_v<T, ExprStmt>) {
          out += "(expr ";
          dump(out, n.expr);
          out += ')';
        } else if constexpr (std::is_same_v<T, IfStmt>) {
          out += "(if ";
          dump(out, n.cond);
          out += ' ';
          dump_block(out, n.then_block);
          if (n.else_block) {
            out += ' ';
            dump_block(out, *n.else_block);
          }
          out += ')';
        } else if constexpr (std::is_same_v<T, WhileStmt>) {
          out += "(while ";
          dump(out, n.cond);
          out += ' ';
          dump_block(out, n.body);
          out += ')';
        } else if constexpr (std::is_same_v<T, ReturnStmt>) {
          out += "(return";
          if (n.value) {
            out += ' ';
            dump(out, *n.value);
          }
          out += ')';
        } else if constexpr (std::is_same_v<T, TryStmt>) {
          out += "(try ";
          dump_block(out, n.body);
          out += n.kind == CatchKind::NPE ? " NPE " : " Any ";
          out += n.var + " ";
          dump_block(out, n.handler);
          out += ')';
        } else if constexpr (std::is_same_v<T, AssertStmt>) {
          out += "(assert ";
          dump(out, n.cond);
          out += ')';
        } else if constexpr (std::is_same_v<T, SuperCallStmt>) {
          out += "(super ";
          dump_list(out, n.args);
          out += ')';
        } else if constexpr (std::is_same_v<T, SkipGuardStmt>) {
          out += "(skipLine [";
          for (std::size_t i = 0; i < n.sites.size(); ++i) {
            if (i) out += ' ';
            out += std::to_string(n.sites[i].site_id);
            if (n.sites[i].receiver) {
              out += ':';
              dump(out, *n.sites[i].receiver);
            }
          }
          out += "] ";
          dump(out, *n.inner);
          out += ')';
        } else if constexpr (std::is_same_v<T, PoolCollectStmt>) {
          out += "(collect";
          for (const PoolSeed& seed : n.seeds) out += " " + seed.ref.name;
          out += ')';
        } else if constexpr (std::is_same_v<T, ForceReturnScope>) {
          out += "(forceReturnScope ";
          dump_block(out, n.body);
          out += ')';
        }
      },
      s.node);
}

std::string dump_params(const std::vector<Param>& ps) {
  std::string out = "(";
  for (std::size_t i = 0; i < ps.size(); ++i) {
    if (i) out += ' ';
    out += ps[i].type.to_string() + " " + ps[i].name;
  }
  return out + ")";
}

}  // namespace

std::string dump_structure(const Expr& expr) {
  std::string out;
  dump(out, expr);
  return out;
}

std::string dump_structure(const Stmt& stmt) {
  std::string out;
  dump(out, stmt);
  return out;
}

std::string dump_structure(const Program& program) {
  std::string out;
  for (const ClassDecl& c : program.classes) {
    out += "(class " + c.name;
    if (c.super_name) out += " extends " + *c.super_name;
    for (const FieldDecl& f : c.fields) {
      out += f.is_static ? " (static-field " : " (field ";
      out += f.type.to_string() + " " + f.name;
      if (f.init) {
        out += ' ';
        dump(out, *f.init);
      }
      out += ')';
    }
    for (const CtorDecl& k : c.ctors) {
      out += " (ctor " + dump_params(k.params) + " ";
      dump_block(out, k.body);
      out += ')';
    }
    for (const MethodDecl& m : c.methods) {
      out += " (method";
      if (m.is_test) out += " test";
      if (m.is_static) out += " static";
      out += " " + m.return_type.to_string() + " " + m.name + " " + dump_params(m.params) + " ";
      dump_block(out, m.body);
      out += ')';
    }
    out += ")\n";
  }
  return out;
}

}  // namespace mj
