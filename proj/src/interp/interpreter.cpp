#include "mj/interp.hpp"

#include <limits>

namespace mj {

Value default_value_of(const StaticType& t) {
  switch (t.kind) {
    case StaticType::Kind::Int: return Value(std::int64_t{0});
    case StaticType::Kind::Bool: return Value(false);
    case StaticType::Kind::Str: return Value(std::string());
    default: return Value(Null{});
  }
}

namespace {

std::string quote_str(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string describe(const Value& v, const ProgramInfo& info) {
  return std::visit(
      [&](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Null>) {
          return "null";
        } else if constexpr (std::is_same_v<T, std::int64_t>) {
          return std::to_string(x);
        } else if constexpr (std::is_same_v<T, bool>) {
          return x ? "true" : "false";
        } else if constexpr (std::is_same_v<T, std::string>) {
          return quote_str(x);
        } else {
          return info.classes[x->cls].name + "#" + std::to_string(x->id);
        }
      },
      v.v);
}

std::string to_string(ExceptionKind k) {
  switch (k) {
    case ExceptionKind::NPE: return "NPE";
    case ExceptionKind::ArithmeticError: return "ArithmeticError";
    case ExceptionKind::AssertError: return "AssertError";
    case ExceptionKind::CastError: return "CastError";
    case ExceptionKind::ConstructionFailure: return "ConstructionFailure";
    case ExceptionKind::StackOverflow: return "StackOverflow";
  }
  return "?";
}

std::string Outcome::summary() const {
  switch (kind) {
    case OutcomeKind::Pass: return "pass";
    case OutcomeKind::AssertFail: return "assert-fail";
    case OutcomeKind::BudgetExhausted: return "budget-exhausted";
    case OutcomeKind::Uncaught: {
      std::string s = "uncaught " + to_string(*exception);
      if (site_id >= 0) s += " at site " + std::to_string(site_id);
      return s;
    }
  }
  return "?";
}

namespace {

struct BudgetExceeded {};

bool catches(CatchKind handler, ExceptionKind k) {
  if (handler == CatchKind::NPE) return k == ExceptionKind::NPE;
  return k == ExceptionKind::NPE || k == ExceptionKind::ArithmeticError ||
         k == ExceptionKind::CastError;
}

std::int64_t wrap_add(std::int64_t a, std::int64_t b) {
  return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) + static_cast<std::uint64_t>(b));
}
std::int64_t wrap_sub(std::int64_t a, std::int64_t b) {
  return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) - static_cast<std::uint64_t>(b));
}
std::int64_t wrap_mul(std::int64_t a, std::int64_t b) {
  return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) * static_cast<std::uint64_t>(b));
}

class FrameScope {
 public:
  FrameScope(HookRuntime* hooks, Interpreter& in, Frame& f) : hooks_(hooks), in_(in), f_(f) {
    if (hooks_) hooks_->on_frame_enter(in_, f_);
  }
  ~FrameScope() {
    if (hooks_) hooks_->on_frame_exit(in_, f_);
  }

 private:
  HookRuntime* hooks_;
  Interpreter& in_;
  Frame& f_;
};

class BlockScope {
 public:
  BlockScope(HookRuntime* hooks, Interpreter& in, Frame& f) : hooks_(hooks), in_(in), f_(f) {
    if (hooks_) hooks_->on_scope_enter(in_, f_);
  }
  ~BlockScope() {
    if (hooks_) hooks_->on_scope_exit(in_, f_);
  }

 private:
  HookRuntime* hooks_;
  Interpreter& in_;
  Frame& f_;
};

class HandlerScope {
 public:
  explicit HandlerScope(int& counter) : counter_(counter) { ++counter_; }
  ~HandlerScope() { --counter_; }

 private:
  int& counter_;
};

}  // namespace

Interpreter::Interpreter(const TypedProgram& program, RunOptions options)
    : prog_(program), opt_(options) {
  for (const FieldInfo& s : prog_.info.statics) statics_.push_back(default_value_of(s.type));
}

void Interpreter::tick(const SourceSpan&) {
  if (++steps_ > opt_.step_budget) throw BudgetExceeded{};
}

void Interpreter::trace(int site_id, std::string event) {
  if (opt_.trace) trace_.push_back(TraceEvent{steps_, site_id, std::move(event)});
}

void Interpreter::raise(ExceptionKind kind, const SourceSpan& at, std::string message, int site) {
  trace(site, "throw " + to_string(kind));
  throw MjException{kind, site, at, std::move(message)};
}

RunResult Interpreter::run_test(MethodRef test) {
  RunResult result;
  try {
    for (std::size_t c = 0; c < prog_.program.classes.size(); ++c) {
      const ClassDecl& d = prog_.program.classes[c];
      for (const FieldDecl& fd : d.fields) {
        if (!fd.is_static || !fd.init) continue;
        Frame f{MemberKey{static_cast<int>(c), MemberKind::Method, -1}, nullptr, {}, 0};
        statics_[fd.slot] = eval(f, *fd.init);
      }
    }
    call(prog_.info.method(test), nullptr, {}, 0, prog_.method_decl(test).span);
    result.outcome = Outcome::pass();
  } catch (const MjException& e) {
    if (e.kind == ExceptionKind::AssertError) {
      result.outcome.kind = OutcomeKind::AssertFail;
    } else {
      result.outcome.kind = OutcomeKind::Uncaught;
      result.outcome.exception = e.kind;
    }
    result.outcome.site_id = e.site_id;
    result.outcome.where = e.where;
    result.outcome.message = e.message;
  } catch (const BudgetExceeded&) {
    result.outcome.kind = OutcomeKind::BudgetExhausted;
    result.outcome.message = "step budget exhausted";
  } catch (const DetectAbort& a) {
    result.outcome.kind = OutcomeKind::Uncaught;
    result.outcome.exception = ExceptionKind::NPE;
    result.outcome.site_id = a.site_id;
    if (a.site_id >= 0) result.outcome.where = prog_.sites[a.site_id].span;
    result.outcome.message = "null dereference";
  } catch (const SkipStatementSignal& s) {
    result.outcome.kind = OutcomeKind::Uncaught;
    result.outcome.exception = ExceptionKind::NPE;
    result.outcome.site_id = s.site_id;
    result.outcome.message = "skip signal escaped its statement";
  } catch (const ForceReturnSignal&) {
    result.outcome.kind = OutcomeKind::Uncaught;
    result.outcome.exception = ExceptionKind::NPE;
    result.outcome.message = "forced return outside a method body";
  }
  result.steps = steps_;
  result.trace = std::move(trace_);
  return result;
}

Object* Interpreter::allocate(int cls) {
  Object& o = heap_.emplace_back();
  o.cls = cls;
  o.id = static_cast<int>(heap_.size());
  for (const FieldInfo& f : prog_.info.classes[cls].layout) o.fields.push_back(default_value_of(f.type));
  return &o;
}

Value Interpreter::instantiate(int cls, int ctor, std::vector<Value> args, int depth) {
  Object* obj = allocate(cls);
  run_ctor(obj, cls, prog_.info.classes[cls].ctors[ctor].decl_index, std::move(args), depth + 1);
  return Value(obj);
}

void Interpreter::init_fields(Object* obj, int cls, int depth) {
  const ClassInfo& ci = prog_.info.classes[cls];
  if (ci.decl < 0) return;
  const ClassDecl& d = prog_.program.classes[ci.decl];
  Frame f{MemberKey{cls, MemberKind::Ctor, -1}, obj, {}, depth};
  for (const FieldDecl& fd : d.fields)
    if (!fd.is_static && fd.init) obj->fields[fd.slot] = eval(f, *fd.init);
}

void Interpreter::run_ctor(Object* obj, int cls, int ctor_decl, std::vector<Value> args, int depth) {
  const ClassInfo& ci = prog_.info.classes[cls];
  if (ci.super < 0) return;  // Object
  const ClassDecl& d = prog_.program.classes[ci.decl];
  if (depth > opt_.max_depth) raise(ExceptionKind::StackOverflow, d.span, "call depth exceeded");

  auto implicit_super = [&] {
    const ClassInfo& sup = prog_.info.classes[ci.super];
    run_ctor(obj, ci.super, sup.ctors[sup.ctor_with_arity(0)].decl_index, {}, depth + 1);
    init_fields(obj, cls, depth);
  };

  if (ctor_decl < 0) {
    implicit_super();
    return;
  }
  const CtorDecl& cd = d.ctors[ctor_decl];
  Frame f{MemberKey{cls, MemberKind::Ctor, ctor_decl}, obj, std::vector<Value>(cd.num_slots), depth};
  for (std::size_t i = 0; i < args.size(); ++i) f.slots[i] = std::move(args[i]);
  FrameScope scope(opt_.hooks, *this, f);
  if (!cd.explicit_super) implicit_super();
  run_body(f, cd.body);
}

Value Interpreter::call(const MethodInfo& m, Object* self, std::vector<Value> args, int depth,
                        const SourceSpan& at) {
  if (depth > opt_.max_depth) raise(ExceptionKind::StackOverflow, at, "call depth exceeded");
  const MethodDecl& md = prog_.program.classes[m.owner].methods[m.decl_index];
  Frame f{MemberKey{m.owner, MemberKind::Method, m.decl_index}, self,
          std::vector<Value>(md.num_slots), depth};
  for (std::size_t i = 0; i < args.size(); ++i) f.slots[i] = std::move(args[i]);
  FrameScope scope(opt_.hooks, *this, f);
  ret_ = default_value_of(m.return_type);
  if (exec_block(f, md.body) == Flow::Return) return std::move(ret_);
  return default_value_of(m.return_type);
}

Value Interpreter::run_body(Frame& frame, const Block& body) {
  if (exec_block(frame, body) == Flow::Return) return std::move(ret_);
  return Value();
}

Value Interpreter::read_var(const Frame& frame, const VarRef& ref) const {
  switch (ref.kind) {
    case VarKind::Local:
    case VarKind::Param: return frame.slots[ref.index];
    case VarKind::Field: return frame.self->fields[ref.index];
    case VarKind::Static: return statics_[ref.index];
  }
  return Value();
}

void Interpreter::write_var(Frame& frame, const VarRef& ref, Value value) {
  switch (ref.kind) {
    case VarKind::Local:
    case VarKind::Param: frame.slots[ref.index] = std::move(value); break;
    case VarKind::Field: frame.self->fields[ref.index] = std::move(value); break;
    case VarKind::Static: statics_[ref.index] = std::move(value); break;
  }
}

// ---------------------------------------------------------------------------
// statements

Interpreter::Flow Interpreter::exec_block(Frame& f, const Block& b) {
  BlockScope scope(opt_.hooks, *this, f);
  for (const Stmt& s : b.stmts)
    if (exec(f, s) == Flow::Return) return Flow::Return;
  return Flow::Normal;
}

Interpreter::Flow Interpreter::exec(Frame& f, const Stmt& s) {
  if (!s.is<Block>() && !s.is<SkipGuardStmt>() && !s.is<PoolCollectStmt>() &&
      !s.is<ForceReturnScope>())
    tick(s.span);
  return exec_inner(f, s);
}

void Interpreter::bind_skipped(Frame& f, const Stmt& s) {
  auto* d = std::get_if<VarDecl>(&s.node);
  if (!d) return;
  f.slots[d->slot] = default_value_of(d->type);
  if (opt_.hooks)
    opt_.hooks->bind_local(*this, f, VarRef{VarKind::Local, d->name, f.member.cls, d->slot}, d->type,
                           f.slots[d->slot]);
}

Interpreter::Flow Interpreter::exec_inner(Frame& f, const Stmt& s) {
  return std::visit(
      [&](const auto& n) -> Flow {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Block>) {
          return exec_block(f, n);
        } else if constexpr (std::is_same_v<T, VarDecl>) {
          f.slots[n.slot] = n.init ? eval(f, *n.init) : default_value_of(n.type);
          return Flow::Normal;
        } else if constexpr (std::is_same_v<T, AssignStmt>) {
          if (auto* name = std::get_if<NameExpr>(&n.target.node)) {
            Value v = eval(f, n.value);
            write_var(f, name->ref, std::move(v));
            return Flow::Normal;
          }
          const auto& fa = n.target.template as<FieldAccess>();
          if (fa.is_static) {
            statics_[fa.slot] = eval(f, n.value);
            return Flow::Normal;
          }
          Value obj = eval_receiver(f, *fa.object, fa.site_id, n.target.span);
          Value v = eval(f, n.value);
          obj.as_object()->fields[fa.slot] = std::move(v);
          return Flow::Normal;
        } else if constexpr (std::is_same_v<T, ExprStmt>) {
          eval(f, n.expr);
          return Flow::Normal;
        } else if constexpr (std::is_same_v<T, IfStmt>) {
          if (eval(f, n.cond).as_bool()) return exec_block(f, n.then_block);
          if (n.else_block) return exec_block(f, *n.else_block);
          return Flow::Normal;
        } else if constexpr (std::is_same_v<T, WhileStmt>) {
          bool first = true;
          while (eval(f, n.cond).as_bool()) {
            if (!first) tick(s.span);
            first = false;
            if (exec_block(f, n.body) == Flow::Return) return Flow::Return;
          }
          return Flow::Normal;
        } else if constexpr (std::is_same_v<T, ReturnStmt>) {
          ret_ = n.value ? eval(f, *n.value) : Value();
          return Flow::Return;
        } else if constexpr (std::is_same_v<T, TryStmt>) {
          ExceptionKind caught;
          try {
            HandlerScope h(npe_handlers_);
            return exec_block(f, n.body);
          } catch (const MjException& e) {
            if (!catches(n.kind, e.kind)) throw;
            caught = e.kind;
          }
          trace(-1, "caught " + to_string(caught));
          f.slots[n.var_slot] = Value(to_string(caught));
          if (opt_.hooks)
            opt_.hooks->bind_local(*this, f, VarRef{VarKind::Local, n.var, f.member.cls, n.var_slot},
                                   StaticType::string(), f.slots[n.var_slot]);
          return exec_block(f, n.handler);
        } else if constexpr (std::is_same_v<T, AssertStmt>) {
          if (!eval(f, n.cond).as_bool()) raise(ExceptionKind::AssertError, s.span, "assertion failed");
          return Flow::Normal;
        } else if constexpr (std::is_same_v<T, SuperCallStmt>) {
          std::vector<Value> args = eval_args(f, n.args);
          const int cls = f.member.cls;
          run_ctor(f.self, prog_.info.classes[cls].super, n.ctor_index, std::move(args), f.depth + 1);
          init_fields(f.self, cls, f.depth);
          return Flow::Normal;
        } else if constexpr (std::is_same_v<T, SkipGuardStmt>) {
          std::vector<std::optional<Value>> receivers;
          receivers.reserve(n.sites.size());
          for (const GuardSite& g : n.sites)
            receivers.push_back(g.receiver ? std::optional<Value>(eval(f, *g.receiver)) : std::nullopt);
          if (opt_.hooks && opt_.hooks->skip_line(*this, f, n, receivers)) {
            trace(-1, "skip statement");
            bind_skipped(f, *n.inner);
            return Flow::Normal;
          }
          try {
            return exec(f, *n.inner);
          } catch (const SkipStatementSignal& sig) {
            bool ours = false;
            for (const GuardSite& g : n.sites) ours = ours || g.site_id == sig.site_id;
            if (!ours) throw;
            trace(sig.site_id, "skip statement");
            bind_skipped(f, *n.inner);
            return Flow::Normal;
          }
        } else if constexpr (std::is_same_v<T, PoolCollectStmt>) {
          if (opt_.hooks) opt_.hooks->collect_frame(*this, f, n);
          return Flow::Normal;
        } else if constexpr (std::is_same_v<T, ForceReturnScope>) {
          try {
            return exec_block(f, n.body);
          } catch (ForceReturnSignal& r) {
            trace(-1, "forced return");
            ret_ = std::move(r.value);
            return Flow::Return;
          }
        }
      },
      s.node);
}

// ---------------------------------------------------------------------------
// expressions

Value Interpreter::eval_receiver(Frame& f, const Expr& recv, int site_id, const SourceSpan& at) {
  Value v = eval(f, recv);
  if (v.is_null()) raise(ExceptionKind::NPE, at, "null dereference", site_id);
  if (opt_.trace && site_id >= 0) trace(site_id, "deref");
  return v;
}

std::vector<Value> Interpreter::eval_args(Frame& f, const std::vector<Expr>& args) {
  std::vector<Value> out;
  out.reserve(args.size());
  for (const Expr& a : args) out.push_back(eval(f, a));
  return out;
}

Value Interpreter::eval(Frame& f, const Expr& e) {
  return std::visit(
      [&](const auto& n) -> Value {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, IntLit>) {
          return Value(n.value);
        } else if constexpr (std::is_same_v<T, BoolLit>) {
          return Value(n.value);
        } else if constexpr (std::is_same_v<T, StrLit>) {
          return Value(n.value);
        } else if constexpr (std::is_same_v<T, NullLit>) {
          return Value();
        } else if constexpr (std::is_same_v<T, ThisExpr>) {
          return Value(f.self);
        } else if constexpr (std::is_same_v<T, NameExpr>) {
          return read_var(f, n.ref);
        } else if constexpr (std::is_same_v<T, FieldAccess>) {
          if (n.is_static) return statics_[n.slot];
          Value obj = eval_receiver(f, *n.object, n.site_id, e.span);
          return obj.as_object()->fields[n.slot];
        } else if constexpr (std::is_same_v<T, MethodCall>) {
          const MethodInfo& target = prog_.info.classes[n.target_class].methods[n.target_method];
          if (n.kind == CallKind::Static) {
            std::vector<Value> args = eval_args(f, n.args);
            return call(target, nullptr, std::move(args), f.depth + 1, e.span);
          }
          Object* self = f.self;
          if (n.kind == CallKind::Virtual) {
            const Expr& recv = **n.receiver;
            Value r = n.site_id >= 0 ? eval_receiver(f, recv, n.site_id, e.span) : eval(f, recv);
            self = r.as_object();
          }
          std::vector<Value> args = eval_args(f, n.args);
          const MethodRef impl = prog_.info.classes[self->cls].vtable[target.vtable_slot];
          return call(prog_.info.method(impl), self, std::move(args), f.depth + 1, e.span);
        } else if constexpr (std::is_same_v<T, NewExpr>) {
          std::vector<Value> args = eval_args(f, n.args);
          Object* obj = allocate(n.class_index);
          run_ctor(obj, n.class_index, n.ctor_index, std::move(args), f.depth + 1);
          return Value(obj);
        } else if constexpr (std::is_same_v<T, BinaryExpr>) {
          return eval_binary(f, n, e.span);
        } else if constexpr (std::is_same_v<T, UnaryExpr>) {
          Value v = eval(f, *n.operand);
          if (n.op == UnaryOp::Not) return Value(!v.as_bool());
          return Value(wrap_sub(0, v.as_int()));
        } else if constexpr (std::is_same_v<T, CastExpr>) {
          Value v = eval(f, *n.operand);
          if (v.is_object() && !prog_.info.is_subclass(v.as_object()->cls, n.class_index))
            raise(ExceptionKind::CastError, e.span,
                  "cannot cast " + prog_.info.classes[v.as_object()->cls].name + " to " + n.class_name);
          return v;
        } else if constexpr (std::is_same_v<T, CheckForNullExpr>) {
          Value v = eval(f, *n.inner);
          if (!opt_.hooks) return v;
          return opt_.hooks->check_for_null(*this, f, n, std::move(v));
        } else if constexpr (std::is_same_v<T, PoolVarExpr>) {
          Value v = eval(f, *n.inner);
          if (opt_.hooks) opt_.hooks->pool_event(*this, f, n, v);
          return v;
        }
      },
      e.node);
}

Value Interpreter::eval_binary(Frame& f, const BinaryExpr& b, const SourceSpan& at) {
  if (b.op == BinaryOp::And) return Value(eval(f, *b.lhs).as_bool() && eval(f, *b.rhs).as_bool());
  if (b.op == BinaryOp::Or) return Value(eval(f, *b.lhs).as_bool() || eval(f, *b.rhs).as_bool());
  Value l = eval(f, *b.lhs);
  Value r = eval(f, *b.rhs);
  switch (b.op) {
    case BinaryOp::Eq: return Value(l == r);
    case BinaryOp::Ne: return Value(!(l == r));
    case BinaryOp::Add:
      if (std::holds_alternative<std::string>(l.v)) return Value(l.as_str() + r.as_str());
      return Value(wrap_add(l.as_int(), r.as_int()));
    case BinaryOp::Sub: return Value(wrap_sub(l.as_int(), r.as_int()));
    case BinaryOp::Mul: return Value(wrap_mul(l.as_int(), r.as_int()));
    case BinaryOp::Div:
    case BinaryOp::Mod: {
      const std::int64_t x = l.as_int(), y = r.as_int();
      if (y == 0) raise(ExceptionKind::ArithmeticError, at, "division by zero");
      if (x == std::numeric_limits<std::int64_t>::min() && y == -1)
        return Value(b.op == BinaryOp::Div ? x : std::int64_t{0});
      return Value(b.op == BinaryOp::Div ? x / y : x % y);
    }
    case BinaryOp::Lt: return Value(l.as_int() < r.as_int());
    case BinaryOp::Le: return Value(l.as_int() <= r.as_int());
    case BinaryOp::Gt: return Value(l.as_int() > r.as_int());
    case BinaryOp::Ge: return Value(l.as_int() >= r.as_int());
    default: break;
  }
  return Value();
}

RunResult run_test(const TypedProgram& program, MethodRef test, const RunOptions& options) {
  Interpreter in(program, options);
  return in.run_test(test);
}

}  // namespace mj
