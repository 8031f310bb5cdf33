#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "mj/typecheck.hpp"

namespace mj {

struct Object;

struct Null {
  friend bool operator==(Null, Null) { return true; }
};

/// Runtime value. Object references point into the heap of the run that
/// created them.
struct Value {
  std::variant<Null, std::int64_t, bool, std::string, Object*> v;

  Value() = default;
  Value(Null) {}
  Value(std::int64_t i) : v(i) {}
  Value(bool b) : v(b) {}
  Value(std::string s) : v(std::move(s)) {}
  Value(Object* o) : v(o) {}

  bool is_null() const { return std::holds_alternative<Null>(v); }
  bool is_object() const { return std::holds_alternative<Object*>(v); }
  std::int64_t as_int() const { return std::get<std::int64_t>(v); }
  bool as_bool() const { return std::get<bool>(v); }
  const std::string& as_str() const { return std::get<std::string>(v); }
  Object* as_object() const { return std::get<Object*>(v); }

  /// Value equality as MJ `==` defines it: primitives by value, objects by
  /// identity.
  friend bool operator==(const Value& a, const Value& b) { return a.v == b.v; }
};

struct Object {
  int cls = -1;
  int id = 0;  // allocation order within a run
  std::vector<Value> fields;
};

Value default_value_of(const StaticType& t);
/// Human-readable rendering: `null`, `42`, `true`, `"s"`, `A#3`.
std::string describe(const Value& v, const ProgramInfo& info);

// ---------------------------------------------------------------------------
// Outcomes

enum class ExceptionKind : std::uint8_t {
  NPE,
  ArithmeticError,
  AssertError,
  CastError,
  ConstructionFailure,
  StackOverflow
};

std::string to_string(ExceptionKind k);

enum class OutcomeKind : std::uint8_t { Pass, AssertFail, Uncaught, BudgetExhausted };

struct Outcome {
  OutcomeKind kind = OutcomeKind::Pass;
  std::optional<ExceptionKind> exception;  // set for Uncaught
  int site_id = -1;                       // dereference site for NPE
  SourceSpan where;
  std::string message;

  bool passed() const { return kind == OutcomeKind::Pass; }
  bool is_npe() const { return exception == ExceptionKind::NPE; }
  /// `pass`, `assert-fail`, `budget-exhausted`, `uncaught NPE at site 3`, ...
  std::string summary() const;

  static Outcome pass() { return {}; }

  /// Verdict equality: kind, exception and site (not message or span).
  bool same_verdict(const Outcome& o) const {
    return kind == o.kind && exception == o.exception && site_id == o.site_id;
  }
};

struct TraceEvent {
  std::int64_t step = 0;
  int site_id = -1;
  std::string event;
};

/// An MJ-level exception. Catchable kinds are delivered to `catch` clauses.
struct MjException {
  ExceptionKind kind;
  int site_id = -1;
  SourceSpan where;
  std::string message;
};

// Control signals raised by repair hooks. They unwind through user `catch`
// clauses untouched.
struct ForceReturnSignal {
  Value value;
};
struct SkipStatementSignal {
  int site_id = -1;
};
struct DetectAbort {
  int site_id = -1;
};

// ---------------------------------------------------------------------------
// Machine

struct Frame {
  MemberKey member;
  Object* self = nullptr;
  std::vector<Value> slots;
  int depth = 0;
};

class Interpreter;

/// Callbacks for the intrinsic nodes of a metaprogram. A program without
/// intrinsics never calls them.
class HookRuntime {
 public:
  virtual ~HookRuntime() = default;

  virtual void on_frame_enter(Interpreter&, Frame&) {}
  virtual void on_frame_exit(Interpreter&, Frame&) {}
  virtual void on_scope_enter(Interpreter&, Frame&) {}
  virtual void on_scope_exit(Interpreter&, Frame&) {}
  virtual void collect_frame(Interpreter&, Frame&, const PoolCollectStmt&) {}
  virtual void pool_event(Interpreter&, Frame&, const PoolVarExpr&, const Value&) {}
  /// A local bound outside initVar: a caught exception name, or a skipped
  /// declaration receiving its default.
  virtual void bind_local(Interpreter&, Frame&, const VarRef&, const StaticType&, const Value&) {}

  /// Receives the evaluated receiver of site `node.site_id`; returns the
  /// value to dereference or throws a signal.
  virtual Value check_for_null(Interpreter&, Frame&, const CheckForNullExpr& node, Value receiver) = 0;

  /// Called before a guarded statement with the values of its pure receivers
  /// (nullopt where the receiver is compound). True skips the statement.
  virtual bool skip_line(Interpreter&, Frame&, const SkipGuardStmt& guard,
                         const std::vector<std::optional<Value>>& receivers) = 0;
};

struct RunOptions {
  std::int64_t step_budget = 1'000'000;
  int max_depth = 600;
  bool trace = false;
  HookRuntime* hooks = nullptr;
};

struct RunResult {
  Outcome outcome;
  std::int64_t steps = 0;
  std::vector<TraceEvent> trace;
};

class Interpreter {
 public:
  Interpreter(const TypedProgram& program, RunOptions options);
  Interpreter(const Interpreter&) = delete;
  Interpreter& operator=(const Interpreter&) = delete;

  /// Runs static initializers and then the test method.
  RunResult run_test(MethodRef test);

  // Services for hooks.
  const TypedProgram& program() const { return prog_; }
  const ProgramInfo& info() const { return prog_.info; }
  Value read_var(const Frame& frame, const VarRef& ref) const;
  void write_var(Frame& frame, const VarRef& ref, Value value);
  /// Runs `new C(args)` with constructor `ctor` (index into ClassInfo::ctors).
  Value instantiate(int cls, int ctor, std::vector<Value> args, int depth);
  /// True when some active `catch` clause would receive an NPE.
  bool can_catch_npe() const { return npe_handlers_ > 0; }
  std::int64_t steps() const { return steps_; }
  void trace(int site_id, std::string event);
  int runtime_class(const Value& v) const { return v.is_object() ? v.as_object()->cls : -1; }

 private:
  enum class Flow { Normal, Return };

  const TypedProgram& prog_;
  RunOptions opt_;
  std::deque<Object> heap_;
  std::vector<Value> statics_;
  std::int64_t steps_ = 0;
  int npe_handlers_ = 0;
  std::vector<TraceEvent> trace_;
  Value ret_;

  void tick(const SourceSpan& at);
  Object* allocate(int cls);
  void run_ctor(Object* obj, int cls, int ctor_decl, std::vector<Value> args, int depth);
  void init_fields(Object* obj, int cls, int depth);
  Value call(const MethodInfo& m, Object* self, std::vector<Value> args, int depth, const SourceSpan& at);
  Value run_body(Frame& frame, const Block& body);

  Flow exec_block(Frame& f, const Block& b);
  Flow exec(Frame& f, const Stmt& s);
  Flow exec_inner(Frame& f, const Stmt& s);
  Value eval(Frame& f, const Expr& e);
  Value eval_receiver(Frame& f, const Expr& recv, int site_id, const SourceSpan& at);
  std::vector<Value> eval_args(Frame& f, const std::vector<Expr>& args);
  Value eval_binary(Frame& f, const BinaryExpr& b, const SourceSpan& at);
  void bind_skipped(Frame& f, const Stmt& s);

  [[noreturn]] void raise(ExceptionKind kind, const SourceSpan& at, std::string message, int site = -1);
};

/// Convenience wrapper: one fresh interpreter per run.
RunResult run_test(const TypedProgram& program, MethodRef test, const RunOptions& options = {});

}  // namespace mj
