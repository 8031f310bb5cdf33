#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mj/interp.hpp"
#include "mj/repair/strategy.hpp"
#include "mj/scope.hpp"

namespace mj::repair {

/// The original program enriched with deactivated hooks.
struct Metaprogram {
  TypedProgramPtr original;
  TypedProgramPtr program;  // transformed and re-checked
  /// Variables visible at each site of the original, in accessible_vars order.
  std::vector<std::vector<VarCandidate>> scope;
};

/// Wraps every receiver in checkForNull, routes local writes through the
/// pool, guards every statement with a dereference and wraps bodies for
/// forced returns.
Metaprogram transform(TypedProgramPtr original);

// ---------------------------------------------------------------------------
// Runtime

/// Per-frame registry of live variables. Locals and parameters hold the value
/// of their latest pool event; fields and statics are read through the frame.
class VariablePool {
 public:
  struct Entry {
    VarRef ref;
    StaticType type;
    Value value;
  };

  void push_frame(const MemberKey& member);
  void pop_frame();
  void enter_scope();
  void exit_scope();
  void declare(const VarRef& ref, const StaticType& type, Value value);
  void assign(const VarRef& ref, Value value);

  /// Current value of `ref` in the innermost frame; nullopt when a local or
  /// parameter was never registered.
  std::optional<Value> lookup(const Interpreter& in, const Frame& frame, const VarRef& ref) const;
  std::size_t depth() const { return frames_.size(); }
  const std::vector<Entry>& top_entries() const { return frames_.back().entries; }
  const MemberKey& top_member() const { return frames_.back().member; }

 private:
  struct PoolFrame {
    MemberKey member;
    std::vector<Entry> entries;
    std::vector<std::size_t> marks;
  };
  std::vector<PoolFrame> frames_;
};

struct PoolValue {
  VarCandidate var;
  Value value;
};

/// Identity of a runtime value: `null`, a primitive's literal, or `C#id`.
struct ValueKey {
  bool is_null = true;
  std::string key;
  std::string runtime_class;  // empty unless the value is an object
};

struct Collected {
  Decision decision;
  std::optional<ValueKey> value;  // Var and Const parameters
};

enum class HookMode : std::uint8_t { Off, Detect, Replay };

class MetaRuntime : public HookRuntime {
 public:
  MetaRuntime(const Metaprogram& mp, HookMode mode, std::optional<Decision> decision = std::nullopt,
              int ctor_depth = 3);

  void on_frame_enter(Interpreter&, Frame&) override;
  void on_frame_exit(Interpreter&, Frame&) override;
  void on_scope_enter(Interpreter&, Frame&) override;
  void on_scope_exit(Interpreter&, Frame&) override;
  void collect_frame(Interpreter&, Frame&, const PoolCollectStmt&) override;
  void pool_event(Interpreter&, Frame&, const PoolVarExpr&, const Value&) override;
  void bind_local(Interpreter&, Frame&, const VarRef&, const StaticType&, const Value&) override;
  Value check_for_null(Interpreter&, Frame&, const CheckForNullExpr& node, Value receiver) override;
  bool skip_line(Interpreter&, Frame&, const SkipGuardStmt& guard,
                 const std::vector<std::optional<Value>>& receivers) override;

  /// Variables visible at `site_id` with their current values.
  std::vector<PoolValue> snapshot(const Interpreter& in, const Frame& frame, int site_id) const;

  // Detect mode results.
  int detected_site = -1;
  std::vector<Collected> collected;

  // Replay mode: how often the decision changed behaviour.
  int activations = 0;

  /// Called at every checkForNull with the pool snapshot for the site.
  std::function<void(const Interpreter&, const Frame&, int site_id, const std::vector<PoolValue>&)> observer;

  const VariablePool& pool() const { return pool_; }

 private:
  const Metaprogram& mp_;
  HookMode mode_;
  std::optional<Decision> decision_;
  int ctor_depth_;
  VariablePool pool_;

  std::vector<Collected> collect(const Interpreter& in, const Frame& frame, int site_id) const;
  Value param_value(Interpreter& in, Frame& frame, const StaticType& required);
  Value return_payload(Interpreter& in, Frame& frame);
  bool fires_at(int site_id, const Interpreter& in) const;
};

ValueKey key_of(const Value& v, const ProgramInfo& info);

/// Runs `test` on the metaprogram with the given hook runtime.
RunResult run_meta(const Metaprogram& mp, MethodRef test, MetaRuntime& hooks, std::int64_t budget);

}  // namespace mj::repair
