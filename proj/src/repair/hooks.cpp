#include <stdexcept>

#include "mj/repair/metaprogram.hpp"

namespace mj::repair {

// ---------------------------------------------------------------------------
// VariablePool

void VariablePool::push_frame(const MemberKey& member) { frames_.push_back(PoolFrame{member, {}, {}}); }

void VariablePool::pop_frame() { frames_.pop_back(); }

void VariablePool::enter_scope() {
  if (!frames_.empty()) frames_.back().marks.push_back(frames_.back().entries.size());
}

void VariablePool::exit_scope() {
  if (frames_.empty() || frames_.back().marks.empty()) return;
  PoolFrame& f = frames_.back();
  f.entries.resize(f.marks.back());
  f.marks.pop_back();
}

void VariablePool::declare(const VarRef& ref, const StaticType& type, Value value) {
  frames_.back().entries.push_back(Entry{ref, type, std::move(value)});
}

void VariablePool::assign(const VarRef& ref, Value value) {
  auto& entries = frames_.back().entries;
  for (auto it = entries.rbegin(); it != entries.rend(); ++it) {
    if (it->ref == ref) {
      it->value = std::move(value);
      return;
    }
  }
  throw std::logic_error("pool assignment to unregistered variable '" + ref.name + "'");
}

std::optional<Value> VariablePool::lookup(const Interpreter& in, const Frame& frame, const VarRef& ref) const {
  if (ref.kind == VarKind::Field || ref.kind == VarKind::Static) return in.read_var(frame, ref);
  if (frames_.empty()) return std::nullopt;
  const auto& entries = frames_.back().entries;
  for (auto it = entries.rbegin(); it != entries.rend(); ++it)
    if (it->ref == ref) return it->value;
  return std::nullopt;
}

// ---------------------------------------------------------------------------

ValueKey key_of(const Value& v, const ProgramInfo& info) {
  ValueKey k;
  k.is_null = v.is_null();
  k.key = describe(v, info);
  if (v.is_object()) k.runtime_class = info.classes[v.as_object()->cls].name;
  return k;
}

MetaRuntime::MetaRuntime(const Metaprogram& mp, HookMode mode, std::optional<Decision> decision, int ctor_depth)
    : mp_(mp), mode_(mode), decision_(std::move(decision)), ctor_depth_(ctor_depth) {
  if (mode_ == HookMode::Replay && !decision_) throw std::invalid_argument("replay needs a decision");
}

void MetaRuntime::on_frame_enter(Interpreter&, Frame& f) { pool_.push_frame(f.member); }
void MetaRuntime::on_frame_exit(Interpreter&, Frame&) { pool_.pop_frame(); }
void MetaRuntime::on_scope_enter(Interpreter&, Frame&) { pool_.enter_scope(); }
void MetaRuntime::on_scope_exit(Interpreter&, Frame&) { pool_.exit_scope(); }

void MetaRuntime::collect_frame(Interpreter& in, Frame& f, const PoolCollectStmt& stmt) {
  for (const PoolSeed& seed : stmt.seeds) {
    if (seed.ref.kind != VarKind::Param) continue;  // fields and statics are read live
    pool_.declare(seed.ref, seed.type, in.read_var(f, seed.ref));
  }
}

void MetaRuntime::pool_event(Interpreter&, Frame&, const PoolVarExpr& node, const Value& v) {
  if (node.event == PoolEvent::InitVar) {
    pool_.declare(node.ref, node.declared, v);
  } else if (node.ref.kind == VarKind::Local || node.ref.kind == VarKind::Param) {
    pool_.assign(node.ref, v);
  }
}

void MetaRuntime::bind_local(Interpreter&, Frame&, const VarRef& ref, const StaticType& type, const Value& v) {
  pool_.declare(ref, type, v);
}

std::vector<PoolValue> MetaRuntime::snapshot(const Interpreter& in, const Frame& frame, int site_id) const {
  std::vector<PoolValue> out;
  for (const VarCandidate& c : mp_.scope.at(site_id)) {
    std::optional<Value> v = pool_.lookup(in, frame, c.ref);
    if (!v) throw std::logic_error("variable pool has no entry for '" + c.text + "'");
    out.push_back(PoolValue{c, std::move(*v)});
  }
  return out;
}

namespace {

bool runtime_compatible(const Value& v, const StaticType& declared, const StaticType& required,
                        const ProgramInfo& info) {
  if (v.is_object()) return info.is_subclass(v.as_object()->cls, info.find_class(required.class_name));
  return info.is_subtype(declared, required);
}

}  // namespace

std::vector<Collected> MetaRuntime::collect(const Interpreter& in, const Frame& frame, int site_id) const {
  const TypedProgram& tp = *mp_.original;
  const ProgramInfo& info = tp.info;
  const DerefSite& site = tp.sites[site_id];
  const std::vector<PoolValue> pool = snapshot(in, frame, site_id);
  std::vector<Collected> out;

  auto vars = [&](Strategy s, const StaticType& required) {
    for (const PoolValue& pv : pool) {
      const StaticType& t = pv.var.type;
      if (required.is_class()) {
        if (!t.is_class() || !runtime_compatible(pv.value, t, required, info)) continue;
      } else if (t != required) {
        continue;
      }
      ValueKey key = key_of(pv.value, info);
      out.push_back(Collected{Decision{site_id, s, VarParam{pv.var.ref, t, pv.var.text, key.runtime_class},
                                       Provenance::Runtime},
                              std::move(key)});
    }
  };
  auto plans = [&](Strategy s, const StaticType& t) {
    for (auto& plan : plan_constructions(info, t, ctor_depth_))
      out.push_back(Collected{Decision{site_id, s, CtorParam{std::move(plan)}, Provenance::Runtime}, std::nullopt});
  };

  for (const Applicable& a : applicable_strategies(site)) {
    const Strategy s = a.strategy;
    switch (s) {
      case Strategy::S1a:
      case Strategy::S1b: vars(s, site.receiver_type); break;
      case Strategy::S2a:
      case Strategy::S2b: plans(s, site.receiver_type); break;
      case Strategy::S4b: plans(s, site.return_type); break;
      case Strategy::S4c:
        vars(s, site.return_type);
        for (const ConstParam& c : return_constants(site.return_type))
          out.push_back(Collected{Decision{site_id, s, c, Provenance::Runtime}, key_of(c.value(), info)});
        break;
      case Strategy::S3:
      case Strategy::S4a:
      case Strategy::S4d:
        out.push_back(Collected{Decision{site_id, s, NoParam{}, Provenance::Runtime}, std::nullopt});
        break;
    }
  }
  return out;
}

bool MetaRuntime::fires_at(int site_id, const Interpreter& in) const {
  return mode_ == HookMode::Replay && decision_->site_id == site_id && !in.can_catch_npe();
}

Value MetaRuntime::param_value(Interpreter& in, Frame& frame, const StaticType& required) {
  const ProgramInfo& info = in.info();
  const StrategyParam& p = decision_->param;
  if (auto* v = std::get_if<VarParam>(&p)) {
    std::optional<Value> val = pool_.lookup(in, frame, v->ref);
    if (!val) throw std::logic_error("variable pool has no entry for '" + v->text + "'");
    // The source form casts variables whose declared type is too general.
    if (required.is_class() && val->is_object() && !info.is_subtype(v->type, required) &&
        !info.is_subclass(val->as_object()->cls, info.find_class(required.class_name)))
      throw MjException{ExceptionKind::CastError, decision_->site_id, {}, "cast to " + required.class_name};
    return *val;
  }
  if (auto* c = std::get_if<ConstParam>(&p)) return c->value();
  if (auto* k = std::get_if<CtorParam>(&p)) {
    const std::function<Value(const ConstructionPlan&)> build = [&](const ConstructionPlan& plan) -> Value {
      std::vector<Value> args;
      for (const PlanArg& a : plan.args) {
        switch (a.kind) {
          case PlanArg::Kind::Literal: args.push_back(default_value_of(a.type)); break;
          case PlanArg::Kind::Null: args.emplace_back(); break;
          case PlanArg::Kind::Nested: args.push_back(build(*a.nested)); break;
        }
      }
      return in.instantiate(plan.cls, plan.ctor, std::move(args), frame.depth);
    };
    try {
      return build(k->plan);
    } catch (const MjException& e) {
      throw MjException{ExceptionKind::ConstructionFailure, decision_->site_id, e.where,
                        "constructing " + k->plan.render() + " raised " + to_string(e.kind)};
    }
  }
  return Value();
}

Value MetaRuntime::return_payload(Interpreter& in, Frame& frame) {
  const DerefSite& site = mp_.original->sites[decision_->site_id];
  switch (decision_->strategy) {
    case Strategy::S4b:
    case Strategy::S4c: return param_value(in, frame, site.return_type);
    default: return Value();
  }
}

Value MetaRuntime::check_for_null(Interpreter& in, Frame& frame, const CheckForNullExpr& node, Value receiver) {
  const int site_id = node.site_id;
  if (observer) observer(in, frame, site_id, snapshot(in, frame, site_id));
  if (!receiver.is_null()) return receiver;
  if (mode_ == HookMode::Detect && !in.can_catch_npe()) {
    detected_site = site_id;
    collected = collect(in, frame, site_id);
    throw DetectAbort{site_id};
  }
  if (!fires_at(site_id, in)) return receiver;

  const DerefSite& site = mp_.original->sites[site_id];
  const Strategy s = decision_->strategy;
  if (is_replacement(s)) {
    ++activations;
    Value v = param_value(in, frame, site.receiver_type);
    if (is_global(s)) {
      in.write_var(frame, *site.receiver_var, v);
      pool_.assign(*site.receiver_var, v);
    }
    return v;
  }
  // Pure receivers were checked by the statement guard; reaching here means
  // the variable became null within the statement, which the guard does not
  // cover.
  if (site.pure) return receiver;
  ++activations;
  if (s == Strategy::S3) throw SkipStatementSignal{site_id};
  throw ForceReturnSignal{return_payload(in, frame)};
}

bool MetaRuntime::skip_line(Interpreter& in, Frame& frame, const SkipGuardStmt& guard,
                            const std::vector<std::optional<Value>>& receivers) {
  if (mode_ != HookMode::Replay || is_replacement(decision_->strategy)) return false;
  for (std::size_t i = 0; i < guard.sites.size(); ++i) {
    if (guard.sites[i].site_id != decision_->site_id) continue;
    if (!receivers[i] || !receivers[i]->is_null() || !fires_at(decision_->site_id, in)) return false;
    ++activations;
    if (decision_->strategy == Strategy::S3) return true;
    throw ForceReturnSignal{return_payload(in, frame)};
  }
  return false;
}

RunResult run_meta(const Metaprogram& mp, MethodRef test, MetaRuntime& hooks, std::int64_t budget) {
  RunOptions opt;
  opt.step_budget = budget;
  opt.hooks = &hooks;
  return run_test(*mp.program, test, opt);
}

}  // namespace mj::repair
