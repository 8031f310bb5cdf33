#pragma once

#include <string>
#include <vector>

#include "mj/typecheck.hpp"

namespace mj {

/// A variable visible at a dereference site.
struct VarCandidate {
  VarRef ref;
  StaticType type;
  std::string text;  // how the variable is written at the site: `q`, `f`, `B.s`
};

/// Variables in scope at `site`: locals (innermost scope first, declaration
/// order within a scope), parameters, instance fields of the enclosing class
/// chain (non-static contexts only), then static fields of every class in
/// declaration order. Names hidden by an inner binding and the receiver
/// variable itself are left out.
std::vector<VarCandidate> accessible_vars(const TypedProgram& program, const DerefSite& site);

struct CtorSig {
  int cls = -1;
  int ctor = -1;  // index into ClassInfo::ctors
  std::vector<StaticType> params;
};

/// Constructors of `t` and of every subclass of it: Object first, then user
/// classes in declaration order, each by ascending arity.
std::vector<CtorSig> constructors_of(const ProgramInfo& info, const StaticType& t);

}  // namespace mj
