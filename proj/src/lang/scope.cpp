#include "mj/scope.hpp"

#include <algorithm>
#include <unordered_set>

namespace mj {

std::vector<VarCandidate> accessible_vars(const TypedProgram& program, const DerefSite& site) {
  const ProgramInfo& info = program.info;
  std::vector<VarCandidate> out;
  std::unordered_set<std::string> bound;
  auto excluded = [&](const VarRef& r) { return site.receiver_var && *site.receiver_var == r; };

  for (const Binding& b : site.locals_in_scope) {
    bound.insert(b.ref.name);
    if (!excluded(b.ref)) out.push_back(VarCandidate{b.ref, b.type, b.ref.name});
  }

  const int cls = site.enclosing.cls;
  if (!site.static_context) {
    std::vector<const FieldInfo*> fields;
    for (int c = cls; c >= 0; c = info.classes[c].super)
      for (const FieldInfo& f : info.classes[c].own_fields)
        if (!f.is_static) fields.push_back(&f);
    for (const FieldInfo* f : fields) {
      if (bound.count(f->name)) continue;
      VarRef ref{VarKind::Field, f->name, f->owner, f->slot};
      if (!excluded(ref)) out.push_back(VarCandidate{ref, f->type, f->name});
    }
  }
  for (const FieldInfo& f : info.statics) {
    VarRef ref{VarKind::Static, f.name, f.owner, f.slot};
    if (excluded(ref)) continue;
    if (info.is_subclass(cls, f.owner)) {
      if (bound.count(f.name)) continue;
      out.push_back(VarCandidate{ref, f.type, f.name});
    } else {
      out.push_back(VarCandidate{ref, f.type, info.classes[f.owner].name + "." + f.name});
    }
  }
  return out;
}

std::vector<CtorSig> constructors_of(const ProgramInfo& info, const StaticType& t) {
  std::vector<CtorSig> out;
  const int target = info.find_class(t.class_name);
  if (!t.is_class() || target < 0) return out;
  std::vector<int> order{info.object_class()};
  for (int c = 0; c < info.object_class(); ++c) order.push_back(c);
  for (int c : order) {
    if (!info.is_subclass(c, target)) continue;
    const ClassInfo& ci = info.classes[c];
    std::vector<int> idx(ci.ctors.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
      return ci.ctors[a].params.size() < ci.ctors[b].params.size();
    });
    for (int k : idx) out.push_back(CtorSig{c, k, ci.ctors[k].params});
  }
  return out;
}

}  // namespace mj
