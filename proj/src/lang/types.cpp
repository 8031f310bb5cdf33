#include "mj/types.hpp"

namespace mj {

StaticType StaticType::from_name(const std::string& name) {
  if (name == "int") return integer();
  if (name == "bool") return boolean();
  if (name == "str") return string();
  if (name == "void") return void_type();
  return of_class(name);
}

std::string StaticType::to_string() const {
  switch (kind) {
    case Kind::Int: return "int";
    case Kind::Bool: return "bool";
    case Kind::Str: return "str";
    case Kind::Void: return "void";
    case Kind::Class: return class_name;
    case Kind::Null: return "null";
    case Kind::Error: return "<error>";
  }
  return "<error>";
}

}  // namespace mj
