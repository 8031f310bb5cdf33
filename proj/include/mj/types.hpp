#pragma once

#include <cstdint>
#include <string>

namespace mj {

/// Static type of an MJ expression or declaration. `Null` is the type of the
/// `null` literal only; `Error` marks an expression that failed to check.
struct StaticType {
  enum class Kind : std::uint8_t { Int, Bool, Str, Void, Class, Null, Error };

  Kind kind = Kind::Error;
  std::string class_name;

  static StaticType integer() { return {Kind::Int, {}}; }
  static StaticType boolean() { return {Kind::Bool, {}}; }
  static StaticType string() { return {Kind::Str, {}}; }
  static StaticType void_type() { return {Kind::Void, {}}; }
  static StaticType null_type() { return {Kind::Null, {}}; }
  static StaticType error() { return {Kind::Error, {}}; }
  static StaticType of_class(std::string name) { return {Kind::Class, std::move(name)}; }

  /// Maps a source type name (`int`, `bool`, `str`, `void`, or a class name).
  static StaticType from_name(const std::string& name);

  bool is_class() const { return kind == Kind::Class; }
  bool is_reference() const { return kind == Kind::Class || kind == Kind::Null; }
  bool is_primitive() const {
    return kind == Kind::Int || kind == Kind::Bool || kind == Kind::Str;
  }
  bool is_void() const { return kind == Kind::Void; }
  bool is_error() const { return kind == Kind::Error; }

  std::string to_string() const;

  friend bool operator==(const StaticType&, const StaticType&) = default;
};

}  // namespace mj
