#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "mj/interp.hpp"
#include "mj/typecheck.hpp"

namespace testing_support {

inline std::filesystem::path source_root() { return MJ_SOURCE_DIR; }

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::vector<std::filesystem::path> mj_files(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> out;
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.path().extension() == ".mj") out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

inline mj::TypedProgramPtr compile_file(const std::filesystem::path& p) {
  return mj::compile(read_file(p), p.filename().string());
}

inline mj::MethodRef only_test(const mj::TypedProgram& tp) {
  auto tests = tp.tests();
  if (tests.size() != 1) throw std::runtime_error("expected exactly one test method");
  return tests.front();
}

inline mj::RunResult run_named(const mj::TypedProgram& tp, const std::string& test,
                               const mj::RunOptions& opt = {}) {
  auto ref = tp.find_test(test);
  if (!ref) throw std::runtime_error("no test " + test);
  return mj::run_test(tp, *ref, opt);
}

struct Fixture {
  std::string source;
  mj::TypedProgramPtr program;
  mj::MethodRef test;
  std::string path;
};

inline Fixture load_fixture(const std::filesystem::path& p, const std::string& test) {
  Fixture f;
  f.source = read_file(p);
  f.path = p.filename().string();
  f.program = mj::compile(f.source, f.path);
  auto ref = f.program->find_test(test);
  if (!ref) throw std::runtime_error("no test " + test);
  f.test = *ref;
  return f;
}

inline std::filesystem::path fixture_path(const std::string& name) {
  return source_root() / "tests" / "fixtures" / name;
}

inline std::filesystem::path corpus_path(const std::string& name) {
  return source_root() / "fixtures" / "corpus" / name;
}

}  // namespace testing_support
