#include "mj/repair/parallel.hpp"

#include <exception>
#include <vector>

#include <omp.h>

namespace mj::repair {

std::string_view policy_name(ExecPolicy p) { return p == ExecPolicy::Serial ? "serial" : "openmp"; }

int max_threads() { return omp_get_max_threads(); }

void for_each_index(std::size_t n, ExecPolicy policy, const std::function<void(std::size_t)>& fn) {
  std::exception_ptr first;
  if (policy == ExecPolicy::Serial || n < 2) {
    for (std::size_t i = 0; i < n; ++i) {
      try {
        fn(i);
      } catch (...) {
        if (!first) first = std::current_exception();
      }
    }
    if (first) std::rethrow_exception(first);
    return;
  }
  std::vector<std::exception_ptr> errors(n);
  const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    try {
      fn(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace mj::repair
