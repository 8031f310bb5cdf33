#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string_view>

namespace mj::repair {

enum class ExecPolicy : std::uint8_t { Serial, Parallel };

std::string_view policy_name(ExecPolicy p);

/// Calls fn(0..n-1). The parallel policy distributes indices over OpenMP
/// threads. Under both policies every index runs and the exception of the
/// lowest failing index is rethrown afterwards.
void for_each_index(std::size_t n, ExecPolicy policy, const std::function<void(std::size_t)>& fn);

int max_threads();

}  // namespace mj::repair
