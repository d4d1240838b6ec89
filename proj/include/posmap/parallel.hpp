// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <exception>
#include <vector>

namespace posmap {

/// Selects the OpenMP kernel or the serial reference loop. Both produce
/// identical results: every index draws from its own Rng stream and results
/// are merged in index order.
enum class ExecutionPolicy { serial, parallel };

/// Runs fn(i) for i in [0, count). Exceptions are captured per index and the
/// one with the lowest index is rethrown after the loop.
template <class Fn>
void for_each_index(ExecutionPolicy policy, int count, Fn&& fn) {
  if (count <= 0) return;
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(count));
  if (policy == ExecutionPolicy::parallel) {
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < count; ++i) {
      try {
        fn(i);
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
  } else {
    for (int i = 0; i < count; ++i) {
      try {
        fn(i);
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace posmap
