#pragma once

#include <cstddef>
#include <functional>

namespace wcon {

/// Global worker count for per-agent parallel loops. 1 = sequential.
void set_num_threads(int threads);
int num_threads();

/// Runs fn(i) for i in [0, count). Work items must be independent;
/// callers write results into pre-sized slots so output is
/// deterministic regardless of scheduling.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace wcon
