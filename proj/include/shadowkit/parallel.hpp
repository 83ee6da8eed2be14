#pragma once

#include <cstddef>
#include <functional>

namespace shadowkit {

/// Process-wide worker cap used by the parallel loops (>= 1).
void set_thread_count(unsigned n);
unsigned thread_count();

/// Calls body(i) for i in [0, n) on up to thread_count() workers. Each index is
/// handled exactly once; callers write into per-index slots and reduce in index
/// order afterwards, so results do not depend on the worker count. The first
/// exception thrown by any body is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace shadowkit
