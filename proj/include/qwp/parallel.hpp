#pragma once

#include <cstddef>
#include <functional>

namespace qwp {

/// Worker count: QWP_THREADS if set to a positive integer, otherwise the
/// hardware concurrency. set_thread_count() overrides both (0 restores).
std::size_t thread_count();
void set_thread_count(std::size_t n);

/// Runs body(i) for i in [0, n). Each index is processed exactly once and
/// bodies must write disjoint outputs, so results never depend on the
/// schedule or on the worker count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace qwp
