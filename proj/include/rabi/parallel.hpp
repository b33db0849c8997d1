#pragma once

#include <cstddef>
#include <functional>

namespace rabi {

/// Worker count: hardware concurrency, capped by RABI_SPECTRA_THREADS when set.
std::size_t default_thread_count();

/// Calls body(i) for i in [0, n) on up to `threads` workers. Each index is
/// visited exactly once; the first exception thrown is rethrown after joining.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body,
                  std::size_t threads = default_thread_count());

}  // namespace rabi
