// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>

namespace extinctd {

/// Runs body(i) for i in [0, n) on up to `threads` workers. Results must be
/// written to per-index slots so the outcome does not depend on scheduling.
/// If several indices throw, the exception of the lowest index is rethrown.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& body);

/// Worker count from EXTINCTD_THREADS, or 1 when unset or malformed.
std::size_t default_thread_count();

}  // namespace extinctd
