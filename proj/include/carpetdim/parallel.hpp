// SPDX-License-Identifier: Apache-2.0
#ifndef CARPETDIM_PARALLEL_HPP
#define CARPETDIM_PARALLEL_HPP

#include <cstddef>
#include <functional>

namespace carpetdim {

/// Worker count: hardware concurrency, capped by CARPETDIM_THREADS when set.
int worker_count();

/// Runs body(k) for k in [0, n).  Work is handed out by index, so results
/// written to slot k do not depend on the number of workers.  The first
/// exception thrown by any body is rethrown after all workers finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace carpetdim

#endif  // CARPETDIM_PARALLEL_HPP
