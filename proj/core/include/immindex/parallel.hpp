#ifndef IMMINDEX_PARALLEL_HPP
#define IMMINDEX_PARALLEL_HPP

#include <cstddef>
#include <functional>

namespace immindex {

/// Worker-thread cap: IMMIDX_THREADS if set (clamped to >= 1), otherwise the
/// hardware concurrency.
int max_worker_threads();

/// Runs fn(i) for i in [0, count). Work items must be independent; results
/// must be written to disjoint slots so the outcome does not depend on the
/// schedule. Runs inline when count is small or only one worker is allowed.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace immindex

#endif
