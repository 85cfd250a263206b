#pragma once
// Deterministic fork/join helper. Work items are independent and write to their own
// slots, so results never depend on the number of workers; any reduction is done by
// the caller afterwards in index order.

#include <cstddef>
#include <functional>

namespace borel_lab {

// Worker count used when a caller passes 0: BOREL_LAB_THREADS if set, else 1.
int default_workers();
void set_default_workers(int n);

// Runs body(i) for i in [0, n) on up to `workers` threads (0 = default_workers());
// calls made from inside a body run serially.
// The first exception thrown by any item is rethrown after all threads join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body, int workers = 0);

}  // namespace borel_lab
