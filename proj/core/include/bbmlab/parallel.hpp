#pragma once

#include <functional>

namespace bbm {

// Calls f(0..n-1) on at most `jobs` threads (the caller counts as one). The first
// exception thrown by any call is rethrown after all workers stop.
void parallel_for(int n, int jobs, const std::function<void(int)>& f);

}  // namespace bbm
