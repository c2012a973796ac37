#include "bbmlab/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>
#include <vector>

namespace bbm {

void parallel_for(int n, int jobs, const std::function<void(int)>& f) {
  if (n <= 0) return;
  std::vector<std::exception_ptr> errs(n);
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i; (i = next.fetch_add(1)) < n;) {
      try {
        f(i);
      } catch (...) {
        errs[i] = std::current_exception();
      }
    }
  };
  const int nt = std::clamp(jobs, 1, n);
  std::vector<std::thread> pool;
  for (int k = 1; k < nt; ++k) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
}

}  // namespace bbm
