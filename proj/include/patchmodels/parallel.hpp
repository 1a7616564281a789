#pragma once

#include <functional>

namespace patchmodels {

// Worker count: min(PATCHMODELS_THREADS, hardware concurrency), at least 1.
int thread_cap();

// Runs fn(i) for i in [0, n). Work items must write only to their own slots;
// results are then independent of scheduling.
void parallel_for(int n, const std::function<void(int)>& fn);

// Chunked reduction with a fixed chunk grid, so the combination order (and
// hence floating-point rounding) does not depend on the thread count.
// make_partial(begin, end) produces chunk partials; combine(partial) is called
// sequentially in chunk order.
template <typename Partial>
void chunked_reduce(int n, int chunk,
                    const std::function<Partial(int, int)>& make_partial,
                    const std::function<void(const Partial&)>& combine) {
  if (n <= 0) return;
  const int chunks = (n + chunk - 1) / chunk;
  std::vector<Partial> partials(static_cast<std::size_t>(chunks));
  parallel_for(chunks, [&](int c) {
    const int b = c * chunk;
    const int e = std::min(n, b + chunk);
    partials[static_cast<std::size_t>(c)] = make_partial(b, e);
  });
  for (const Partial& p : partials) combine(p);
}

}  // namespace patchmodels
