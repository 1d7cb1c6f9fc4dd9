#ifndef SYMCTRL_PARALLEL_HPP_
#define SYMCTRL_PARALLEL_HPP_

#include <cstddef>
#include <thread>
#include <vector>

namespace symctrl {

/* Runs f(begin, end) over a chunked partition of [0, n). Chunk boundaries
 * depend only on n and the thread count, and every worker writes to disjoint
 * index ranges, so results are identical to a sequential run regardless of
 * scheduling. threads <= 1 runs inline. */
template <typename F>
void parallel_chunks(std::size_t n, unsigned threads, F&& f) {
  if (n == 0) return;
  if (threads <= 1 || n < 2048) {
    f(std::size_t{0}, n);
    return;
  }
  const std::size_t nchunk = threads;
  const std::size_t per = (n + nchunk - 1) / nchunk;
  std::vector<std::thread> pool;
  pool.reserve(nchunk);
  for (std::size_t c = 0; c < nchunk; ++c) {
    const std::size_t b = c * per;
    if (b >= n) break;
    const std::size_t e = (b + per < n) ? b + per : n;
    pool.emplace_back([&f, b, e] { f(b, e); });
  }
  for (auto& t : pool) t.join();
}

}  // namespace symctrl

#endif
