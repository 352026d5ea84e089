#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <limits>
#include <thread>
#include <vector>

namespace gaugetrace {

/// Work is cut into fixed-size chunks independent of the thread count, and
/// chunk results are combined in index order, so sums are bit-reproducible.
inline constexpr std::size_t kChunkSize = 64;

inline unsigned worker_count() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1u : hw;
}

/// Calls body(begin, end, chunk_index) for every chunk, spread across threads.
template <typename Body>
void for_each_chunk(std::size_t count, Body body) {
  const std::size_t chunks = (count + kChunkSize - 1) / kChunkSize;
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(worker_count(), chunks));
  auto run = [&](std::size_t first_chunk, std::size_t stride, std::exception_ptr& error) {
    try {
      for (std::size_t c = first_chunk; c < chunks; c += stride) {
        body(c * kChunkSize, std::min(count, (c + 1) * kChunkSize), c);
      }
    } catch (...) {
      error = std::current_exception();
    }
  };
  if (workers <= 1) {
    std::exception_ptr error;
    run(0, 1, error);
    if (error) std::rethrow_exception(error);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) threads.emplace_back(run, w, workers, std::ref(errors[w]));
  for (auto& t : threads) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

template <typename Fn>
void parallel_for(std::size_t count, Fn fn) {
  for_each_chunk(count, [&](std::size_t begin, std::size_t end, std::size_t) {
    for (std::size_t i = begin; i < end; ++i) fn(i);
  });
}

/// Deterministic sum of term(i) over [0, count).
template <typename Term>
double parallel_sum(std::size_t count, Term term) {
  const std::size_t chunks = (count + kChunkSize - 1) / kChunkSize;
  std::vector<double> partial(chunks, 0.0);
  for_each_chunk(count, [&](std::size_t begin, std::size_t end, std::size_t c) {
    double acc = 0.0;
    for (std::size_t i = begin; i < end; ++i) acc += term(i);
    partial[c] = acc;
  });
  double total = 0.0;
  for (double v : partial) total += v;
  return total;
}

/// Deterministic max of term(i) over [0, count); -inf when empty.
template <typename Term>
double parallel_max(std::size_t count, Term term) {
  const std::size_t chunks = (count + kChunkSize - 1) / kChunkSize;
  const double lowest = -std::numeric_limits<double>::infinity();
  std::vector<double> partial(chunks, lowest);
  for_each_chunk(count, [&](std::size_t begin, std::size_t end, std::size_t c) {
    double acc = lowest;
    for (std::size_t i = begin; i < end; ++i) acc = std::max(acc, term(i));
    partial[c] = acc;
  });
  double best = lowest;
  for (double v : partial) best = std::max(best, v);
  return best;
}

}  // namespace gaugetrace
