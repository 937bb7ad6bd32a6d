#pragma once

#include <algorithm>
#include <atomic>
#include <complex>
#include <cstddef>
#include <exception>
#include <mutex>
#include <span>
#include <thread>
#include <vector>

namespace rexi {

/// How a sum over independent terms is executed.
///
/// `chunks` partitions the term range into sequential batches (0 lets the
/// caller pick). In deterministic mode every output entry is accumulated in
/// ascending term order, so the bits do not depend on `threads` or `chunks`.
struct ExecPolicy {
  unsigned threads = 1;
  bool deterministic = true;
  std::size_t chunks = 1;
};

inline unsigned hardware_threads() {
  const unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1U : n;
}

namespace detail {

/// Runs body(i) for i in [begin, end) on up to `threads` workers with dynamic
/// assignment. body(i, worker) receives the worker slot in [0, threads).
template <class Body>
void parallel_for(std::size_t begin, std::size_t end, unsigned threads, Body&& body) {
  if (end <= begin) return;
  const std::size_t count = end - begin;
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(std::max(1U, threads), count));
  if (workers == 1) {
    for (std::size_t i = begin; i < end; ++i) body(i, 0U);
    return;
  }
  std::atomic<std::size_t> next{begin};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto run = [&](unsigned slot) {
    try {
      for (std::size_t i = next.fetch_add(1); i < end; i = next.fetch_add(1)) body(i, slot);
    } catch (...) {
      std::scoped_lock lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next.store(end);
    }
  };
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers - 1);
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(run, w);
    run(0U);
  }
  if (failure) std::rethrow_exception(failure);
}

/// Accumulates acc += sum_t term(t) for t in [0, n_terms), where term(t, out)
/// writes a `width`-long contribution into `out`.
///
/// Deterministic mode stages one chunk of contributions at a time and folds
/// them into `acc` entry by entry in ascending t. Otherwise each worker keeps
/// a private partial sum and the partials are combined pairwise.
template <class Term>
void reduce_terms(std::size_t n_terms, std::span<std::complex<double>> acc, const ExecPolicy& policy,
                  Term&& term) {
  using cplx = std::complex<double>;
  const std::size_t width = acc.size();
  if (n_terms == 0) return;
  const unsigned threads = std::max(1U, policy.threads);

  if (threads == 1) {
    // Same per-entry operation order as the staged path below.
    std::vector<cplx> contribution(width);
    for (std::size_t t = 0; t < n_terms; ++t) {
      term(t, std::span<cplx>(contribution));
      for (std::size_t j = 0; j < width; ++j) acc[j] += contribution[j];
    }
    return;
  }

  if (policy.deterministic) {
    const std::size_t chunks = std::clamp<std::size_t>(policy.chunks, 1, n_terms);
    const std::size_t per_chunk = (n_terms + chunks - 1) / chunks;
    std::vector<cplx> staging(per_chunk * width);
    for (std::size_t first = 0; first < n_terms; first += per_chunk) {
      const std::size_t last = std::min(n_terms, first + per_chunk);
      parallel_for(first, last, threads, [&](std::size_t t, unsigned) {
        term(t, std::span<cplx>(staging.data() + (t - first) * width, width));
      });
      const std::size_t stride = 4096;
      const std::size_t blocks = (width + stride - 1) / stride;
      parallel_for(0, blocks, threads, [&](std::size_t b, unsigned) {
        const std::size_t j0 = b * stride;
        const std::size_t j1 = std::min(width, j0 + stride);
        for (std::size_t t = 0; t < last - first; ++t) {
          const cplx* src = staging.data() + t * width;
          for (std::size_t j = j0; j < j1; ++j) acc[j] += src[j];
        }
      });
    }
    return;
  }

  std::vector<std::vector<cplx>> partial(threads, std::vector<cplx>(width));
  std::vector<std::vector<cplx>> scratch(threads, std::vector<cplx>(width));
  parallel_for(0, n_terms, threads, [&](std::size_t t, unsigned slot) {
    term(t, std::span<cplx>(scratch[slot]));
    auto& p = partial[slot];
    for (std::size_t j = 0; j < width; ++j) p[j] += scratch[slot][j];
  });
  for (std::size_t step = 1; step < threads; step *= 2) {
    for (std::size_t i = 0; i + step < threads; i += 2 * step) {
      auto& dst = partial[i];
      const auto& src = partial[i + step];
      for (std::size_t j = 0; j < width; ++j) dst[j] += src[j];
    }
  }
  for (std::size_t j = 0; j < width; ++j) acc[j] += partial[0][j];
}

}  // namespace detail
}  // namespace rexi
