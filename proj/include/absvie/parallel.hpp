/*
   Copyright 2026 The absvie-lab Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <span>
#include <vector>

#include <omp.h>

// Path-parallel kernels. Work over paths is cut into fixed-size blocks whose
// boundaries do not depend on the number of threads; reductions sum the
// per-block partials in block order. Results are therefore bitwise identical
// for any OMP_NUM_THREADS / --threads setting.
namespace absvie::par {

inline constexpr std::size_t kBlock = 1024;

inline std::size_t block_count(std::size_t n) { return (n + kBlock - 1) / kBlock; }

inline int max_threads() { return omp_get_max_threads(); }
inline void set_threads(int threads) {
  if (threads > 0) omp_set_num_threads(threads);
}

/// Calls body(begin, end) for every block of [0, n), blocks spread over threads.
template <class Body>
void for_blocks(std::size_t n, Body&& body) {
  const auto blocks = static_cast<std::ptrdiff_t>(block_count(n));
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t b = 0; b < blocks; ++b) {
    const std::size_t begin = static_cast<std::size_t>(b) * kBlock;
    body(begin, std::min(n, begin + kBlock));
  }
}

/// Deterministic reduction of `width` accumulators. partial(begin, end, acc)
/// adds the contribution of paths [begin, end) into acc[0..width).
// Same as for_blocks, but an exception thrown by any block is carried out of
// the parallel region; when several blocks fail, the lowest block wins so the
// reported error does not depend on scheduling.
template <class Body>
void for_blocks_guarded(std::size_t n, Body&& body) {
  std::vector<std::exception_ptr> errors(block_count(n));
  for_blocks(n, [&](std::size_t begin, std::size_t end) {
    try {
      body(begin, end);
    } catch (...) {
      errors[begin / kBlock] = std::current_exception();
    }
  });
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

template <class Partial>
std::vector<double> block_reduce(std::size_t n, std::size_t width, Partial&& partial) {
  const std::size_t blocks = block_count(n);
  std::vector<double> partials(blocks * width, 0.0);
  for_blocks(n, [&](std::size_t begin, std::size_t end) {
    partial(begin, end, std::span<double>(partials.data() + (begin / kBlock) * width, width));
  });
  std::vector<double> total(width, 0.0);
  for (std::size_t b = 0; b < blocks; ++b) {
    for (std::size_t w = 0; w < width; ++w) total[w] += partials[b * width + w];
  }
  return total;
}

/// Deterministic sum of a path vector.
inline double sum(std::span<const double> v) {
  return block_reduce(v.size(), 1, [&](std::size_t b, std::size_t e, std::span<double> acc) {
    double s = 0.0;
    for (std::size_t p = b; p < e; ++p) s += v[p];
    acc[0] += s;
  })[0];
}

inline double mean(std::span<const double> v) {
  return v.empty() ? 0.0 : sum(v) / static_cast<double>(v.size());
}

/// Mean of v and of v^2 in one pass.
inline std::pair<double, double> moments(std::span<const double> v) {
  const auto acc = block_reduce(v.size(), 2, [&](std::size_t b, std::size_t e, std::span<double> a) {
    double s = 0.0, s2 = 0.0;
    for (std::size_t p = b; p < e; ++p) {
      s += v[p];
      s2 += v[p] * v[p];
    }
    a[0] += s;
    a[1] += s2;
  });
  const double n = static_cast<double>(std::max<std::size_t>(v.size(), 1));
  return {acc[0] / n, acc[1] / n};
}

}  // namespace absvie::par
