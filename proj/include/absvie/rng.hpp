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

#include <array>
#include <cstdint>

namespace absvie::rng {

/// Philox4x32-10 block function (Salmon et al., SC'11). Stateless: the output
/// is a pure function of (counter, key), which is what lets every Brownian
/// increment be regenerated independently of thread layout.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// 64 random bits keyed by the seed and addressed by (path, step, dim).
std::uint64_t counter_bits(std::uint64_t seed, std::uint64_t path,
                           std::uint64_t step, std::uint64_t dim);

/// Maps 64 bits to a uniform in the open interval (0, 1) using the top 53 bits.
double uniform_open(std::uint64_t bits);

/// Standard normal quantile, Wichura's AS241 (PPND16), ~1e-16 relative accuracy.
double inverse_normal_cdf(double u);

/// Standard normal draw addressed by (seed, path, step, dim).
inline double gaussian(std::uint64_t seed, std::uint64_t path,
                       std::uint64_t step, std::uint64_t dim) {
  return inverse_normal_cdf(uniform_open(counter_bits(seed, path, step, dim)));
}

}  // namespace absvie::rng
