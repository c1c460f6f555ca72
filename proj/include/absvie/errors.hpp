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

#include <cstddef>
#include <stdexcept>
#include <string>

namespace absvie {

/// Numerical failure inside a solver, located at the node pair (i, j) where a
/// coefficient or generator first produced a non-finite value.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, std::size_t i, std::size_t j)
      : std::runtime_error(what + " at (i=" + std::to_string(i) + ", j=" + std::to_string(j) + ")"),
        i_(i),
        j_(j) {}

  std::size_t i() const { return i_; }
  std::size_t j() const { return j_; }

 private:
  std::size_t i_;
  std::size_t j_;
};

}  // namespace absvie
