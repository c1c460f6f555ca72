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
#include <string>
#include <vector>

namespace acceptance {

struct DeterminismReport {
  std::size_t runs = 0;
  std::size_t mismatches = 0;
  std::string summary;
};

// Runs every acceptance configuration through the experiment runner once per
// thread count and compares the CSV bytes.
DeterminismReport rerun_configs(const std::vector<int>& threads);

}  // namespace acceptance
