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

#include <cstdio>
#include <string>
#include <vector>

namespace absvie::cli {

struct ResultRow {
  double t = 0.0;
  std::string quantity;
  double value = 0.0;
  double std_error = 0.0;
};

/// Long-format result table with columns t,quantity,value,stderr.
class ResultTable {
 public:
  void add(double t, std::string quantity, double value, double std_error = 0.0) {
    rows_.push_back({t, std::move(quantity), value, std_error});
  }
  const std::vector<ResultRow>& rows() const { return rows_; }

  /// Round-trip exact rendering (%.17g), one row per line.
  std::string to_csv() const;
  void write_csv(const std::string& path) const;

 private:
  std::vector<ResultRow> rows_;
};

/// Lower-case hex SHA-1 digest.
std::string sha1_hex(const std::string& data);

void write_text(const std::string& path, const std::string& text);

}  // namespace absvie::cli
