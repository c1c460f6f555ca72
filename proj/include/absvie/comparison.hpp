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
#include <cstdint>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "absvie/absvie_solve.hpp"

namespace absvie {

/// Monotonicity hypotheses declared for the intermediate generator gbar.
struct MonotoneDeclaration {
  bool y_nondecreasing = true;
  bool alpha_increasing = true;
  bool mu_increasing = true;
  bool ordered = true;  // g1 <= gbar <= g2
  // Lower ends of the argument region on which the hypotheses are declared.
  double y_min = -std::numeric_limits<double>::infinity();
  double alpha_min = -std::numeric_limits<double>::infinity();
  double mu_min = -std::numeric_limits<double>::infinity();
};

/// A pair of one-dimensional problems whose generators read only (y, z, alpha, mu).
struct ComparisonCase {
  GeneratorSpec g1;
  GeneratorSpec g2;
  GeneratorSpec gbar;
  FreeTerm phi1;
  FreeTerm phi2;
  MonotoneDeclaration declared;
};

struct MonotonicityReport {
  std::size_t samples = 0;
  std::size_t violations = 0;
  std::size_t first_violation = 0;  // sample index, meaningful when violations > 0
  std::vector<std::string> messages;

  bool ok() const { return violations == 0; }
};

/// Samples argument tuples with ordered perturbations in y, alpha and mu and
/// checks the declared hypotheses, including that no generator reads
/// Z(s,t)-type arguments. Arguments with a finite declared lower end are
/// sampled above it.
MonotonicityReport spot_check_monotonicity(const ComparisonCase& c, const TimeGrid& grid,
                                           std::size_t samples, std::uint64_t seed);

struct OrderingReport {
  std::vector<double> violation_fraction;  // per node in [0,T]
  std::vector<double> worst_margin;        // min over paths of Y2 - Y1
  std::vector<double> mean_margin;
  std::vector<double> epsilon;             // statistical allowance per node
  double max_violation_fraction = 0.0;
  std::size_t exact_violations = 0;        // paths with Y1 > Y2, no allowance
  Diagnostics first;
  Diagnostics second;
  MSolution y1;
  MSolution y2;

  bool passed(double threshold = 1e-3) const { return max_violation_fraction <= threshold; }
};

/// Solves both problems on the shared ensemble and measures the ordering
/// Y1 <= Y2 per node. The allowance is `stat_factor` pooled regression
/// standard errors.
OrderingReport run_comparison(const ComparisonCase& c, std::shared_ptr<const Projector> projector,
                              const SolveOptions& options, double stat_factor = 3.0,
                              std::size_t hypothesis_samples = 10000);

}  // namespace absvie
