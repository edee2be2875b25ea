// Copyright 2026 The locos authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace locos {

struct ScoreMatrix;

struct RocPoint {
  double threshold;  // decision rule: match iff score >= threshold
  double fmr;        // fraction of impostor scores >= threshold
  double tmr;        // fraction of genuine scores >= threshold
};

// One point per distinct empirical threshold, descending, preceded by a +inf
// sentinel so the curve always contains the (0, .) and (., 1) extremes.
struct RocCurve {
  std::vector<RocPoint> points;
  std::size_t num_genuine = 0;
  std::size_t num_impostor = 0;
};

struct VerificationReport {
  double target_fmr = 1e-3;
  double threshold = 0.0;  // smallest threshold with FMR <= target
  double tmr_at_target = 0.0;
  double fmr_at_threshold = 0.0;
  std::size_t num_genuine = 0;
  std::size_t num_impostor = 0;
  // True when the impostor count cannot resolve the target (fewer than
  // 1/target impostor pairs force FMR all the way to zero).
  bool resolution_limited = false;
  RocCurve curve;
};

// Splits a score matrix by its genuine mask. Either side empty is an error:
// the metrics below are undefined without both.
std::pair<std::vector<double>, std::vector<double>> partition_scores(
    const ScoreMatrix& matrix);

RocCurve roc(std::span<const double> genuine, std::span<const double> impostor);

// Conservative operating point: the smallest threshold whose FMR does not
// exceed the target. No interpolation between empirical points.
VerificationReport tmr_at_fmr(std::span<const double> genuine,
                              std::span<const double> impostor, double target_fmr);

}  // namespace locos
