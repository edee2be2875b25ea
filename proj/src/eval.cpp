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

#include "locos/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "locos/error.hpp"
#include "locos/pipeline.hpp"

namespace locos {

std::pair<std::vector<double>, std::vector<double>> partition_scores(
    const ScoreMatrix& matrix) {
  const std::size_t total = matrix.scores.rows * matrix.scores.cols;
  if (matrix.genuine.size() != total) {
    throw_data("genuine mask size does not match score matrix shape");
  }
  std::vector<double> genuine, impostor;
  for (std::size_t i = 0; i < total; ++i) {
    (matrix.genuine[i] ? genuine : impostor).push_back(matrix.scores.data[i]);
  }
  if (genuine.empty()) {
    throw_data("no genuine pairs in score matrix; verification metrics undefined");
  }
  if (impostor.empty()) {
    throw_data("no impostor pairs in score matrix; verification metrics undefined");
  }
  return {std::move(genuine), std::move(impostor)};
}

namespace {

std::vector<double> sorted_descending(std::span<const double> scores,
                                      const char* side) {
  std::vector<double> out(scores.begin(), scores.end());
  for (double s : out) {
    if (!std::isfinite(s)) {
      throw_data(std::string("non-finite ") + side + " score");
    }
  }
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

}  // namespace

RocCurve roc(std::span<const double> genuine, std::span<const double> impostor) {
  if (genuine.empty() || impostor.empty()) {
    throw_data("roc requires nonempty genuine and impostor sets");
  }
  const auto gen = sorted_descending(genuine, "genuine");
  const auto imp = sorted_descending(impostor, "impostor");

  RocCurve curve;
  curve.num_genuine = gen.size();
  curve.num_impostor = imp.size();
  curve.points.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0});

  // Sweep every distinct score as a threshold, highest first; counts of
  // scores >= t grow monotonically as t drops.
  std::size_t gi = 0, ii = 0;
  while (gi < gen.size() || ii < imp.size()) {
    double t;
    if (gi < gen.size() && ii < imp.size()) {
      t = std::max(gen[gi], imp[ii]);
    } else if (gi < gen.size()) {
      t = gen[gi];
    } else {
      t = imp[ii];
    }
    while (gi < gen.size() && gen[gi] >= t) ++gi;
    while (ii < imp.size() && imp[ii] >= t) ++ii;
    curve.points.push_back({t, static_cast<double>(ii) / imp.size(),
                            static_cast<double>(gi) / gen.size()});
  }
  return curve;
}

VerificationReport tmr_at_fmr(std::span<const double> genuine,
                              std::span<const double> impostor, double target_fmr) {
  if (!(target_fmr >= 0.0) || !(target_fmr <= 1.0)) {
    throw_parameter("target FMR must lie in [0,1], got " + std::to_string(target_fmr));
  }
  VerificationReport report;
  report.target_fmr = target_fmr;
  report.curve = roc(genuine, impostor);
  report.num_genuine = report.curve.num_genuine;
  report.num_impostor = report.curve.num_impostor;
  report.resolution_limited =
      target_fmr > 0.0 &&
      static_cast<double>(report.num_impostor) * target_fmr < 1.0;

  // Points are ordered by descending threshold with non-decreasing FMR, so
  // the last point still within the target is the smallest such threshold.
  const RocPoint* chosen = &report.curve.points.front();
  for (const RocPoint& p : report.curve.points) {
    if (p.fmr <= target_fmr) {
      chosen = &p;
    } else {
      break;
    }
  }
  report.threshold = chosen->threshold;
  report.tmr_at_target = chosen->tmr;
  report.fmr_at_threshold = chosen->fmr;
  return report;
}

}  // namespace locos
