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

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace locos {

// ranks[m] = rank of cohort identity m: 0 for the most similar identity,
// Nc-1 for the least similar. Always a permutation of {0..Nc-1}.
using RankList = std::vector<std::uint32_t>;

enum class RankFunction { S1, S2, S3 };

struct RankSimParams {
  // S2 cutoff; unset means the saturating choice (the list length).
  std::optional<std::uint32_t> k_cutoff;
  double lambda = 0.99;
  bool normalize = true;
};

// Descending-similarity ranks; ties broken by ascending cohort index so the
// conversion is deterministic across platforms.
RankList ranks_from_similarities(std::span<const double> similarities);

// Per-position contributions. Both are strictly decreasing in the rank sum,
// which is what makes low ranks dominate the scores.
inline double s1_contribution(double rank_sum) {
  // +2 offset: equivalent to 1-based ranks, keeps the rank-0/rank-0 term finite.
  return std::pow(rank_sum + 2.0, -0.25);
}
inline double s3_contribution(double lambda_power) { return lambda_power; }

// s1 = sum_m (g[m] + p[m] + 2)^(-1/4), optionally divided by the
// identical-rank-list score (its analytic maximum).
double s1(const RankList& gallery, const RankList& probe, bool normalize);

// s2 = sum_m max(k+1-g[m], 0) * max(k+1-p[m], 0). Cutoffs beyond the list
// length coincide: k is clamped to Nc. Never normalized.
double s2(const RankList& gallery, const RankList& probe, std::uint32_t k_cutoff);

// s3 = sum_m lambda^(g[m] + p[m]), optionally divided by the
// identical-rank-list score. Requires 0 < lambda < 1.
double s3(const RankList& gallery, const RankList& probe, double lambda,
          bool normalize);

double rank_similarity(RankFunction fn, const RankList& gallery,
                       const RankList& probe, const RankSimParams& params);

}  // namespace locos
