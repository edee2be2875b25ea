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

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "locos/linalg.hpp"
#include "locos/ranklist.hpp"
#include "locos/selection.hpp"

namespace locos {

// A protocol entry resolved to a row of the vector matrix in use.
struct SampleRef {
  std::string id;
  std::string label;
  std::size_t row = 0;
};

struct VerificationProtocol {
  std::vector<SampleRef> gallery;
  std::vector<SampleRef> probes;
  // Cohort flow only; row i of both lists is the same person captured under
  // gallery and probe conditions.
  std::vector<SampleRef> cohort_gallery;
  std::vector<SampleRef> cohort_probe;

  void validate(std::size_t num_rows) const;
};

struct ScoringStats {
  std::uint64_t cosine_evals = 0;
  std::uint64_t ranklist_comparisons = 0;
};

// Gallery-major score matrix: scores.at(i, j) compares gallery i to probe j.
struct ScoreMatrix {
  Matrix scores;
  std::vector<std::uint8_t> genuine;  // row-major, 1 where labels match
  std::string method;
  ScoringStats stats;

  bool genuine_at(std::size_t i, std::size_t j) const {
    return genuine[i * scores.cols + j] != 0;
  }
};

enum class Flow { BaselineCosine, CohortRankList, LoCoS, LoCoSRankList };

struct MethodConfig {
  Flow flow = Flow::BaselineCosine;
  std::string name = "baseline";
  SelectionStrategy strategy;   // LoCoS flows
  RankFunction rank_function = RankFunction::S3;  // rank-list flows
  RankSimParams rank_params;

  // Builds the configuration for one of the published method names:
  //   baseline, cohort-s1|s2|s3, locos-random|t|tb|p,
  //   locos-t-s1|s2|s3, locos-tb-s1|s2|s3
  // K defaults to 500; T/B default to an even split of K.
  static MethodConfig parse(const std::string& method_name, std::uint32_t k = 500,
                            std::optional<std::uint32_t> top = std::nullopt,
                            std::optional<std::uint32_t> bottom = std::nullopt,
                            const RankSimParams& rank_params = {});

  bool needs_cohort() const { return flow == Flow::CohortRankList; }
  bool needs_logits() const {
    return flow == Flow::LoCoS || flow == Flow::LoCoSRankList;
  }
};

// 0 = pick automatically (environment override handled by the caller).
struct ScoringOptions {
  unsigned num_threads = 0;
};

// scores[i][j] = cosine of the two feature rows.
ScoreMatrix score_baseline(const VerificationProtocol& protocol,
                           const Matrix& features, const ScoringOptions& opts = {});

// Traditional flow: each side is compared against its cohort split, the two
// similarity lists are rank-converted, and ranks are compared with S1/S2/S3.
// Cohort similarity lists and rank lists are computed once per sample.
ScoreMatrix score_cohort_ranklist(const VerificationProtocol& protocol,
                                  const Matrix& features, const MethodConfig& config,
                                  const ScoringOptions& opts = {});

// Logit-cohort flow over a matrix of logit rows; covers the plain cosine
// variants and the rank-list variants of every selection strategy.
ScoreMatrix score_locos(const VerificationProtocol& protocol, const Matrix& logits,
                        const MethodConfig& config, const ScoringOptions& opts = {});

// Dispatch on config.flow; `vectors` holds feature rows or logit rows
// depending on the flow.
ScoreMatrix score(const VerificationProtocol& protocol, const Matrix& vectors,
                  const MethodConfig& config, const ScoringOptions& opts = {});

}  // namespace locos
