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

#include "locos/ranklist.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "locos/error.hpp"

namespace locos {

namespace {

// Terms are accumulated in a canonical order (ascending by rank sum is not
// needed; descending bucket index sums the smallest terms first). The bucket
// pass makes the scores independent of cohort ordering bit for bit, and
// symmetric in the two arguments.
std::vector<std::uint32_t> rank_sum_buckets(const RankList& gallery,
                                            const RankList& probe) {
  const std::size_t n = gallery.size();
  if (n == 0) {
    throw_data("rank-list similarity of empty lists");
  }
  if (probe.size() != n) {
    throw_data("rank-list length mismatch: " + std::to_string(n) + " vs " +
               std::to_string(probe.size()));
  }
  std::vector<std::uint32_t> counts(2 * n - 1, 0);
  for (std::size_t m = 0; m < n; ++m) {
    if (gallery[m] >= n || probe[m] >= n) {
      throw_data("rank out of range at position " + std::to_string(m));
    }
    counts[static_cast<std::size_t>(gallery[m]) + probe[m]] += 1;
  }
  return counts;
}

}  // namespace

RankList ranks_from_similarities(std::span<const double> similarities) {
  const std::size_t n = similarities.size();
  if (n == 0) {
    throw_data("cannot rank an empty similarity list");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(similarities[i])) {
      throw_data("non-finite similarity at index " + std::to_string(i));
    }
  }
  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    if (similarities[a] != similarities[b]) {
      return similarities[a] > similarities[b];
    }
    return a < b;
  });
  RankList ranks(n);
  for (std::uint32_t r = 0; r < n; ++r) {
    ranks[order[r]] = r;
  }
  return ranks;
}

double s1(const RankList& gallery, const RankList& probe, bool normalize) {
  const auto counts = rank_sum_buckets(gallery, probe);
  const std::size_t n = gallery.size();
  double score = 0.0;
  for (std::size_t x = counts.size(); x-- > 0;) {
    if (counts[x] != 0) {
      score += counts[x] * s1_contribution(static_cast<double>(x));
    }
  }
  if (!normalize) {
    return score;
  }
  // The normalizer is the identical-rank-list score, accumulated through the
  // same bucket sequence so that identical inputs divide out to exactly 1.
  double max_score = 0.0;
  for (std::size_t r = n; r-- > 0;) {
    max_score += s1_contribution(static_cast<double>(2 * r));
  }
  return score / max_score;
}

double s2(const RankList& gallery, const RankList& probe, std::uint32_t k_cutoff) {
  const std::size_t n = gallery.size();
  if (n == 0) {
    throw_data("rank-list similarity of empty lists");
  }
  if (probe.size() != n) {
    throw_data("rank-list length mismatch: " + std::to_string(n) + " vs " +
               std::to_string(probe.size()));
  }
  // Ranks at or beyond the cutoff contribute nothing, so any cutoff past the
  // list length scores identically to k = Nc.
  const std::uint64_t k = std::min<std::uint64_t>(k_cutoff, n);
  // Terms are integer products; an exact wide accumulator keeps the sum
  // independent of cohort ordering at any list length.
  unsigned __int128 acc = 0;
  for (std::size_t m = 0; m < n; ++m) {
    if (gallery[m] >= n || probe[m] >= n) {
      throw_data("rank out of range at position " + std::to_string(m));
    }
    const std::uint64_t g = gallery[m];
    const std::uint64_t p = probe[m];
    if (g <= k && p <= k) {
      acc += static_cast<unsigned __int128>(k + 1 - g) * (k + 1 - p);
    }
  }
  return static_cast<double>(acc);
}

double s3(const RankList& gallery, const RankList& probe, double lambda,
          bool normalize) {
  if (!(lambda > 0.0) || !(lambda < 1.0)) {
    throw_parameter("lambda must lie strictly inside (0,1), got " +
                    std::to_string(lambda));
  }
  const auto counts = rank_sum_buckets(gallery, probe);
  const std::size_t n = gallery.size();
  std::vector<double> powers(2 * n - 1);
  powers[0] = 1.0;
  for (std::size_t x = 1; x < powers.size(); ++x) {
    powers[x] = powers[x - 1] * lambda;
  }
  double score = 0.0;
  for (std::size_t x = counts.size(); x-- > 0;) {
    if (counts[x] != 0) {
      score += counts[x] * s3_contribution(powers[x]);
    }
  }
  if (!normalize) {
    return score;
  }
  double max_score = 0.0;
  for (std::size_t r = n; r-- > 0;) {
    max_score += s3_contribution(powers[2 * r]);
  }
  return score / max_score;
}

double rank_similarity(RankFunction fn, const RankList& gallery,
                       const RankList& probe, const RankSimParams& params) {
  switch (fn) {
    case RankFunction::S1:
      return s1(gallery, probe, params.normalize);
    case RankFunction::S2: {
      const std::uint32_t k = params.k_cutoff.value_or(
          static_cast<std::uint32_t>(gallery.size()));
      return s2(gallery, probe, k);
    }
    case RankFunction::S3:
      return s3(gallery, probe, params.lambda, params.normalize);
  }
  throw_parameter("unknown rank function");
}

}  // namespace locos
