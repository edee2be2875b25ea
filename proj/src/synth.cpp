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

#include "locos/synth.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "locos/error.hpp"

namespace locos {

namespace {

// Distributions are hand-rolled on top of the raw engine so generated data
// is identical across standard libraries, not just across runs.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() {  // (0, 1]
    return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
  }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  std::uint64_t below(std::uint64_t n) { return engine_() % n; }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

Vector random_unit_vector(Rng& rng, std::size_t dim) {
  Vector v(dim);
  double n = 0.0;
  do {
    for (double& x : v) {
      x = rng.normal();
    }
    n = norm(v);
  } while (n == 0.0);
  for (double& x : v) {
    x /= n;
  }
  return v;
}

// Rotate `center` by angle sigma*|z| toward a uniformly random tangent
// direction. The angle is capped at 90 degrees: orthogonal already means no
// identity information left, and degradation never produces anti-similarity.
// sigma = 0 reproduces the center exactly.
Vector perturb(Rng& rng, std::span<const double> center, double sigma) {
  Vector out(center.begin(), center.end());
  if (sigma == 0.0) {
    return out;
  }
  Vector tangent(center.size());
  double tangent_norm = 0.0;
  do {
    for (double& x : tangent) {
      x = rng.normal();
    }
    const double along = dot(tangent, center);
    for (std::size_t i = 0; i < tangent.size(); ++i) {
      tangent[i] -= along * center[i];
    }
    tangent_norm = norm(tangent);
  } while (tangent_norm == 0.0);
  const double angle =
      std::min(sigma * std::abs(rng.normal()), std::numbers::pi / 2.0);
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = c * center[i] + s * tangent[i] / tangent_norm;
  }
  return out;
}

// First `count` entries of a seeded shuffle of [0, n).
std::vector<std::uint32_t> sample_distinct(Rng& rng, std::uint32_t n,
                                           std::uint32_t count) {
  std::vector<std::uint32_t> pool(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    pool[i] = i;
  }
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::uint64_t j = i + rng.below(n - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(count);
  return pool;
}

std::string padded(const char* prefix, std::uint32_t i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s%05u", prefix, i);
  return buf;
}

}  // namespace

void SynthConfig::validate() const {
  if (dim < 2) {
    throw_parameter("synthetic dimension must be at least 2");
  }
  if (num_eval_identities < 2) {
    throw_parameter("need at least 2 evaluation identities");
  }
  if (num_identities < num_eval_identities) {
    throw_parameter("num identities must cover the evaluation identities");
  }
  if (!disjoint_identities &&
      static_cast<std::uint64_t>(num_eval_identities) + num_cohort > num_identities) {
    throw_parameter("evaluation plus cohort identities exceed the identity count");
  }
  if (disjoint_identities && num_cohort > num_identities) {
    throw_parameter("cohort identities exceed the identity count");
  }
  if (sigma_gallery < 0.0 || sigma_probe < 0.0) {
    throw_parameter("noise scales must be nonnegative");
  }
}

SynthData generate(const SynthConfig& config) {
  config.validate();
  Rng rng(config.seed);

  SynthData data;
  data.weights = Matrix(config.num_identities, config.dim);
  for (std::uint32_t c = 0; c < config.num_identities; ++c) {
    const Vector center = random_unit_vector(rng, config.dim);
    std::copy(center.begin(), center.end(), data.weights.row(c).begin());
  }

  // Eval identities first, then cohort identities from the remaining pool.
  const std::uint32_t num_eval = config.num_eval_identities;
  std::vector<std::uint32_t> chosen =
      sample_distinct(rng, config.num_identities,
                      config.disjoint_identities
                          ? config.num_cohort
                          : num_eval + config.num_cohort);
  std::vector<std::uint32_t> cohort_rows;
  if (config.disjoint_identities) {
    cohort_rows = chosen;
  } else {
    data.eval_identity_rows.assign(chosen.begin(), chosen.begin() + num_eval);
    cohort_rows.assign(chosen.begin() + num_eval, chosen.end());
  }

  std::vector<Vector> eval_centers(num_eval);
  for (std::uint32_t e = 0; e < num_eval; ++e) {
    if (config.disjoint_identities) {
      eval_centers[e] = random_unit_vector(rng, config.dim);
    } else {
      const auto row = data.weights.row(data.eval_identity_rows[e]);
      eval_centers[e].assign(row.begin(), row.end());
    }
  }

  const std::uint32_t num_cohort = config.num_cohort;
  data.features = Matrix(2ull * num_eval + 2ull * num_cohort, config.dim);
  const auto emit = [&](std::size_t row, const Vector& v) {
    std::copy(v.begin(), v.end(), data.features.row(row).begin());
  };

  for (std::uint32_t e = 0; e < num_eval; ++e) {
    emit(e, perturb(rng, eval_centers[e], config.sigma_gallery));
  }
  for (std::uint32_t e = 0; e < num_eval; ++e) {
    emit(num_eval + e, perturb(rng, eval_centers[e], config.sigma_probe));
  }
  for (std::uint32_t m = 0; m < num_cohort; ++m) {
    emit(2ull * num_eval + m,
         perturb(rng, data.weights.row(cohort_rows[m]), config.sigma_gallery));
  }
  for (std::uint32_t m = 0; m < num_cohort; ++m) {
    emit(2ull * num_eval + num_cohort + m,
         perturb(rng, data.weights.row(cohort_rows[m]), config.sigma_probe));
  }

  const char* label_prefix = config.disjoint_identities ? "x" : "id";
  for (std::uint32_t e = 0; e < num_eval; ++e) {
    const std::uint32_t label_id =
        config.disjoint_identities ? e : data.eval_identity_rows[e];
    data.protocol.push_back({io::Role::Gallery, padded("g", e),
                             padded(label_prefix, label_id), std::to_string(e)});
  }
  for (std::uint32_t e = 0; e < num_eval; ++e) {
    const std::uint32_t label_id =
        config.disjoint_identities ? e : data.eval_identity_rows[e];
    data.protocol.push_back({io::Role::Probe, padded("p", e),
                             padded(label_prefix, label_id),
                             std::to_string(num_eval + e)});
  }
  for (std::uint32_t m = 0; m < num_cohort; ++m) {
    data.protocol.push_back({io::Role::CohortGallery, padded("cg", m),
                             padded("id", cohort_rows[m]),
                             std::to_string(2ull * num_eval + m)});
  }
  for (std::uint32_t m = 0; m < num_cohort; ++m) {
    data.protocol.push_back({io::Role::CohortProbe, padded("cp", m),
                             padded("id", cohort_rows[m]),
                             std::to_string(2ull * num_eval + num_cohort + m)});
  }
  return data;
}

}  // namespace locos
