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

#include "locos/linalg.hpp"

#include <cmath>
#include <string>

#include "locos/error.hpp"

namespace locos {

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw_data("dimension mismatch in dot product: " + std::to_string(a.size()) +
               " vs " + std::to_string(b.size()));
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    acc += a[i] * b[i];
  }
  return acc;
}

double norm(std::span<const double> v) {
  double acc = 0.0;
  for (double x : v) {
    acc += x * x;
  }
  return std::sqrt(acc);
}

double cosine(std::span<const double> a, std::span<const double> b) {
  if (a.empty()) {
    throw_data("cosine of empty vectors");
  }
  if (a.size() != b.size()) {
    throw_data("dimension mismatch in cosine: " + std::to_string(a.size()) +
               " vs " + std::to_string(b.size()));
  }
  const double na = norm(a);
  const double nb = norm(b);
  if (!std::isfinite(na) || !std::isfinite(nb)) {
    throw_data("non-finite vector in cosine");
  }
  if (na == 0.0 || nb == 0.0) {
    throw_data("zero-norm vector in cosine");
  }
  return dot(a, b) / (na * nb);
}

WeightMatrix::WeightMatrix(Matrix means) : means_(std::move(means)) {
  if (means_.rows == 0 || means_.cols == 0) {
    throw_data("weight matrix must have at least one class and one dimension");
  }
  norms_.resize(means_.rows);
  for (std::size_t c = 0; c < means_.rows; ++c) {
    const double n = norm(means_.row(c));
    if (!std::isfinite(n)) {
      throw_data("non-finite weight entries in class " + std::to_string(c));
    }
    if (n == 0.0) {
      throw_data("zero-norm class mean at class " + std::to_string(c));
    }
    norms_[c] = n;
  }
}

Vector compute_logits(std::span<const double> feature, const WeightMatrix& weights) {
  if (feature.size() != weights.dim()) {
    throw_data("feature dimension " + std::to_string(feature.size()) +
               " does not match weight matrix dimension " +
               std::to_string(weights.dim()));
  }
  const double feature_norm = norm(feature);
  if (!std::isfinite(feature_norm)) {
    throw_data("non-finite feature vector");
  }
  if (feature_norm == 0.0) {
    throw_data("zero-norm feature vector");
  }
  Vector logits(weights.num_classes());
  for (std::size_t c = 0; c < weights.num_classes(); ++c) {
    logits[c] =
        dot(weights.class_mean(c), feature) / (weights.class_norm(c) * feature_norm);
  }
  return logits;
}

}  // namespace locos
