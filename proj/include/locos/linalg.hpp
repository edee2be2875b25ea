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

// Working precision is double throughout; files quantize to float32 (io).
using Vector = std::vector<double>;

// Dense row-major matrix. Rows are samples (feature/logit matrices) or
// class means (weight matrices).
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

  std::span<const double> row(std::size_t r) const {
    return {data.data() + r * cols, cols};
  }
  std::span<double> row(std::size_t r) {
    return {data.data() + r * cols, cols};
  }
};

double dot(std::span<const double> a, std::span<const double> b);
double norm(std::span<const double> v);

// cos(a,b) = a.b / (|a||b|). Zero-norm or non-finite input is an error,
// never a silent 0.
double cosine(std::span<const double> a, std::span<const double> b);

// Per-class mean vectors of a classifier's last layer, one row per training
// identity. Rows are validated (finite, nonzero norm) once at construction;
// norms are cached so logit computation is a dot product and a divide.
class WeightMatrix {
 public:
  explicit WeightMatrix(Matrix means);

  std::size_t num_classes() const { return means_.rows; }
  std::size_t dim() const { return means_.cols; }
  std::span<const double> class_mean(std::size_t c) const {
    return means_.row(c);
  }
  double class_norm(std::size_t c) const { return norms_[c]; }
  const Matrix& means() const { return means_; }

 private:
  Matrix means_;
  std::vector<double> norms_;
};

// Logit vector of a feature: z_c = cos(mean_c, feature) for every class c.
// Class means are normalized here regardless of how they were stored.
Vector compute_logits(std::span<const double> feature, const WeightMatrix& weights);

}  // namespace locos
