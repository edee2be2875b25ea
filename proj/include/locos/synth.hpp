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
#include <vector>

#include "locos/io.hpp"
#include "locos/linalg.hpp"

namespace locos {

// Synthetic identities: unit-norm class centers on the D-sphere stand in for
// trained class means; samples are centers rotated by a random angle, which
// models capture quality directly in the geometry every score depends on.
struct SynthConfig {
  std::uint32_t num_identities = 2000;   // C, columns of the weight matrix
  std::uint32_t dim = 128;               // D
  std::uint32_t num_eval_identities = 100;
  std::uint32_t num_cohort = 0;          // extra identities with both conditions
  double sigma_gallery = 0.0;            // angular noise scale, radians
  double sigma_probe = 0.0;
  std::uint64_t seed = 0;
  // When set, evaluation identities get fresh centers outside the weight
  // matrix's identity set (open-set conditions).
  bool disjoint_identities = false;

  void validate() const;
};

struct SynthData {
  Matrix weights;   // C x D, unit-norm rows
  Matrix features;  // gallery rows, then probe rows, then cohort splits
  std::vector<io::ProtocolRecord> protocol;
  // Weight-matrix row backing each eval identity; empty in disjoint mode.
  std::vector<std::uint32_t> eval_identity_rows;
};

// Deterministic for a given config: one seeded stream, fixed draw order.
SynthData generate(const SynthConfig& config);

}  // namespace locos
