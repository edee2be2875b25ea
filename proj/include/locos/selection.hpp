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
#include <span>
#include <string>
#include <vector>

namespace locos {

// How logit indexes are chosen for comparison.
//   FirstK:    positional indexes [0..K), a stand-in for random selection
//   TopK:      the K largest gallery logits
//   TopBottom: the T largest followed by the B smallest (T + B = K)
//   ProbeTopK: TopK mechanics, but driven by the probe's logits at match time
enum class SelectionKind : std::uint8_t {
  FirstK = 0,
  TopK = 1,
  TopBottom = 2,
  ProbeTopK = 3,
};

const char* selection_kind_name(SelectionKind kind);

struct SelectionStrategy {
  SelectionKind kind = SelectionKind::TopK;
  std::uint32_t k = 500;
  std::uint32_t top = 500;
  std::uint32_t bottom = 0;

  static SelectionStrategy first_k(std::uint32_t k);
  static SelectionStrategy top_k(std::uint32_t k);
  static SelectionStrategy top_bottom(std::uint32_t top, std::uint32_t bottom);
  static SelectionStrategy probe_top_k(std::uint32_t k);

  // Checks the T/B split and that K fits the logit length.
  void validate(std::size_t num_logits) const;
};

// An ordered subset of logit indexes: the first `top` entries are the top
// segment (descending logit order of the selecting vector), the trailing
// `bottom` entries the bottom segment (ascending). The fixed layout is what
// makes the two slices of the score well-defined and templates reproducible.
struct IndexSelection {
  std::vector<std::uint32_t> indexes;
  std::uint32_t top = 0;
  std::uint32_t bottom = 0;

  std::span<const std::uint32_t> top_segment() const {
    return {indexes.data(), top};
  }
  std::span<const std::uint32_t> bottom_segment() const {
    return {indexes.data() + top, bottom};
  }
  void validate(std::size_t num_logits) const;
};

// Selection depends only on the vector passed here; ties break toward the
// smaller index. ProbeTopK uses TopK mechanics (the pipeline decides which
// side's logits to pass).
IndexSelection select_indexes(std::span<const double> logits,
                              const SelectionStrategy& strategy);

// cos over the top segment of both vectors, plus cos over the bottom segment
// when one is present. The same index set is applied to both sides.
double s_locos(std::span<const double> gallery_logits,
               std::span<const double> probe_logits, const IndexSelection& selection);

// Persisted gallery-side representation: the selection and the gallery logit
// values at those indexes. Probe-selected templates keep the whole vector,
// since their indexes are only chosen at match time.
struct GalleryTemplate {
  SelectionStrategy strategy;
  IndexSelection selection;
  std::vector<double> selected_logits;
  std::string source_id;
  std::uint32_t num_classes = 0;

  // Segment norms, cached because a template is compared against many probes.
  double top_norm = 0.0;
  double bottom_norm = 0.0;
  void refresh_norms();
};

GalleryTemplate make_template(std::span<const double> gallery_logits,
                              const SelectionStrategy& strategy, std::string source_id);

// Score a probe against an enrolled template; equals
// s_locos(gallery, probe, template.selection) for compact templates.
double score_template(const GalleryTemplate& tpl, std::span<const double> probe_logits);

}  // namespace locos
