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

#include "locos/selection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "locos/error.hpp"
#include "locos/linalg.hpp"

namespace locos {

const char* selection_kind_name(SelectionKind kind) {
  switch (kind) {
    case SelectionKind::FirstK:
      return "first";
    case SelectionKind::TopK:
      return "top";
    case SelectionKind::TopBottom:
      return "topbottom";
    case SelectionKind::ProbeTopK:
      return "probe";
  }
  return "?";
}

SelectionStrategy SelectionStrategy::first_k(std::uint32_t k) {
  return {SelectionKind::FirstK, k, k, 0};
}
SelectionStrategy SelectionStrategy::top_k(std::uint32_t k) {
  return {SelectionKind::TopK, k, k, 0};
}
SelectionStrategy SelectionStrategy::top_bottom(std::uint32_t top, std::uint32_t bottom) {
  return {SelectionKind::TopBottom, top + bottom, top, bottom};
}
SelectionStrategy SelectionStrategy::probe_top_k(std::uint32_t k) {
  return {SelectionKind::ProbeTopK, k, k, 0};
}

void SelectionStrategy::validate(std::size_t num_logits) const {
  if (k == 0) {
    throw_parameter("selection size K must be positive");
  }
  if (k > num_logits) {
    throw_parameter("selection size K=" + std::to_string(k) +
                    " exceeds logit length " + std::to_string(num_logits));
  }
  if (kind == SelectionKind::TopBottom) {
    if (top == 0 || bottom == 0 || top + bottom != k) {
      throw_parameter("top+bottom selection needs T > 0, B > 0, T + B = K");
    }
  } else {
    if (top != k || bottom != 0) {
      throw_parameter("non-split selection needs T = K and B = 0");
    }
  }
}

void IndexSelection::validate(std::size_t num_logits) const {
  if (indexes.empty() || top == 0) {
    throw_parameter("index selection must have a nonempty top segment");
  }
  if (static_cast<std::size_t>(top) + bottom != indexes.size()) {
    throw_parameter("index selection segments do not cover the index list");
  }
  for (std::uint32_t idx : indexes) {
    if (idx >= num_logits) {
      throw_data("selected index " + std::to_string(idx) +
                 " out of range for logit length " + std::to_string(num_logits));
    }
  }
}

IndexSelection select_indexes(std::span<const double> logits,
                              const SelectionStrategy& strategy) {
  strategy.validate(logits.size());
  const std::size_t n = logits.size();
  const std::size_t top_count = strategy.top;
  const std::size_t bottom_count = strategy.bottom;
  if (top_count > n || bottom_count > n - top_count) {
    throw_parameter("selection split exceeds logit length");
  }

  IndexSelection sel;
  sel.top = strategy.top;
  sel.bottom = strategy.bottom;

  if (strategy.kind == SelectionKind::FirstK) {
    sel.indexes.resize(strategy.k);
    std::iota(sel.indexes.begin(), sel.indexes.end(), 0u);
    return sel;
  }

  const auto higher = [&](std::uint32_t a, std::uint32_t b) {
    if (logits[a] != logits[b]) {
      return logits[a] > logits[b];
    }
    return a < b;
  };

  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);

  // Top segment: the strategy.top highest entries, kept in descending order.
  const auto top_end = order.begin() + top_count;
  if (top_count < n) {
    std::nth_element(order.begin(), top_end, order.end(), higher);
  }
  std::sort(order.begin(), top_end, higher);

  if (bottom_count > 0) {
    // Bottom segment: the strategy.bottom lowest of the remainder, ascending.
    const auto bottom_begin = order.end() - bottom_count;
    if (top_end != bottom_begin) {
      std::nth_element(top_end, bottom_begin, order.end(), higher);
    }
    std::sort(bottom_begin, order.end(), [&](std::uint32_t a, std::uint32_t b) {
      if (logits[a] != logits[b]) {
        return logits[a] < logits[b];
      }
      return a < b;
    });
    std::move(bottom_begin, order.end(), top_end);
  }
  order.resize(top_count + bottom_count);
  sel.indexes = std::move(order);
  return sel;
}

namespace {

double segment_cosine(std::span<const double> gallery_logits,
                      std::span<const double> probe_logits,
                      std::span<const std::uint32_t> segment, const char* which) {
  double dot_acc = 0.0, g_acc = 0.0, p_acc = 0.0;
  for (std::uint32_t idx : segment) {
    const double g = gallery_logits[idx];
    const double p = probe_logits[idx];
    dot_acc += g * p;
    g_acc += g * g;
    p_acc += p * p;
  }
  const double gn = std::sqrt(g_acc);
  const double pn = std::sqrt(p_acc);
  if (!std::isfinite(gn) || !std::isfinite(pn)) {
    throw_data(std::string("non-finite values in selected ") + which + " segment");
  }
  if (gn == 0.0 || pn == 0.0) {
    throw_data(std::string("zero-norm selected ") + which + " segment");
  }
  return dot_acc / (gn * pn);
}

}  // namespace

double s_locos(std::span<const double> gallery_logits,
               std::span<const double> probe_logits, const IndexSelection& selection) {
  if (gallery_logits.size() != probe_logits.size()) {
    throw_data("logit length mismatch: " + std::to_string(gallery_logits.size()) +
               " vs " + std::to_string(probe_logits.size()));
  }
  selection.validate(gallery_logits.size());
  double score =
      segment_cosine(gallery_logits, probe_logits, selection.top_segment(), "top");
  if (selection.bottom > 0) {
    score += segment_cosine(gallery_logits, probe_logits, selection.bottom_segment(),
                            "bottom");
  }
  return score;
}

void GalleryTemplate::refresh_norms() {
  const std::span<const double> values(selected_logits);
  top_norm = norm(values.subspan(0, selection.top));
  bottom_norm = norm(values.subspan(selection.top, selection.bottom));
}

GalleryTemplate make_template(std::span<const double> gallery_logits,
                              const SelectionStrategy& strategy,
                              std::string source_id) {
  strategy.validate(gallery_logits.size());
  GalleryTemplate tpl;
  tpl.strategy = strategy;
  tpl.source_id = std::move(source_id);
  tpl.num_classes = static_cast<std::uint32_t>(gallery_logits.size());
  if (strategy.kind == SelectionKind::ProbeTopK) {
    // Indexes are only chosen at probe time, so the whole vector is kept.
    tpl.selection.indexes.resize(gallery_logits.size());
    std::iota(tpl.selection.indexes.begin(), tpl.selection.indexes.end(), 0u);
    tpl.selection.top = tpl.num_classes;
    tpl.selection.bottom = 0;
    tpl.selected_logits.assign(gallery_logits.begin(), gallery_logits.end());
  } else {
    tpl.selection = select_indexes(gallery_logits, strategy);
    tpl.selected_logits.reserve(tpl.selection.indexes.size());
    for (std::uint32_t idx : tpl.selection.indexes) {
      tpl.selected_logits.push_back(gallery_logits[idx]);
    }
  }
  tpl.refresh_norms();
  return tpl;
}

double score_template(const GalleryTemplate& tpl, std::span<const double> probe_logits) {
  if (probe_logits.size() != tpl.num_classes) {
    throw_data("probe logit length " + std::to_string(probe_logits.size()) +
               " does not match template class count " +
               std::to_string(tpl.num_classes));
  }
  if (!(tpl.top_norm > 0.0)) {
    throw_data("zero-norm top segment in template " + tpl.source_id);
  }
  const auto top = tpl.selection.top_segment();
  double dot_acc = 0.0, p_acc = 0.0;
  for (std::size_t j = 0; j < top.size(); ++j) {
    const double p = probe_logits[top[j]];
    dot_acc += tpl.selected_logits[j] * p;
    p_acc += p * p;
  }
  const double pn = std::sqrt(p_acc);
  if (!std::isfinite(pn)) {
    throw_data("non-finite probe values in selected top segment");
  }
  if (pn == 0.0) {
    throw_data("zero-norm selected top segment");
  }
  double score = dot_acc / (tpl.top_norm * pn);

  if (tpl.selection.bottom > 0) {
    if (!(tpl.bottom_norm > 0.0)) {
      throw_data("zero-norm bottom segment in template " + tpl.source_id);
    }
    const auto bottom = tpl.selection.bottom_segment();
    double bdot = 0.0, bp = 0.0;
    for (std::size_t j = 0; j < bottom.size(); ++j) {
      const double p = probe_logits[bottom[j]];
      bdot += tpl.selected_logits[tpl.selection.top + j] * p;
      bp += p * p;
    }
    const double bpn = std::sqrt(bp);
    if (!std::isfinite(bpn)) {
      throw_data("non-finite probe values in selected bottom segment");
    }
    if (bpn == 0.0) {
      throw_data("zero-norm selected bottom segment");
    }
    score += bdot / (tpl.bottom_norm * bpn);
  }
  return score;
}

}  // namespace locos
