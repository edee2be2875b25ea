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

#include "locos/pipeline.hpp"

#include <algorithm>
#include <exception>
#include <mutex>
#include <thread>

#include "locos/error.hpp"

namespace locos {

namespace {

void check_refs(const std::vector<SampleRef>& refs, std::size_t num_rows,
                const char* role) {
  for (const SampleRef& ref : refs) {
    if (ref.row >= num_rows) {
      throw_data(std::string(role) + " sample '" + ref.id + "' references row " +
                 std::to_string(ref.row) + " but the vector matrix has " +
                 std::to_string(num_rows) + " rows");
    }
  }
}

unsigned resolve_threads(const ScoringOptions& opts, std::size_t work_items) {
  unsigned n = opts.num_threads;
  if (n == 0) {
    n = std::thread::hardware_concurrency();
  }
  n = std::max(1u, n);
  return static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(work_items, 1)));
}

// Static partition over [0, count); results never depend on the split.
// The first worker exception is rethrown on the calling thread.
template <typename Fn>
void parallel_chunks(std::size_t count, unsigned num_threads, Fn&& fn) {
  if (num_threads <= 1 || count <= 1) {
    fn(std::size_t{0}, count);
    return;
  }
  std::vector<std::thread> workers;
  workers.reserve(num_threads);
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const std::size_t chunk = (count + num_threads - 1) / num_threads;
  for (unsigned t = 0; t < num_threads; ++t) {
    const std::size_t begin = std::min(count, t * chunk);
    const std::size_t end = std::min(count, begin + chunk);
    if (begin == end) {
      break;
    }
    workers.emplace_back([&fn, &failure, &failure_mutex, begin, end] {
      try {
        fn(begin, end);
      } catch (...) {
        const std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) {
          failure = std::current_exception();
        }
      }
    });
  }
  for (auto& w : workers) {
    w.join();
  }
  if (failure) {
    std::rethrow_exception(failure);
  }
}

void fill_genuine_mask(const VerificationProtocol& protocol, ScoreMatrix& out) {
  const std::size_t cols = protocol.probes.size();
  out.genuine.assign(protocol.gallery.size() * cols, 0);
  for (std::size_t i = 0; i < protocol.gallery.size(); ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      out.genuine[i * cols + j] =
          protocol.gallery[i].label == protocol.probes[j].label ? 1 : 0;
    }
  }
}

ScoreMatrix make_score_matrix(const VerificationProtocol& protocol,
                              const std::string& method) {
  ScoreMatrix out;
  out.scores = Matrix(protocol.gallery.size(), protocol.probes.size());
  out.method = method;
  fill_genuine_mask(protocol, out);
  return out;
}

}  // namespace

void VerificationProtocol::validate(std::size_t num_rows) const {
  if (gallery.empty()) {
    throw_protocol("protocol has no gallery samples");
  }
  if (probes.empty()) {
    throw_protocol("protocol has no probe samples");
  }
  if (cohort_gallery.size() != cohort_probe.size()) {
    throw_protocol("cohort splits are misaligned: " +
                   std::to_string(cohort_gallery.size()) + " gallery-side vs " +
                   std::to_string(cohort_probe.size()) + " probe-side");
  }
  check_refs(gallery, num_rows, "gallery");
  check_refs(probes, num_rows, "probe");
  check_refs(cohort_gallery, num_rows, "cohort_gallery");
  check_refs(cohort_probe, num_rows, "cohort_probe");
}

MethodConfig MethodConfig::parse(const std::string& method_name, std::uint32_t k,
                                 std::optional<std::uint32_t> top,
                                 std::optional<std::uint32_t> bottom,
                                 const RankSimParams& rank_params) {
  MethodConfig config;
  config.name = method_name;
  config.rank_params = rank_params;

  const auto rank_fn = [&](char digit) {
    switch (digit) {
      case '1':
        return RankFunction::S1;
      case '2':
        return RankFunction::S2;
      case '3':
        return RankFunction::S3;
      default:
        throw_parameter("unknown rank function suffix in method '" + method_name + "'");
    }
  };

  if (k == 0) {
    throw_parameter("selection size K must be positive");
  }
  const auto split_top = top.value_or(k / 2);
  const auto split_bottom = bottom.value_or(k - k / 2);

  if (method_name == "baseline") {
    config.flow = Flow::BaselineCosine;
    return config;
  }
  if (method_name.rfind("cohort-s", 0) == 0 && method_name.size() == 9) {
    config.flow = Flow::CohortRankList;
    config.rank_function = rank_fn(method_name[8]);
    return config;
  }
  if (method_name == "locos-random") {
    config.flow = Flow::LoCoS;
    config.strategy = SelectionStrategy::first_k(k);
    return config;
  }
  if (method_name == "locos-t") {
    config.flow = Flow::LoCoS;
    config.strategy = SelectionStrategy::top_k(k);
    return config;
  }
  if (method_name == "locos-tb") {
    config.flow = Flow::LoCoS;
    config.strategy = SelectionStrategy::top_bottom(split_top, split_bottom);
    return config;
  }
  if (method_name == "locos-p") {
    config.flow = Flow::LoCoS;
    config.strategy = SelectionStrategy::probe_top_k(k);
    return config;
  }
  if (method_name.rfind("locos-t-s", 0) == 0 && method_name.size() == 10) {
    config.flow = Flow::LoCoSRankList;
    config.strategy = SelectionStrategy::top_k(k);
    config.rank_function = rank_fn(method_name[9]);
    return config;
  }
  if (method_name.rfind("locos-tb-s", 0) == 0 && method_name.size() == 11) {
    config.flow = Flow::LoCoSRankList;
    config.strategy = SelectionStrategy::top_bottom(split_top, split_bottom);
    config.rank_function = rank_fn(method_name[10]);
    return config;
  }
  throw_parameter("unknown method '" + method_name + "'");
}

ScoreMatrix score_baseline(const VerificationProtocol& protocol,
                           const Matrix& features, const ScoringOptions& opts) {
  protocol.validate(features.rows);
  ScoreMatrix out = make_score_matrix(protocol, "baseline");
  const std::size_t cols = protocol.probes.size();
  const unsigned threads = resolve_threads(opts, protocol.gallery.size());
  parallel_chunks(protocol.gallery.size(), threads,
                  [&](std::size_t begin, std::size_t end) {
                    for (std::size_t i = begin; i < end; ++i) {
                      const auto g = features.row(protocol.gallery[i].row);
                      for (std::size_t j = 0; j < cols; ++j) {
                        out.scores.at(i, j) =
                            cosine(g, features.row(protocol.probes[j].row));
                      }
                    }
                  });
  out.stats.cosine_evals =
      static_cast<std::uint64_t>(protocol.gallery.size()) * cols;
  return out;
}

namespace {

// One rank list per sample against its cohort split; cohort features are
// shared across all pairs, so this is the whole per-sample cost.
std::vector<RankList> cohort_rank_lists(const std::vector<SampleRef>& samples,
                                        const std::vector<SampleRef>& cohort,
                                        const Matrix& features,
                                        ScoringStats& stats) {
  std::vector<RankList> lists;
  lists.reserve(samples.size());
  Vector sims(cohort.size());
  for (const SampleRef& sample : samples) {
    const auto feature = features.row(sample.row);
    for (std::size_t m = 0; m < cohort.size(); ++m) {
      sims[m] = cosine(feature, features.row(cohort[m].row));
    }
    stats.cosine_evals += cohort.size();
    lists.push_back(ranks_from_similarities(sims));
  }
  return lists;
}

}  // namespace

ScoreMatrix score_cohort_ranklist(const VerificationProtocol& protocol,
                                  const Matrix& features, const MethodConfig& config,
                                  const ScoringOptions& opts) {
  protocol.validate(features.rows);
  if (protocol.cohort_gallery.empty()) {
    throw_protocol("method '" + config.name + "' requires cohort samples");
  }
  ScoreMatrix out = make_score_matrix(protocol, config.name);

  const auto gallery_ranks = cohort_rank_lists(protocol.gallery,
                                               protocol.cohort_gallery, features,
                                               out.stats);
  const auto probe_ranks =
      cohort_rank_lists(protocol.probes, protocol.cohort_probe, features, out.stats);

  const std::size_t cols = protocol.probes.size();
  const unsigned threads = resolve_threads(opts, protocol.gallery.size());
  parallel_chunks(protocol.gallery.size(), threads,
                  [&](std::size_t begin, std::size_t end) {
                    for (std::size_t i = begin; i < end; ++i) {
                      for (std::size_t j = 0; j < cols; ++j) {
                        out.scores.at(i, j) =
                            rank_similarity(config.rank_function, gallery_ranks[i],
                                            probe_ranks[j], config.rank_params);
                      }
                    }
                  });
  out.stats.ranklist_comparisons =
      static_cast<std::uint64_t>(protocol.gallery.size()) * cols;
  return out;
}

namespace {

// Gather the probe's values at a template's selected indexes; the gallery
// side of the pair is the template itself.
void gather(std::span<const double> row, std::span<const std::uint32_t> indexes,
            Vector& out) {
  out.resize(indexes.size());
  for (std::size_t j = 0; j < indexes.size(); ++j) {
    out[j] = row[indexes[j]];
  }
}

ScoreMatrix score_locos_gallery_selected(const VerificationProtocol& protocol,
                                         const Matrix& logits,
                                         const MethodConfig& config,
                                         const ScoringOptions& opts) {
  ScoreMatrix out = make_score_matrix(protocol, config.name);
  const std::size_t cols = protocol.probes.size();

  std::vector<GalleryTemplate> templates;
  templates.reserve(protocol.gallery.size());
  for (const SampleRef& g : protocol.gallery) {
    templates.push_back(
        make_template(logits.row(g.row), config.strategy, g.id));
  }

  const bool rank_based = config.flow == Flow::LoCoSRankList;
  std::vector<RankList> template_ranks;
  if (rank_based) {
    template_ranks.reserve(templates.size());
    for (const auto& tpl : templates) {
      template_ranks.push_back(ranks_from_similarities(tpl.selected_logits));
    }
  }

  const unsigned threads = resolve_threads(opts, protocol.gallery.size());
  parallel_chunks(protocol.gallery.size(), threads,
                  [&](std::size_t begin, std::size_t end) {
                    Vector gathered;
                    for (std::size_t i = begin; i < end; ++i) {
                      const GalleryTemplate& tpl = templates[i];
                      for (std::size_t j = 0; j < cols; ++j) {
                        const auto probe_row = logits.row(protocol.probes[j].row);
                        if (rank_based) {
                          gather(probe_row, tpl.selection.indexes, gathered);
                          out.scores.at(i, j) = rank_similarity(
                              config.rank_function, template_ranks[i],
                              ranks_from_similarities(gathered),
                              config.rank_params);
                        } else {
                          out.scores.at(i, j) = score_template(tpl, probe_row);
                        }
                      }
                    }
                  });
  if (rank_based) {
    out.stats.ranklist_comparisons =
        static_cast<std::uint64_t>(protocol.gallery.size()) * cols;
  } else {
    out.stats.cosine_evals = static_cast<std::uint64_t>(protocol.gallery.size()) *
                             cols * (config.strategy.bottom > 0 ? 2 : 1);
  }
  return out;
}

ScoreMatrix score_locos_probe_selected(const VerificationProtocol& protocol,
                                       const Matrix& logits,
                                       const MethodConfig& config,
                                       const ScoringOptions& opts) {
  ScoreMatrix out = make_score_matrix(protocol, config.name);
  const std::size_t rows = protocol.gallery.size();

  // Indexes come from each probe and are applied uniformly to every gallery
  // vector, so the parallel axis is probes.
  const unsigned threads = resolve_threads(opts, protocol.probes.size());
  parallel_chunks(
      protocol.probes.size(), threads, [&](std::size_t begin, std::size_t end) {
        Vector gathered;
        for (std::size_t j = begin; j < end; ++j) {
          const auto probe_row = logits.row(protocol.probes[j].row);
          const IndexSelection sel = select_indexes(
              probe_row, SelectionStrategy::top_k(config.strategy.k));
          GalleryTemplate probe_side;
          probe_side.strategy = SelectionStrategy::top_k(config.strategy.k);
          probe_side.selection = sel;
          gather(probe_row, sel.indexes, probe_side.selected_logits);
          probe_side.source_id = protocol.probes[j].id;
          probe_side.num_classes = static_cast<std::uint32_t>(probe_row.size());
          probe_side.refresh_norms();
          for (std::size_t i = 0; i < rows; ++i) {
            // score_template(probe_side, gallery) keeps the cosine symmetric.
            out.scores.at(i, j) =
                score_template(probe_side, logits.row(protocol.gallery[i].row));
          }
        }
      });
  out.stats.cosine_evals =
      static_cast<std::uint64_t>(rows) * protocol.probes.size();
  return out;
}

}  // namespace

ScoreMatrix score_locos(const VerificationProtocol& protocol, const Matrix& logits,
                        const MethodConfig& config, const ScoringOptions& opts) {
  protocol.validate(logits.rows);
  config.strategy.validate(logits.cols);
  if (config.flow == Flow::LoCoSRankList &&
      config.strategy.kind == SelectionKind::ProbeTopK) {
    throw_parameter("probe-selected indexes are not combined with rank functions");
  }
  if (config.strategy.kind == SelectionKind::ProbeTopK) {
    return score_locos_probe_selected(protocol, logits, config, opts);
  }
  return score_locos_gallery_selected(protocol, logits, config, opts);
}

ScoreMatrix score(const VerificationProtocol& protocol, const Matrix& vectors,
                  const MethodConfig& config, const ScoringOptions& opts) {
  switch (config.flow) {
    case Flow::BaselineCosine:
      return score_baseline(protocol, vectors, opts);
    case Flow::CohortRankList:
      return score_cohort_ranklist(protocol, vectors, config, opts);
    case Flow::LoCoS:
    case Flow::LoCoSRankList:
      return score_locos(protocol, vectors, config, opts);
  }
  throw_parameter("unknown scoring flow");
}

}  // namespace locos
