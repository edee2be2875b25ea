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
//
// Release gate. Runs the toolkit's binding checks end to end and prints one
// line per criterion; exits nonzero if any fail. The CLI binary path is
// taken from argv[1] for the determinism session.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "locos/eval.hpp"
#include "locos/io.hpp"
#include "locos/linalg.hpp"
#include "locos/pipeline.hpp"
#include "locos/ranklist.hpp"
#include "locos/selection.hpp"
#include "locos/synth.hpp"

namespace fs = std::filesystem;
using namespace locos;
using Clock = std::chrono::steady_clock;

namespace {

std::string g_cli;
fs::path g_work;

struct Check {
  bool ok = true;
  std::string detail;
  void require(bool condition, const std::string& what) {
    if (!condition && ok) {
      ok = false;
      detail = what;
    }
  }
};

RankList random_permutation(std::mt19937_64& rng, std::size_t n) {
  RankList perm(n);
  std::iota(perm.begin(), perm.end(), 0u);
  std::shuffle(perm.begin(), perm.end(), rng);
  return perm;
}

Matrix logits_for(const Matrix& features, const WeightMatrix& weights) {
  Matrix logits(features.rows, weights.num_classes());
  for (std::size_t r = 0; r < features.rows; ++r) {
    const Vector z = compute_logits(features.row(r), weights);
    std::copy(z.begin(), z.end(), logits.row(r).begin());
  }
  return logits;
}

double tmr_of(const ScoreMatrix& scores, double target = 1e-3) {
  const auto [genuine, impostor] = partition_scores(scores);
  return tmr_at_fmr(genuine, impostor, target).tmr_at_target;
}

// ---------------------------------------------------------------------------
// 1. Normalized s1/s3 hit exactly 1 on identical rank lists and stay below 1
//    on every non-identical pair. Must finish within a second.

Check criterion_rank_identity() {
  Check check;
  const auto start = Clock::now();
  std::mt19937_64 rng(1001);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng() % 200;
    const RankList a = random_permutation(rng, n);
    check.require(std::abs(s1(a, a, true) - 1.0) <= 1e-9, "s1 identity off 1");
    check.require(std::abs(s3(a, a, 0.99, true) - 1.0) <= 1e-9, "s3 identity off 1");
    if (n >= 2) {
      RankList b = a;
      const std::size_t i = rng() % n;
      std::size_t j = rng() % n;
      while (j == i) j = rng() % n;
      std::swap(b[i], b[j]);
      check.require(s1(a, b, true) < 1.0, "s1 non-identical reached 1");
      check.require(s3(a, b, 0.99, true) < 1.0, "s3 non-identical reached 1");
    }
  }
  const double elapsed = std::chrono::duration<double>(Clock::now() - start).count();
  check.require(elapsed < 1.0, "identity sweep took " + std::to_string(elapsed) + "s");
  return check;
}

// ---------------------------------------------------------------------------
// 2. s2 saturates: any cutoff at or past the list length scores identically.

Check criterion_s2_saturation() {
  Check check;
  std::mt19937_64 rng(1002);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng() % 300;
    const RankList a = random_permutation(rng, n);
    const RankList b = random_permutation(rng, n);
    const auto n32 = static_cast<std::uint32_t>(n);
    check.require(s2(a, b, n32) == s2(a, b, n32 + 17), "s2 changed past saturation");
  }
  return check;
}

// ---------------------------------------------------------------------------
// 3. s3 self-similarity dominates, exhaustively for lengths up to 6.

Check criterion_s3_self_maximality() {
  Check check;
  for (std::size_t n = 1; n <= 6; ++n) {
    RankList base(n);
    std::iota(base.begin(), base.end(), 0u);
    std::vector<RankList> perms;
    do {
      perms.push_back(base);
    } while (std::next_permutation(base.begin(), base.end()));
    for (const auto& a : perms) {
      const double self = s3(a, a, 0.99, false);
      for (const auto& b : perms) {
        if (a == b) {
          check.require(s3(a, b, 0.99, false) == self, "self score unstable");
        } else {
          check.require(s3(a, b, 0.99, false) < self, "non-identical pair not below");
        }
      }
    }
  }
  return check;
}

// ---------------------------------------------------------------------------
// 4. Monotone transforms of the similarity lists and joint cohort
//    permutations leave all three scores bit-identical. 500 trials.

Check criterion_invariance_suites() {
  Check check;
  std::mt19937_64 rng(1004);
  std::uniform_int_distribution<int> level(0, 12);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 2 + rng() % 64;
    std::vector<double> lg(n), lp(n);
    for (double& x : lg) x = 0.25 * level(rng);
    for (double& x : lp) x = 0.25 * level(rng);
    const RankList rg = ranks_from_similarities(lg);
    const RankList rp = ranks_from_similarities(lp);
    const auto n32 = static_cast<std::uint32_t>(n);
    const double v1 = s1(rg, rp, true);
    const double v2 = s2(rg, rp, n32);
    const double v3 = s3(rg, rp, 0.99, true);

    auto tg = lg, tp = lp;
    for (double& x : tg) x = std::exp(0.3 * x) + 2.0 * x;
    for (double& x : tp) x = std::exp(0.3 * x) + 2.0 * x;
    const RankList rg2 = ranks_from_similarities(tg);
    const RankList rp2 = ranks_from_similarities(tp);
    check.require(rg2 == rg && rp2 == rp, "monotone transform changed ranks");
    check.require(s1(rg2, rp2, true) == v1, "s1 not bit-identical (transform)");
    check.require(s2(rg2, rp2, n32) == v2, "s2 not bit-identical (transform)");
    check.require(s3(rg2, rp2, 0.99, true) == v3, "s3 not bit-identical (transform)");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0u);
    std::shuffle(order.begin(), order.end(), rng);
    RankList pg(n), pp(n);
    for (std::size_t m = 0; m < n; ++m) {
      pg[m] = rg[order[m]];
      pp[m] = rp[order[m]];
    }
    check.require(s1(pg, pp, true) == v1, "s1 not bit-identical (permutation)");
    check.require(s2(pg, pp, n32) == v2, "s2 not bit-identical (permutation)");
    check.require(s3(pg, pp, 0.99, true) == v3, "s3 not bit-identical (permutation)");
  }
  return check;
}

// ---------------------------------------------------------------------------
// 5. Full selection reduces the selected-logit cosine to the plain cosine.

Check criterion_full_selection() {
  Check check;
  std::mt19937_64 rng(1005);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    Vector zg(1000), zp(1000);
    for (double& x : zg) x = dist(rng);
    for (double& x : zp) x = dist(rng);
    const auto sel = select_indexes(zg, SelectionStrategy::top_k(1000));
    check.require(std::abs(s_locos(zg, zp, sel) - cosine(zg, zp)) <= 1e-12,
                  "full selection drifted from cosine");
  }
  return check;
}

// ---------------------------------------------------------------------------
// 6. tmr_at_fmr equals a brute-force all-threshold oracle; ROC is monotone.

double oracle_tmr(const std::vector<double>& genuine,
                  const std::vector<double>& impostor, double target) {
  std::vector<double> all = genuine;
  all.insert(all.end(), impostor.begin(), impostor.end());
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  std::vector<double> candidates{-std::numeric_limits<double>::infinity(),
                                 std::numeric_limits<double>::infinity()};
  candidates.insert(candidates.end(), all.begin(), all.end());
  for (std::size_t i = 1; i < all.size(); ++i) {
    candidates.push_back(all[i - 1] + (all[i] - all[i - 1]) / 2.0);
  }
  double best = 0.0;
  for (double t : candidates) {
    std::size_t fa = 0, ta = 0;
    for (double s : impostor) fa += s >= t ? 1 : 0;
    for (double s : genuine) ta += s >= t ? 1 : 0;
    if (static_cast<double>(fa) / impostor.size() <= target) {
      best = std::max(best, static_cast<double>(ta) / genuine.size());
    }
  }
  return best;
}

Check criterion_eval_oracle() {
  Check check;
  std::mt19937_64 rng(1006);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t ng = 5 + rng() % 5000;
    const std::size_t ni = 5 + rng() % 5000;
    std::vector<double> genuine(ng), impostor(ni);
    if (trial % 2 == 0) {
      std::normal_distribution<double> gen_dist(0.6, 0.2), imp_dist(0.0, 0.2);
      for (double& x : genuine) x = gen_dist(rng);
      for (double& x : impostor) x = imp_dist(rng);
    } else {
      std::uniform_int_distribution<int> grid(-8, 8);
      for (double& x : genuine) x = 0.125 * grid(rng) + 0.25;
      for (double& x : impostor) x = 0.125 * grid(rng);
    }
    for (double target : {0.0, 1e-3, 0.01, 0.1, 1.0}) {
      const auto report = tmr_at_fmr(genuine, impostor, target);
      check.require(report.tmr_at_target == oracle_tmr(genuine, impostor, target),
                    "tmr differs from oracle at target " + std::to_string(target));
    }
    const RocCurve curve = roc(genuine, impostor);
    for (std::size_t i = 1; i < curve.points.size(); ++i) {
      check.require(curve.points[i].threshold < curve.points[i - 1].threshold,
                    "thresholds not descending");
      check.require(curve.points[i].fmr >= curve.points[i - 1].fmr,
                    "fmr not monotone");
      check.require(curve.points[i].tmr >= curve.points[i - 1].tmr,
                    "tmr not monotone");
    }
  }
  return check;
}

// ---------------------------------------------------------------------------
// 7. Noiseless synthetic identities: every tested method verifies perfectly.

Check criterion_noiseless_run() {
  Check check;
  const auto start = Clock::now();
  SynthConfig config;
  config.num_identities = 2000;
  config.dim = 128;
  config.num_eval_identities = 100;
  config.seed = 7;
  const SynthData data = generate(config);
  auto [protocol, features] = io::resolve_protocol(data.protocol, data.features, "");
  const WeightMatrix weights{Matrix(data.weights)};
  const Matrix logits = logits_for(features, weights);

  check.require(tmr_of(score_baseline(protocol, features)) == 1.0, "baseline below 1");
  for (const char* name : {"locos-t", "locos-tb", "locos-p", "locos-tb-s2"}) {
    const auto cfg = MethodConfig::parse(name, 500);
    check.require(tmr_of(score_locos(protocol, logits, cfg)) == 1.0,
                  std::string(name) + " below 1");
  }
  const double elapsed = std::chrono::duration<double>(Clock::now() - start).count();
  check.require(elapsed < 30.0, "noiseless run took " + std::to_string(elapsed) + "s");
  return check;
}

// ---------------------------------------------------------------------------
// 8. Noisy synthetic ordering: top-selected indexes never lose to positional
//    selection, and stay close to the baseline. Five frozen seeds with
//    sigma_p tuned so the baseline lands in the 0.7..0.95 band.

Check criterion_noisy_ordering() {
  Check check;
  double base_sum = 0.0, top_sum = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    SynthConfig config;
    config.num_identities = 2000;
    config.dim = 512;
    config.num_eval_identities = 200;
    config.sigma_gallery = 0.05;
    config.sigma_probe = 0.9;
    config.seed = seed;
    const SynthData data = generate(config);
    auto [protocol, features] = io::resolve_protocol(data.protocol, data.features, "");
    const WeightMatrix weights{Matrix(data.weights)};
    const Matrix logits = logits_for(features, weights);

    const double baseline = tmr_of(score_baseline(protocol, features));
    const double top =
        tmr_of(score_locos(protocol, logits, MethodConfig::parse("locos-t", 500)));
    const double random = tmr_of(
        score_locos(protocol, logits, MethodConfig::parse("locos-random", 500)));
    base_sum += baseline;
    top_sum += top;
    check.require(top >= random, "seed " + std::to_string(seed) +
                                     ": top selection lost to positional");
  }
  const double base_mean = base_sum / 5.0;
  check.require(base_mean >= 0.7 && base_mean <= 0.95,
                "baseline mean " + std::to_string(base_mean) + " outside 0.7..0.95");
  check.require(std::abs(base_sum - top_sum) / 5.0 <= 0.15,
                "top selection drifted more than 0.15 from baseline");
  return check;
}

// ---------------------------------------------------------------------------
// 9. CLI determinism: identical invocations produce byte-identical outputs,
//    independent of the internal thread count.

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

int run_cli(const std::string& args, const std::string& env = "") {
  const std::string command =
      env + (env.empty() ? "" : " ") + g_cli + " " + args + " >/dev/null 2>&1";
  return std::system(command.c_str());
}

Check criterion_cli_determinism() {
  Check check;
  fs::remove_all(g_work);
  fs::create_directories(g_work);
  const std::string work = g_work.string();
  const std::string synth_flags =
      "synth --ids 400 --dim 64 --eval 40 --cohort 80 --sigma-probe 0.4 --seed 11";

  check.require(run_cli(synth_flags + " --out " + work + "/a") == 0, "synth a failed");
  check.require(run_cli(synth_flags + " --out " + work + "/b") == 0, "synth b failed");
  for (const char* name : {"weights.lcv", "features.lcv", "protocol.csv"}) {
    check.require(slurp(g_work / "a" / name) == slurp(g_work / "b" / name),
                  std::string("synth output differs: ") + name);
  }

  const std::string score_flags = "score --protocol " + work +
                                  "/a/protocol.csv --features " + work +
                                  "/a/features.lcv --weights " + work +
                                  "/a/weights.lcv --method locos-tb --K 100 --out ";
  check.require(run_cli(score_flags + work + "/s1", "LOCOS_THREADS=1") == 0,
                "score (1 thread) failed");
  check.require(run_cli(score_flags + work + "/s3", "LOCOS_THREADS=3") == 0,
                "score (3 threads) failed");
  check.require(run_cli(score_flags + work + "/s3b", "LOCOS_THREADS=3") == 0,
                "score rerun failed");
  for (const char* name : {"scores.lcv", "genuine_mask.lcv"}) {
    check.require(slurp(g_work / "s1" / name) == slurp(g_work / "s3" / name),
                  std::string("threading changed ") + name);
    check.require(slurp(g_work / "s3" / name) == slurp(g_work / "s3b" / name),
                  std::string("rerun changed ") + name);
  }

  const std::string cohort_flags = "score --protocol " + work +
                                   "/a/protocol.csv --features " + work +
                                   "/a/features.lcv --method cohort-s3 --out ";
  check.require(run_cli(cohort_flags + work + "/c1", "LOCOS_THREADS=1") == 0,
                "cohort score failed");
  check.require(run_cli(cohort_flags + work + "/c4", "LOCOS_THREADS=4") == 0,
                "cohort score (4 threads) failed");
  check.require(slurp(g_work / "c1/scores.lcv") == slurp(g_work / "c4/scores.lcv"),
                "cohort scores depend on threading");

  const std::string eval_flags =
      "eval --scores " + work + "/s1/scores.lcv --mask " + work +
      "/s1/genuine_mask.lcv --fmr 0.01 --out ";
  check.require(run_cli(eval_flags + work + "/e1") == 0, "eval failed");
  check.require(run_cli(eval_flags + work + "/e2") == 0, "eval rerun failed");
  for (const char* name : {"report.json", "roc.tsv"}) {
    check.require(slurp(g_work / "e1" / name) == slurp(g_work / "e2" / name),
                  std::string("eval output differs: ") + name);
  }
  return check;
}

// ---------------------------------------------------------------------------
// 10. Throughput: template scoring at enrollment scale and cohort rank-list
//     scoring at protocol scale stay inside their budgets.

Check criterion_throughput() {
  Check check;

  {
    const std::size_t num_classes = 100000;
    const std::size_t gallery_count = 1000, probe_count = 1000;
    std::mt19937_64 rng(1010);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Matrix logits(gallery_count + probe_count, num_classes);
    for (double& x : logits.data) {
      x = dist(rng);
    }

    std::vector<GalleryTemplate> templates;
    templates.reserve(gallery_count);
    for (std::size_t i = 0; i < gallery_count; ++i) {
      templates.push_back(make_template(logits.row(i), SelectionStrategy::top_k(500),
                                        "g" + std::to_string(i)));
    }

    Matrix scores(gallery_count, probe_count);
    const auto start = Clock::now();
    for (std::size_t j = 0; j < probe_count; ++j) {
      const auto probe_row = logits.row(gallery_count + j);
      for (std::size_t i = 0; i < gallery_count; ++i) {
        scores.at(i, j) = score_template(templates[i], probe_row);
      }
    }
    const double elapsed = std::chrono::duration<double>(Clock::now() - start).count();
    std::printf("        template scoring: %zu pairs in %.2fs\n",
                gallery_count * probe_count, elapsed);
    check.require(elapsed < 10.0,
                  "template scoring took " + std::to_string(elapsed) + "s");
    check.require(std::isfinite(scores.at(0, 0)), "scores not produced");
  }

  {
    SynthConfig config;
    config.num_identities = 2000;
    config.dim = 128;
    config.num_eval_identities = 100;
    config.num_cohort = 500;
    config.sigma_probe = 0.3;
    config.seed = 17;
    const SynthData data = generate(config);
    auto [protocol, features] = io::resolve_protocol(data.protocol, data.features, "");
    const auto cfg = MethodConfig::parse("cohort-s3");
    const auto start = Clock::now();
    const ScoreMatrix out = score_cohort_ranklist(protocol, features, cfg);
    const double elapsed = std::chrono::duration<double>(Clock::now() - start).count();
    std::printf("        cohort scoring: %zu pairs (Nc=500) in %.2fs\n",
                out.scores.rows * out.scores.cols, elapsed);
    check.require(elapsed < 5.0,
                  "cohort scoring took " + std::to_string(elapsed) + "s");
  }
  return check;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: acceptance <path-to-locos-binary>\n");
    return 2;
  }
  g_cli = argv[1];
  g_work = fs::temp_directory_path() / "locos_acceptance";

  struct Criterion {
    const char* name;
    std::function<Check()> run;
  };
  const std::vector<Criterion> criteria = {
      {"rank-function identity (normalized s1/s3)", criterion_rank_identity},
      {"s2 cutoff saturation", criterion_s2_saturation},
      {"s3 self-maximality, exhaustive to length 6", criterion_s3_self_maximality},
      {"monotone-transform and cohort-permutation invariance", criterion_invariance_suites},
      {"full-selection reduction to cosine", criterion_full_selection},
      {"eval matches the all-threshold oracle", criterion_eval_oracle},
      {"noiseless synthetic run verifies perfectly", criterion_noiseless_run},
      {"noisy synthetic ordering (top vs positional)", criterion_noisy_ordering},
      {"CLI byte determinism under threading", criterion_cli_determinism},
      {"throughput budgets", criterion_throughput},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = Clock::now();
    const Check check = criteria[i].run();
    const double elapsed = std::chrono::duration<double>(Clock::now() - start).count();
    if (check.ok) {
      std::printf("[%2zu/10] PASS  %-55s (%.2fs)\n", i + 1, criteria[i].name, elapsed);
    } else {
      std::printf("[%2zu/10] FAIL  %-55s (%.2fs): %s\n", i + 1, criteria[i].name,
                  elapsed, check.detail.c_str());
      ++failures;
    }
  }
  if (failures == 0) {
    std::printf("RESULT: 10/10 criteria passed\n");
    return 0;
  }
  std::printf("RESULT: %d criteria FAILED\n", failures);
  return 1;
}
