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

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "locos/error.hpp"
#include "locos/eval.hpp"
#include "locos/io.hpp"
#include "locos/linalg.hpp"
#include "locos/pipeline.hpp"
#include "locos/synth.hpp"
#include "locos/version.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

std::string hex64(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "0x%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::tm tm_utc{};
  gmtime_r(&t, &tm_utc);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

unsigned thread_override() {
  const char* env = std::getenv("LOCOS_THREADS");
  if (env == nullptr || *env == '\0') {
    return 0;
  }
  const long v = std::strtol(env, nullptr, 10);
  if (v < 1) {
    locos::throw_parameter("LOCOS_THREADS must be a positive integer");
  }
  return static_cast<unsigned>(v);
}

// Every command owns one output directory with exactly one manifest that
// records parameters, input digests, and produced files.
struct RunContext {
  fs::path out_dir;
  json parameters = json::object();
  json inputs = json::object();
  std::vector<std::string> outputs;

  explicit RunContext(const fs::path& dir) : out_dir(dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
      locos::throw_io("cannot create output directory '" + dir.string() +
                      "': " + ec.message());
    }
  }

  void add_input(const fs::path& path) {
    inputs[path.string()] = {{"fnv1a64", hex64(locos::io::fnv1a64_file(path))}};
  }

  void write_manifest(const std::string& command) {
    json manifest;
    manifest["tool"] = "locos";
    manifest["version"] = locos::kVersion;
    manifest["command"] = command;
    manifest["created_utc"] = utc_now();
    manifest["parameters"] = parameters;
    manifest["inputs"] = inputs;
    manifest["outputs"] = outputs;
    std::ofstream out(out_dir / "manifest.json");
    if (!out) {
      locos::throw_io("cannot write manifest in '" + out_dir.string() + "'");
    }
    out << manifest.dump(2) << '\n';
  }
};

struct SynthArgs {
  locos::SynthConfig config;
  std::string out;
};

struct VectorInputs {
  std::string protocol;
  std::string features;
  std::string logits;
  std::string weights;
};

struct ScoreArgs {
  VectorInputs in;
  std::string method;
  std::uint32_t k = 500;
  std::optional<std::uint32_t> top, bottom;
  std::optional<std::uint32_t> k_cutoff;
  double lambda = 0.99;
  bool normalize = true;
  std::string out;
};

struct EnrollArgs {
  VectorInputs in;
  std::string strategy = "top";
  std::uint32_t k = 500;
  std::optional<std::uint32_t> top, bottom;
  std::string out;
};

struct EvalArgs {
  std::string scores;
  std::string mask;
  double target_fmr = 1e-3;
  std::string out;
};

struct LogitsArgs {
  std::string features;
  std::string weights;
  std::string out;
};

// Load the vector matrix a method needs: features for the feature flows,
// logits (given directly or computed from features x weights) for LoCoS.
locos::Matrix load_vectors(const VectorInputs& in, bool needs_logits,
                           RunContext& ctx) {
  if (!needs_logits) {
    if (in.features.empty()) {
      locos::throw_parameter("this method requires --features");
    }
    ctx.add_input(in.features);
    return locos::io::read_matrix(in.features);
  }
  if (!in.logits.empty()) {
    if (!in.features.empty() || !in.weights.empty()) {
      locos::throw_parameter("give either --logits or --features with --weights");
    }
    ctx.add_input(in.logits);
    return locos::io::read_matrix(in.logits);
  }
  if (in.features.empty() || in.weights.empty()) {
    locos::throw_parameter(
        "logit-based methods require --logits, or --features plus --weights");
  }
  ctx.add_input(in.features);
  ctx.add_input(in.weights);
  const locos::Matrix features = locos::io::read_matrix(in.features);
  const locos::WeightMatrix weights(locos::io::read_matrix(in.weights));
  locos::Matrix logits(features.rows, weights.num_classes());
  for (std::size_t r = 0; r < features.rows; ++r) {
    const locos::Vector z = locos::compute_logits(features.row(r), weights);
    std::copy(z.begin(), z.end(), logits.row(r).begin());
  }
  return logits;
}

std::pair<locos::VerificationProtocol, locos::Matrix> load_protocol_and_vectors(
    const VectorInputs& in, bool needs_logits, RunContext& ctx) {
  if (in.protocol.empty()) {
    locos::throw_parameter("--protocol is required");
  }
  ctx.add_input(in.protocol);
  auto records = locos::io::read_protocol_records(in.protocol);
  locos::Matrix vectors = load_vectors(in, needs_logits, ctx);
  return locos::io::resolve_protocol(records, std::move(vectors),
                                     fs::path(in.protocol).parent_path());
}

int run_synth(const SynthArgs& args) {
  RunContext ctx(args.out);
  const locos::SynthData data = locos::generate(args.config);

  locos::io::write_matrix(data.weights, ctx.out_dir / "weights.lcv");
  locos::io::write_matrix(data.features, ctx.out_dir / "features.lcv");
  locos::io::write_protocol_records(data.protocol, ctx.out_dir / "protocol.csv");
  ctx.outputs = {"weights.lcv", "features.lcv", "protocol.csv"};

  ctx.parameters = {{"ids", args.config.num_identities},
                    {"dim", args.config.dim},
                    {"eval", args.config.num_eval_identities},
                    {"cohort", args.config.num_cohort},
                    {"sigma_gallery", args.config.sigma_gallery},
                    {"sigma_probe", args.config.sigma_probe},
                    {"seed", args.config.seed},
                    {"disjoint", args.config.disjoint_identities}};
  ctx.write_manifest("synth");
  std::cout << "synth: wrote " << data.features.rows << " sample vectors ("
            << args.config.num_identities << " identities) to " << args.out << "\n";
  return 0;
}

locos::SelectionStrategy parse_strategy(const std::string& name, std::uint32_t k,
                                        std::optional<std::uint32_t> top,
                                        std::optional<std::uint32_t> bottom) {
  if (name == "first") {
    return locos::SelectionStrategy::first_k(k);
  }
  if (name == "top") {
    return locos::SelectionStrategy::top_k(k);
  }
  if (name == "topbottom") {
    return locos::SelectionStrategy::top_bottom(top.value_or(k / 2),
                                                bottom.value_or(k - k / 2));
  }
  if (name == "probe") {
    return locos::SelectionStrategy::probe_top_k(k);
  }
  locos::throw_parameter("unknown strategy '" + name +
                         "' (expected first|top|topbottom|probe)");
}

int run_enroll(const EnrollArgs& args) {
  RunContext ctx(args.out);
  auto [protocol, vectors] = load_protocol_and_vectors(args.in, true, ctx);
  const locos::SelectionStrategy strategy =
      parse_strategy(args.strategy, args.k, args.top, args.bottom);

  const fs::path tpl_dir = ctx.out_dir / "templates";
  std::error_code ec;
  fs::create_directories(tpl_dir, ec);
  if (ec) {
    locos::throw_io("cannot create '" + tpl_dir.string() + "'");
  }
  for (const locos::SampleRef& g : protocol.gallery) {
    if (g.id.find('/') != std::string::npos || g.id.find('\\') != std::string::npos) {
      locos::throw_protocol("sample_id '" + g.id + "' cannot name a template file");
    }
    const locos::GalleryTemplate tpl =
        locos::make_template(vectors.row(g.row), strategy, g.id);
    const std::string name = "templates/" + g.id + ".lct";
    locos::io::write_template(tpl, ctx.out_dir / name);
    ctx.outputs.push_back(name);
  }

  ctx.parameters = {{"strategy", args.strategy},
                    {"K", strategy.k},
                    {"T", strategy.top},
                    {"B", strategy.bottom}};
  ctx.write_manifest("enroll");
  std::cout << "enroll: wrote " << protocol.gallery.size() << " templates to "
            << (ctx.out_dir / "templates").string() << "\n";
  return 0;
}

int run_score(const ScoreArgs& args) {
  RunContext ctx(args.out);

  locos::RankSimParams rank_params;
  rank_params.lambda = args.lambda;
  rank_params.normalize = args.normalize;
  rank_params.k_cutoff = args.k_cutoff;
  const locos::MethodConfig config =
      locos::MethodConfig::parse(args.method, args.k, args.top, args.bottom,
                                 rank_params);
  if (config.flow == locos::Flow::CohortRankList ||
      config.flow == locos::Flow::LoCoSRankList) {
    // Surface bad rank parameters before any heavy lifting.
    if (!(rank_params.lambda > 0.0) || !(rank_params.lambda < 1.0)) {
      locos::throw_parameter("lambda must lie strictly inside (0,1), got " +
                             std::to_string(rank_params.lambda));
    }
  }

  auto [protocol, vectors] =
      load_protocol_and_vectors(args.in, config.needs_logits(), ctx);

  locos::ScoringOptions opts;
  opts.num_threads = thread_override();
  const locos::ScoreMatrix result = locos::score(protocol, vectors, config, opts);

  locos::io::write_matrix(result.scores, ctx.out_dir / "scores.lcv");
  locos::io::write_matrix(locos::io::mask_to_matrix(result),
                          ctx.out_dir / "genuine_mask.lcv");
  ctx.outputs = {"scores.lcv", "genuine_mask.lcv"};

  ctx.parameters = {{"method", args.method},
                    {"K", args.k},
                    {"T", args.top ? json(*args.top) : json(nullptr)},
                    {"B", args.bottom ? json(*args.bottom) : json(nullptr)},
                    {"lambda", args.lambda},
                    {"k_cutoff", args.k_cutoff ? json(*args.k_cutoff) : json(nullptr)},
                    {"normalize", args.normalize},
                    {"threads", opts.num_threads}};
  ctx.write_manifest("score");
  std::cout << "score: " << result.scores.rows << "x" << result.scores.cols
            << " matrix (" << args.method << ") written to " << args.out << "\n";
  return 0;
}

int run_logits(const LogitsArgs& args) {
  RunContext ctx(args.out);
  ctx.add_input(args.features);
  ctx.add_input(args.weights);
  const locos::Matrix features = locos::io::read_matrix(args.features);
  const locos::WeightMatrix weights(locos::io::read_matrix(args.weights));
  locos::Matrix logits(features.rows, weights.num_classes());
  for (std::size_t r = 0; r < features.rows; ++r) {
    const locos::Vector z = locos::compute_logits(features.row(r), weights);
    std::copy(z.begin(), z.end(), logits.row(r).begin());
  }
  locos::io::write_matrix(logits, ctx.out_dir / "logits.lcv");
  ctx.outputs = {"logits.lcv"};
  ctx.write_manifest("logits");
  std::cout << "logits: " << logits.rows << "x" << logits.cols << " matrix written to "
            << args.out << "\n";
  return 0;
}

int run_eval(const EvalArgs& args) {
  RunContext ctx(args.out);
  ctx.add_input(args.scores);
  ctx.add_input(args.mask);

  locos::ScoreMatrix matrix;
  matrix.scores = locos::io::read_matrix(args.scores);
  const locos::Matrix mask = locos::io::read_matrix(args.mask);
  if (mask.rows != matrix.scores.rows || mask.cols != matrix.scores.cols) {
    locos::throw_data("score matrix and genuine mask shapes disagree");
  }
  matrix.genuine = locos::io::mask_from_matrix(mask);

  const auto [genuine, impostor] = locos::partition_scores(matrix);
  const locos::VerificationReport report =
      locos::tmr_at_fmr(genuine, impostor, args.target_fmr);

  locos::io::write_roc_table(report.curve, ctx.out_dir / "roc.tsv");

  json out;
  out["target_fmr"] = report.target_fmr;
  char tbuf[48];
  std::snprintf(tbuf, sizeof(tbuf), "%.17g", report.threshold);
  out["threshold"] = tbuf;
  out["tmr"] = report.tmr_at_target;
  out["fmr_at_threshold"] = report.fmr_at_threshold;
  out["num_genuine"] = report.num_genuine;
  out["num_impostor"] = report.num_impostor;
  out["resolution_limited"] = report.resolution_limited;
  {
    std::ofstream rf(ctx.out_dir / "report.json");
    if (!rf) {
      locos::throw_io("cannot write report in '" + ctx.out_dir.string() + "'");
    }
    rf << out.dump(2) << '\n';
  }
  ctx.outputs = {"roc.tsv", "report.json"};

  ctx.parameters = {{"fmr", args.target_fmr}};
  ctx.write_manifest("eval");
  std::printf("eval: TMR %.6f at FMR <= %g (threshold %.6g, %zu genuine / %zu impostor)%s\n",
              report.tmr_at_target, report.target_fmr, report.threshold,
              report.num_genuine, report.num_impostor,
              report.resolution_limited
                  ? " [resolution limited: too few impostor pairs for this FMR]"
                  : "");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"verification scoring toolkit: rank-list and logit-cohort matching"};
  app.set_version_flag("--version", locos::kVersion);
  app.require_subcommand(1);

  SynthArgs synth_args;
  auto* synth = app.add_subcommand(
      "synth", "generate a synthetic identity set (weights, samples, protocol)");
  synth->add_option("--ids", synth_args.config.num_identities,
                    "number of identities (weight matrix rows)")
      ->capture_default_str();
  synth->add_option("--dim", synth_args.config.dim, "embedding dimension")
      ->capture_default_str();
  synth->add_option("--eval", synth_args.config.num_eval_identities,
                    "number of evaluated identities")
      ->capture_default_str();
  synth->add_option("--cohort", synth_args.config.num_cohort,
                    "cohort identities captured in both conditions")
      ->capture_default_str();
  synth->add_option("--sigma-gallery", synth_args.config.sigma_gallery,
                    "angular noise of gallery samples (radians)")
      ->capture_default_str();
  synth->add_option("--sigma-probe", synth_args.config.sigma_probe,
                    "angular noise of probe samples (radians)")
      ->capture_default_str();
  synth->add_option("--seed", synth_args.config.seed, "random seed")
      ->capture_default_str();
  synth->add_flag("--disjoint", synth_args.config.disjoint_identities,
                  "evaluation identities outside the weight matrix's identity set");
  synth->add_option("--out", synth_args.out, "output directory")->required();

  EnrollArgs enroll_args;
  auto* enroll =
      app.add_subcommand("enroll", "build gallery templates from logit vectors");
  enroll->add_option("--protocol", enroll_args.in.protocol, "protocol file")
      ->required();
  enroll->add_option("--logits", enroll_args.in.logits, "logit matrix");
  enroll->add_option("--features", enroll_args.in.features, "feature matrix");
  enroll->add_option("--weights", enroll_args.in.weights, "class-mean matrix");
  enroll->add_option("--strategy", enroll_args.strategy,
                     "index selection: first|top|topbottom|probe")
      ->capture_default_str();
  enroll->add_option("--K", enroll_args.k, "selection size")->capture_default_str();
  enroll->add_option("--T", enroll_args.top, "top segment size (topbottom)");
  enroll->add_option("--B", enroll_args.bottom, "bottom segment size (topbottom)");
  enroll->add_option("--out", enroll_args.out, "output directory")->required();

  ScoreArgs score_args;
  auto* score = app.add_subcommand("score", "score a verification protocol");
  score->add_option("--protocol", score_args.in.protocol, "protocol file")
      ->required();
  score->add_option("--features", score_args.in.features, "feature matrix");
  score->add_option("--logits", score_args.in.logits, "logit matrix");
  score->add_option("--weights", score_args.in.weights, "class-mean matrix");
  score
      ->add_option("--method", score_args.method,
                   "baseline | cohort-s1|s2|s3 | locos-random|t|tb|p | "
                   "locos-t-s1|s2|s3 | locos-tb-s1|s2|s3")
      ->required();
  score->add_option("--K", score_args.k, "selection size")->capture_default_str();
  score->add_option("--T", score_args.top, "top segment size (tb methods)");
  score->add_option("--B", score_args.bottom, "bottom segment size (tb methods)");
  score->add_option("--lambda", score_args.lambda, "rank decay for s3")
      ->capture_default_str();
  score->add_option("--k-cutoff", score_args.k_cutoff,
                    "rank cutoff for s2 (default: list length)");
  score->add_flag("--normalize,!--no-normalize", score_args.normalize,
                  "divide s1/s3 by their identical-rank-list maximum")
      ->capture_default_str();
  score->add_option("--out", score_args.out, "output directory")->required();

  LogitsArgs logits_args;
  auto* logits_cmd = app.add_subcommand(
      "logits", "project a feature matrix through the class means");
  logits_cmd->add_option("--features", logits_args.features, "feature matrix")
      ->required();
  logits_cmd->add_option("--weights", logits_args.weights, "class-mean matrix")
      ->required();
  logits_cmd->add_option("--out", logits_args.out, "output directory")->required();

  EvalArgs eval_args;
  auto* eval =
      app.add_subcommand("eval", "ROC curve and TMR at a target FMR from scores");
  eval->add_option("--scores", eval_args.scores, "score matrix")->required();
  eval->add_option("--mask", eval_args.mask, "genuine mask matrix")->required();
  eval->add_option("--fmr", eval_args.target_fmr, "target false match rate")
      ->capture_default_str();
  eval->add_option("--out", eval_args.out, "output directory")->required();

  try {
    app.parse(argc, argv);
    if (synth->parsed()) {
      return run_synth(synth_args);
    }
    if (enroll->parsed()) {
      return run_enroll(enroll_args);
    }
    if (score->parsed()) {
      return run_score(score_args);
    }
    if (logits_cmd->parsed()) {
      return run_logits(logits_args);
    }
    if (eval->parsed()) {
      return run_eval(eval_args);
    }
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {  // --help / --version
      return app.exit(e);
    }
    std::cerr << "locos: usage: " << e.what() << "\n";
    return 2;
  } catch (const locos::Error& e) {
    std::cerr << "locos: " << locos::error_class_name(e.cls()) << ": " << e.what()
              << "\n";
    return e.cls() == locos::ErrorClass::Usage ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "locos: internal: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
