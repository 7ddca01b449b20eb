// Copyright 2026 The diacal Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <map>
#include <optional>

#include "diacal/datagen.hpp"
#include "diacal/error.hpp"
#include "diacal/io.hpp"
#include "diacal/report.hpp"
#include "diacal/serialization.hpp"
#include "diacal/spaces.hpp"

namespace diacal::cli {
namespace {

namespace fs = std::filesystem;

struct Globals {
  std::string config;
  std::uint64_t seed = 0;
  double collar = kDefaultCollar;
  bool no_overlap = false;
  double threshold = kDefaultThreshold;
  int median_window = kDefaultMedianWindow;
  int upsample = kDefaultUpsampleFactor;
  double epsilon = kDefaultEpsilon;
  std::string out = ".";

  CLI::Option* threshold_opt = nullptr;
  CLI::Option* median_opt = nullptr;
  CLI::Option* upsample_opt = nullptr;

  DerOptions der() const { return {collar, !no_overlap}; }

  /// Post-processing overrides given explicitly on the command line.
  void override_post(PostProcessingConfig& post) const {
    if (threshold_opt->count() > 0) post.threshold = threshold;
    if (median_opt->count() > 0) post.median_window = median_window;
    if (upsample_opt->count() > 0) post.upsample_factor = upsample;
  }
};

std::string fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), format, v);
  return buf;
}

ExperimentConfig require_config(const Globals& g) {
  if (g.config.empty()) throw ConfigError("this command needs --config <path>");
  return load_experiment_config(g.config);
}

/// Score files grouped by recording, in order of first appearance; within a
/// recording, systems keep the order in which they were listed.
std::vector<RecordingScores> group_scores(const std::vector<std::string>& files) {
  std::vector<RecordingScores> out;
  std::map<std::string, std::size_t> index;
  for (const auto& f : files) {
    ScoreFile s = read_scores(f);
    const std::string rec = s.scores.recording_id;
    auto it = index.find(rec);
    if (it == index.end()) {
      it = index.emplace(rec, out.size()).first;
      out.push_back({rec, {}, {}});
    }
    RecordingScores& r = out[it->second];
    if (std::find(r.system_ids.begin(), r.system_ids.end(), s.system_id) != r.system_ids.end()) {
      throw ContractError("system '" + s.system_id + "' given twice for recording '" + rec + "'");
    }
    r.system_ids.push_back(s.system_id);
    r.systems.push_back(std::move(s.scores));
  }
  return out;
}

Annotation reference_for(const std::vector<Annotation>& refs, const std::string& rec) {
  for (const auto& a : refs) {
    if (a.recording_id == rec) return a;
  }
  std::cerr << "warning: no reference segments for '" << rec << "', treating it as silent\n";
  return Annotation{rec, {}};
}

std::vector<TrainingRecording> with_references(std::vector<RecordingScores> recs,
                                               const std::string& ref_path) {
  const auto refs = read_rttm(ref_path);
  std::vector<TrainingRecording> out;
  for (auto& r : recs) {
    Annotation ref = reference_for(refs, r.recording_id);
    out.push_back({std::move(r), std::move(ref)});
  }
  return out;
}

std::vector<TrainingRecording> select(const std::vector<TrainingRecording>& all,
                                      const std::vector<std::string>& ids) {
  std::vector<TrainingRecording> out;
  for (const auto& id : ids) {
    const auto it = std::find_if(all.begin(), all.end(),
                                 [&](const TrainingRecording& r) { return r.scores.recording_id == id; });
    if (it == all.end()) throw ConfigError("unknown recording '" + id + "'");
    out.push_back(*it);
  }
  return out;
}

void write_json(const fs::path& path, const std::string& text, std::ostream& err) {
  write_text_file(path, text);
  err << "wrote " << path.generic_string() << "\n";
}

fs::path out_path(const Globals& g, const std::string& explicit_path, const char* default_name) {
  return explicit_path.empty() ? fs::path(g.out) / default_name : fs::path(explicit_path);
}

// ---- fit-cal / apply-cal --------------------------------------------------

struct FitCalArgs {
  std::vector<std::string> scores;
  std::string ref;
  std::string strategy = "joint_power";
  std::string feature = "log";
  double l2_c = 1.0;
  int max_iter = 1000;
  std::string model;
};

void fit_cal(const Globals& g, const FitCalArgs& a, std::ostream& err) {
  const auto recs = with_references(group_scores(a.scores), a.ref);
  if (recs.empty()) throw ContractError("no score files given");
  for (const auto& r : recs) {
    if (r.scores.system_ids.size() != 1) {
      throw ContractError("fit-cal expects scores of a single system per recording");
    }
  }
  const CalibrationStrategy strategy = parse_calibration_strategy(a.strategy);
  PipelineConfig cfg;
  cfg.order = PipelineOrder::kCalibrateThenFuse;
  cfg.fusion_method = FusionMethod::kNone;
  cfg.calibration_space = calibration_space(strategy);
  cfg.calibration_strategy =
      strategy == CalibrationStrategy::kIndependentMult ? StrategyKind::kIndependent : StrategyKind::kJoint;
  cfg.fusion_space = cfg.calibration_space;
  cfg.feature = parse_calibration_feature(a.feature);
  cfg.l2_c = a.l2_c;
  cfg.max_iter = a.max_iter;
  cfg.epsilon = g.epsilon;
  cfg.systems = {recs.front().scores.system_ids.front()};
  const TrainedPipeline tp = fit_pipeline(cfg, recs);
  write_json(out_path(g, a.model, "calibration.json"), serialize(tp.calibration_models.front()), err);
}

struct ApplyCalArgs {
  std::vector<std::string> scores;
  std::string model;
};

void apply_cal(const Globals& g, const ApplyCalArgs& a, std::ostream& err) {
  const CalibrationModel model = parse_calibration_model(read_text_file(a.model));
  for (const auto& f : a.scores) {
    const ScoreFile s = read_scores(f);
    const FrameScoreMatrix cal =
        apply_calibration(model, to_space(to_probabilities(s.scores), model.space));
    const fs::path dst = fs::path(g.out) / fs::path(f).filename();
    write_scores(cal, s.system_id, dst);
    err << "wrote " << dst.generic_string() << "\n";
  }
}

// ---- fuse / fit-meta -----------------------------------------------------

struct FuseArgs {
  std::vector<std::string> scores;
  std::string method = "average_probs";
  std::string space = "multilabel";
  std::string meta;
  std::string system_id = "fused";
};

void fuse_cmd(const Globals& g, const FuseArgs& a, std::ostream& err) {
  const FusionMethod method = parse_fusion_method(a.method);
  const Space space = parse_space(a.space);
  std::optional<MetaLearnerModel> meta;
  if (method == FusionMethod::kMetaLearner) {
    if (a.meta.empty()) throw ConfigError("metalearner fusion needs --meta <model.json>");
    meta = parse_metalearner_model(read_text_file(a.meta));
  }
  TrainedPipeline tp;
  tp.config.order = PipelineOrder::kCalibrateThenFuse;
  tp.config.calibrate = false;
  tp.config.fusion_method = method;
  tp.config.fusion_space = space;
  tp.config.epsilon = g.epsilon;
  tp.metalearner = meta;
  for (const auto& rec : group_scores(a.scores)) {
    tp.system_ids = meta ? meta->system_ids : rec.system_ids;
    tp.num_speakers = rec.systems.front().num_speakers;
    tp.validate();
    FusionInput in;
    in.system_ids = tp.system_ids;
    std::vector<FrameScoreMatrix> probs;
    for (const auto& id : tp.system_ids) {
      const auto it = std::find(rec.system_ids.begin(), rec.system_ids.end(), id);
      if (it == rec.system_ids.end()) {
        throw ContractError("recording '" + rec.recording_id + "' lacks system '" + id + "'");
      }
      probs.push_back(to_probabilities(rec.systems[static_cast<std::size_t>(it - rec.system_ids.begin())]));
    }
    std::vector<FrameScoreMatrix> mult;
    for (const auto& p : probs) mult.push_back(to_space(p, Space::kMultilabel));
    const auto perms = align_systems(mult.front(), std::span(mult).subspan(1));
    for (std::size_t m = 1; m < probs.size(); ++m) probs[m] = permute_speakers(probs[m], perms[m - 1]);
    in.systems = std::move(probs);
    FrameScoreMatrix fused = fuse(in, method, space, meta ? &*meta : nullptr, g.epsilon);
    fused.recording_id = rec.recording_id;
    const fs::path dst = fs::path(g.out) / (rec.recording_id + ".scores");
    write_scores(fused, a.system_id, dst);
    err << "wrote " << dst.generic_string() << "\n";
  }
}

struct FitMetaArgs {
  std::vector<std::string> scores;
  std::string ref;
  std::string space = "multilabel";
  double l2_c = 1.0;
  int max_iter = 1000;
  std::string model;
};

void fit_meta(const Globals& g, const FitMetaArgs& a, std::ostream& err) {
  const auto recs = with_references(group_scores(a.scores), a.ref);
  if (recs.empty()) throw ContractError("no score files given");
  PipelineConfig cfg;
  cfg.order = PipelineOrder::kCalibrateThenFuse;
  cfg.calibrate = false;
  cfg.fusion_method = FusionMethod::kMetaLearner;
  cfg.fusion_space = parse_space(a.space);
  cfg.l2_c = a.l2_c;
  cfg.max_iter = a.max_iter;
  cfg.epsilon = g.epsilon;
  const TrainedPipeline tp = fit_pipeline(cfg, recs);
  write_json(out_path(g, a.model, "metalearner.json"), serialize(*tp.metalearner), err);
}

// ---- pipeline ------------------------------------------------------------

struct PipelineFitArgs {
  std::optional<int> index;
};

void pipeline_fit(const Globals& g, const PipelineFitArgs& a, std::ostream& err) {
  const ExperimentConfig cfg = require_config(g);
  if (cfg.configs.empty()) throw ConfigError("config file has no pipeline configs");
  const auto train = load_recordings(cfg, cfg.train.value_or(std::vector<std::string>{}));
  for (std::size_t i = 0; i < cfg.configs.size(); ++i) {
    if (a.index && static_cast<std::size_t>(*a.index) != i) continue;
    PipelineConfig pc = cfg.configs[i];
    g.override_post(pc.post);
    const TrainedPipeline tp = fit_pipeline(pc, train);
    write_json(fs::path(g.out) / ("pipeline_" + std::to_string(i) + ".json"), serialize(tp), err);
  }
  if (a.index && static_cast<std::size_t>(*a.index) >= cfg.configs.size()) {
    throw ConfigError("--index " + std::to_string(*a.index) + " is out of range");
  }
}

struct PipelineApplyArgs {
  std::string model;
  std::vector<std::string> recordings;
  bool write_probs = false;
};

void pipeline_apply(const Globals& g, const PipelineApplyArgs& a, std::ostream& err) {
  const ExperimentConfig cfg = require_config(g);
  TrainedPipeline tp = parse_trained_pipeline(read_text_file(a.model));
  g.override_post(tp.config.post);
  tp.config.validate();
  std::vector<std::string> ids = a.recordings;
  if (ids.empty()) ids = cfg.test.value_or(cfg.recording_ids());
  const auto recs = load_recordings(cfg, ids);
  std::vector<Annotation> hyps;
  for (const auto& r : recs) {
    PipelineOutput o = apply_pipeline(tp, r.scores);
    if (a.write_probs) {
      write_scores(o.probs, "pipeline", fs::path(g.out) / "probs" / (r.scores.recording_id + ".scores"));
    }
    hyps.push_back(std::move(o.hypothesis));
  }
  const fs::path dst = fs::path(g.out) / "hyp.rttm";
  write_rttm(hyps, dst);
  err << "wrote " << dst.generic_string() << "\n";
}

// ---- score ---------------------------------------------------------------

struct ScoreDerArgs {
  std::string ref;
  std::string hyp;
  std::vector<std::string> recordings;
};

void score_der(const Globals& g, const ScoreDerArgs& a, std::ostream& out) {
  auto refs = read_rttm(a.ref);
  auto hyps = read_rttm(a.hyp);
  if (!a.recordings.empty()) {
    // Restrict both sides to the listed ids, keeping reference order.
    auto listed = [&](const Annotation& x) {
      return std::find(a.recordings.begin(), a.recordings.end(), x.recording_id) != a.recordings.end();
    };
    for (const auto& id : a.recordings) {
      if (std::none_of(refs.begin(), refs.end(), [&](const Annotation& r) { return r.recording_id == id; })) {
        throw ContractError("recording '" + id + "' is not in the reference");
      }
    }
    std::erase_if(refs, [&](const Annotation& x) { return !listed(x); });
    std::erase_if(hyps, [&](const Annotation& x) { return !listed(x); });
  }
  DerReport total;
  std::vector<std::string> seen;
  for (const auto& r : refs) {
    const auto it = std::find_if(hyps.begin(), hyps.end(),
                                 [&](const Annotation& h) { return h.recording_id == r.recording_id; });
    total += der_totals(r, it == hyps.end() ? Annotation{r.recording_id, {}} : *it, g.der());
    seen.push_back(r.recording_id);
  }
  for (const auto& h : hyps) {
    if (std::find(seen.begin(), seen.end(), h.recording_id) == seen.end()) {
      std::cerr << "warning: hypothesis recording '" << h.recording_id << "' has no reference\n";
      total += der_totals(Annotation{h.recording_id, {}}, h, g.der());
    }
  }
  if (!(total.scored_speech_s > 0.0)) throw ContractError("no scored reference speech; DER is undefined");
  out << "scored_speech_s " << fmt("%.3f", total.scored_speech_s) << "\n"
      << "MS " << format_fixed3(total.miss_pct()) << "\n"
      << "FA " << format_fixed3(total.false_alarm_pct()) << "\n"
      << "SC " << format_fixed3(total.confusion_pct()) << "\n"
      << "DER " << format_fixed3(total.der_pct()) << "\n";
}

struct ScoreBceArgs {
  std::string ref;
  std::vector<std::string> scores;
};

void score_bce(const Globals& g, const ScoreBceArgs& a, std::ostream& out) {
  const auto refs = read_rttm(a.ref);
  BceTotals total;
  for (const auto& f : a.scores) {
    const ScoreFile s = read_scores(f);
    const FrameScoreMatrix probs = to_probabilities(s.scores);
    const Annotation ref = reference_for(refs, probs.recording_id);
    const BinaryActivityMatrix raw =
        frame_targets(ref, probs.frame_rate_hz, probs.frames(), ref.speakers());
    total += bce_totals(probs, aligned_targets(to_space(probs, Space::kMultilabel), raw, g.epsilon),
                        g.epsilon);
  }
  out << "BCE " << fmt("%.6f", total.mean()) << "\n";
}

// ---- synth / report ------------------------------------------------------

struct SynthArgs {
  int recordings = 100;
  int frames = 3000;
  int speakers = 2;
};

void synth(const Globals& g, const SynthArgs& a, std::ostream& err) {
  GeneratorConfig gen = GeneratorConfig::default_benchmark(g.seed);
  gen.num_recordings = a.recordings;
  gen.frames = a.frames;
  gen.num_speakers = a.speakers;
  const SyntheticEnsemble ens = generate(gen);

  const fs::path root(g.out);
  ExperimentConfig cfg;
  for (const auto& id : ens.system_ids) cfg.systems.push_back({id, {}});
  std::vector<Annotation> refs;
  std::vector<std::string> ids;
  for (const auto& rec : ens.recordings) {
    for (std::size_t m = 0; m < ens.system_ids.size(); ++m) {
      const fs::path p = root / "scores" / ens.system_ids[m] / (rec.recording_id + ".scores");
      write_scores(rec.system_logits[m], ens.system_ids[m], p);
      cfg.systems[m].recordings.emplace_back(rec.recording_id, p);
    }
    refs.push_back(rec.reference);
    ids.push_back(rec.recording_id);
  }
  cfg.reference = root / "ref.rttm";
  write_rttm(refs, cfg.reference);
  const auto half = static_cast<std::ptrdiff_t>(ids.size() / 2);
  cfg.train = std::vector<std::string>(ids.begin(), ids.begin() + half);
  cfg.test = std::vector<std::string>(ids.begin() + half, ids.end());
  cfg.configs = benchmark_grid(ens.system_ids);
  write_text_file(root / "config.json", serialize(cfg, root));
  err << "wrote " << ens.recordings.size() << " recordings x " << ens.system_ids.size()
      << " systems to " << root.generic_string() << "\n";
}

void report(const Globals& g, std::ostream& out, std::ostream& err) {
  const ExperimentConfig cfg = require_config(g);
  if (cfg.configs.empty()) throw ConfigError("config file has no pipeline configs");
  const auto all = load_recordings(cfg);
  const auto train = cfg.train ? select(all, *cfg.train) : all;
  const auto test = cfg.test ? select(all, *cfg.test) : all;
  std::vector<PipelineConfig> grid = cfg.configs;
  for (auto& c : grid) g.override_post(c.post);
  const ExperimentResult result = run_experiment(grid, train, test, g.der());
  const auto rows = sorted_rows(result.rows);
  const std::string text = format_report_text(rows);
  write_text_file(fs::path(g.out) / "report.txt", text);
  write_text_file(fs::path(g.out) / "report.csv", format_report_csv(rows));
  err << "wrote report.txt and report.csv to " << fs::path(g.out).generic_string() << "\n";
  out << text;
}

}  // namespace

std::vector<PipelineConfig> benchmark_grid(const std::vector<std::string>& system_ids) {
  std::vector<PipelineConfig> grid;
  PipelineConfig primary;
  primary.name = "F->C mult-dynamic_logits power-cal";
  primary.order = PipelineOrder::kFuseThenCalibrate;
  primary.fusion_space = Space::kMultilabel;
  primary.fusion_method = FusionMethod::kDynamicLogits;
  primary.calibration_space = Space::kPowerset;
  grid.push_back(primary);

  if (!system_ids.empty()) {
    PipelineConfig single;
    single.order = PipelineOrder::kCalibrateThenFuse;
    single.fusion_method = FusionMethod::kNone;
    single.systems = {system_ids.front()};
    single.calibrate = false;
    single.name = "single " + system_ids.front() + " raw";
    grid.push_back(single);
    single.calibrate = true;
    single.name = "single " + system_ids.front() + " calibrated";
    grid.push_back(single);
  }
  for (const FusionMethod m : {FusionMethod::kAverageProbs, FusionMethod::kAverageLogits,
                               FusionMethod::kDynamicLogits, FusionMethod::kEntropy,
                               FusionMethod::kMetaLearner}) {
    for (const PipelineOrder o : {PipelineOrder::kCalibrateThenFuse, PipelineOrder::kFuseThenCalibrate}) {
      PipelineConfig c;
      c.order = o;
      c.fusion_method = m;
      c.fusion_space = Space::kMultilabel;
      c.calibration_space = Space::kPowerset;
      c.name = c.describe();
      grid.push_back(c);
    }
  }
  return grid;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Calibration and fusion of frame-level diarization outputs"};
  app.name("diacal");
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--config", g.config, "Experiment config (JSON)");
  app.add_option("--seed", g.seed, "Random seed");
  app.add_option("--collar", g.collar, "DER collar in seconds")->capture_default_str()->check(CLI::NonNegativeNumber);
  app.add_flag("--no-overlap-scoring", g.no_overlap, "Exclude overlapped speech from DER");
  g.threshold_opt = app.add_option("--threshold", g.threshold, "Decision threshold")->capture_default_str();
  g.median_opt = app.add_option("--median-window", g.median_window, "Median filter window (frames)")->capture_default_str();
  g.upsample_opt = app.add_option("--upsample", g.upsample, "Upsampling factor")->capture_default_str();
  app.add_option("--epsilon", g.epsilon, "Probability clamp")->capture_default_str();
  app.add_option("--out", g.out, "Output directory")->capture_default_str();

  FitCalArgs fc;
  auto* fit_cal_cmd = app.add_subcommand("fit-cal", "Fit a calibration model for one system");
  fit_cal_cmd->add_option("--scores", fc.scores, "Score files")->required();
  fit_cal_cmd->add_option("--ref", fc.ref, "Reference RTTM")->required();
  fit_cal_cmd->add_option("--strategy", fc.strategy, "independent_mult|joint_mult|joint_power")->capture_default_str();
  fit_cal_cmd->add_option("--feature", fc.feature, "log|logit")->capture_default_str();
  fit_cal_cmd->add_option("--l2-c", fc.l2_c, "Inverse L2 strength")->capture_default_str();
  fit_cal_cmd->add_option("--max-iter", fc.max_iter, "L-BFGS iterations")->capture_default_str();
  fit_cal_cmd->add_option("--model", fc.model, "Output model path (default <out>/calibration.json)");

  ApplyCalArgs ac;
  auto* apply_cal_cmd = app.add_subcommand("apply-cal", "Apply a calibration model to score files");
  apply_cal_cmd->add_option("--model", ac.model, "Calibration model")->required();
  apply_cal_cmd->add_option("--scores", ac.scores, "Score files")->required();

  FuseArgs fu;
  auto* fuse_sub = app.add_subcommand("fuse", "Fuse score files of several systems");
  fuse_sub->add_option("--scores", fu.scores, "Score files")->required();
  fuse_sub->add_option("--method", fu.method, "Fusion method")->capture_default_str();
  fuse_sub->add_option("--space", fu.space, "multilabel|powerset")->capture_default_str();
  fuse_sub->add_option("--meta", fu.meta, "MetaLearner model");
  fuse_sub->add_option("--system-id", fu.system_id, "System id of the output")->capture_default_str();

  FitMetaArgs fm;
  auto* fit_meta_cmd = app.add_subcommand("fit-meta", "Fit a MetaLearner");
  fit_meta_cmd->add_option("--scores", fm.scores, "Score files")->required();
  fit_meta_cmd->add_option("--ref", fm.ref, "Reference RTTM")->required();
  fit_meta_cmd->add_option("--space", fm.space, "multilabel|powerset")->capture_default_str();
  fit_meta_cmd->add_option("--l2-c", fm.l2_c, "Inverse L2 strength")->capture_default_str();
  fit_meta_cmd->add_option("--max-iter", fm.max_iter, "L-BFGS iterations")->capture_default_str();
  fit_meta_cmd->add_option("--model", fm.model, "Output model path (default <out>/metalearner.json)");

  auto* pipeline_cmd = app.add_subcommand("pipeline", "Fit or apply configured pipelines");
  pipeline_cmd->require_subcommand(1);
  PipelineFitArgs pf;
  auto* pipeline_fit_cmd = pipeline_cmd->add_subcommand("fit", "Fit the configs of --config");
  pipeline_fit_cmd->add_option("--index", pf.index, "Fit only this config");
  PipelineApplyArgs pa;
  auto* pipeline_apply_cmd = pipeline_cmd->add_subcommand("apply", "Apply a trained pipeline");
  pipeline_apply_cmd->add_option("--model", pa.model, "Trained pipeline")->required();
  pipeline_apply_cmd->add_option("--recordings", pa.recordings, "Recording ids (default: test set)");
  pipeline_apply_cmd->add_flag("--write-probs", pa.write_probs, "Also write fused probabilities");

  auto* score_cmd = app.add_subcommand("score", "Evaluate hypotheses");
  score_cmd->require_subcommand(1);
  ScoreDerArgs sd;
  auto* score_der_cmd = score_cmd->add_subcommand("der", "Diarization error rate");
  score_der_cmd->add_option("--ref", sd.ref, "Reference RTTM")->required();
  score_der_cmd->add_option("--hyp", sd.hyp, "Hypothesis RTTM")->required();
  score_der_cmd->add_option("--recordings", sd.recordings,
                            "Score only these recording ids (default: every reference recording)");
  ScoreBceArgs sb;
  auto* score_bce_cmd = score_cmd->add_subcommand("bce", "Binary cross-entropy of score files");
  score_bce_cmd->add_option("--ref", sb.ref, "Reference RTTM")->required();
  score_bce_cmd->add_option("--scores", sb.scores, "Score files")->required();

  SynthArgs sy;
  auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic benchmark");
  synth_cmd->add_option("--recordings", sy.recordings, "Number of recordings")->capture_default_str();
  synth_cmd->add_option("--frames", sy.frames, "Frames per recording")->capture_default_str();
  synth_cmd->add_option("--speakers", sy.speakers, "Speakers per recording")->capture_default_str();

  auto* report_cmd = app.add_subcommand("report", "Fit and score every config of --config");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (fit_cal_cmd->parsed()) fit_cal(g, fc, err);
    else if (apply_cal_cmd->parsed()) apply_cal(g, ac, err);
    else if (fuse_sub->parsed()) fuse_cmd(g, fu, err);
    else if (fit_meta_cmd->parsed()) fit_meta(g, fm, err);
    else if (pipeline_fit_cmd->parsed()) pipeline_fit(g, pf, err);
    else if (pipeline_apply_cmd->parsed()) pipeline_apply(g, pa, err);
    else if (score_der_cmd->parsed()) score_der(g, sd, out);
    else if (score_bce_cmd->parsed()) score_bce(g, sb, out);
    else if (synth_cmd->parsed()) synth(g, sy, err);
    else if (report_cmd->parsed()) report(g, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitOk;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  for (const auto& a : args) argv.push_back(a.c_str());
  argv.push_back(nullptr);
  return run(static_cast<int>(args.size()), argv.data(), out, err);
}

}  // namespace diacal::cli
