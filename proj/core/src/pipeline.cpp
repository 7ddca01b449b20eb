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

#include "diacal/pipeline.hpp"

#include <iostream>
#include <set>

#include "diacal/error.hpp"
#include "diacal/io.hpp"
#include "diacal/spaces.hpp"

namespace diacal {
namespace {

std::vector<std::string> default_labels(int speakers) {
  std::vector<std::string> labels;
  for (int s = 0; s < speakers; ++s) labels.push_back("spk" + std::to_string(s));
  return labels;
}

/// The systems named by the config, in config order, as probabilities with
/// every non-anchor system aligned to the anchor.
struct AlignedRecording {
  std::string recording_id;
  std::vector<FrameScoreMatrix> systems;
  std::vector<Permutation> permutations;
};

std::vector<std::string> selected_ids(const PipelineConfig& config,
                                      const std::vector<std::string>& available) {
  return config.systems.empty() ? available : config.systems;
}

AlignedRecording align_recording(const RecordingScores& rec, const std::vector<std::string>& ids) {
  if (rec.system_ids.size() != rec.systems.size()) {
    throw ContractError("recording '" + rec.recording_id + "' has mismatched system ids");
  }
  AlignedRecording out;
  out.recording_id = rec.recording_id;
  for (const auto& id : ids) {
    const auto it = std::find(rec.system_ids.begin(), rec.system_ids.end(), id);
    if (it == rec.system_ids.end()) {
      throw ContractError("recording '" + rec.recording_id + "' lacks system '" + id + "'");
    }
    out.systems.push_back(to_probabilities(rec.systems[static_cast<std::size_t>(it - rec.system_ids.begin())]));
  }
  FusionInput check{out.systems, ids};
  check.validate();

  std::vector<FrameScoreMatrix> mult;
  for (const auto& s : out.systems) mult.push_back(to_space(s, Space::kMultilabel));
  out.permutations = align_systems(mult.front(), std::span(mult).subspan(1));
  for (std::size_t m = 1; m < out.systems.size(); ++m) {
    out.systems[m] = permute_speakers(out.systems[m], out.permutations[m - 1]);
  }
  return out;
}

Matrix reference_targets(const FrameScoreMatrix& anchor, const Annotation& reference, double eps) {
  const BinaryActivityMatrix raw =
      frame_targets(reference, anchor.frame_rate_hz, anchor.frames(), reference.speakers());
  const BinaryActivityMatrix aligned = aligned_targets(to_space(anchor, Space::kMultilabel), raw, eps);
  return aligned.values.cast<double>();
}

std::vector<LabeledScores> labeled(const std::vector<FrameScoreMatrix>& scores,
                                   const std::vector<Matrix>& targets) {
  std::vector<LabeledScores> out;
  out.reserve(scores.size());
  for (std::size_t r = 0; r < scores.size(); ++r) out.push_back({scores[r], targets[r]});
  return out;
}

CalibrationModel fit_one(const PipelineConfig& config, const std::vector<FrameScoreMatrix>& scores,
                         const std::vector<Matrix>& targets) {
  const auto data = labeled(scores, targets);
  const CalibrationTrainingSet set =
      build_training_set(data, config.calibration_space, config.feature, config.epsilon);
  return fit_calibration(set, config.strategy(), {config.l2_c, config.max_iter});
}

MetaLearnerModel fit_meta(const PipelineConfig& config, const std::vector<std::string>& ids,
                          const std::vector<AlignedRecording>& recs,
                          const std::vector<Matrix>& targets) {
  MetaLearnerTrainingSet set;
  set.space = config.fusion_space;
  set.num_speakers = recs.front().systems.front().num_speakers;
  set.system_ids = ids;
  set.epsilon = config.epsilon;
  Eigen::Index total = 0;
  for (const auto& t : targets) total += t.rows();
  const int d = space_dimension(set.space, set.num_speakers);
  set.logits.assign(ids.size(), Matrix(total, d));
  set.multilabel_targets.resize(total, set.num_speakers);
  Eigen::Index row = 0;
  for (std::size_t r = 0; r < recs.size(); ++r) {
    const Eigen::Index n = targets[r].rows();
    for (std::size_t m = 0; m < ids.size(); ++m) {
      const FrameScoreMatrix z = to_logits(to_space(recs[r].systems[m], set.space), config.epsilon);
      set.logits[m].middleRows(row, n) = z.values;
    }
    set.multilabel_targets.middleRows(row, n) = targets[r];
    row += n;
  }
  return fit_metalearner(set, {config.l2_c, config.max_iter});
}

FrameScoreMatrix fuse_aligned(const TrainedPipeline& tp, const std::vector<FrameScoreMatrix>& systems) {
  const FusionInput in{systems, tp.system_ids};
  const MetaLearnerModel* meta = tp.metalearner ? &*tp.metalearner : nullptr;
  return fuse(in, tp.config.fusion_method, tp.config.fusion_space, meta, tp.config.epsilon);
}

FrameScoreMatrix calibrate(const CalibrationModel& model, const FrameScoreMatrix& m) {
  return apply_calibration(model, to_space(m, model.space));
}

/// Calibrated and fused probabilities at the input frame rate, in the space of
/// the last stage.
FrameScoreMatrix run_stages(const TrainedPipeline& tp, std::vector<FrameScoreMatrix> systems) {
  const PipelineConfig& c = tp.config;
  if (c.order == PipelineOrder::kCalibrateThenFuse) {
    if (c.calibrate) {
      for (std::size_t m = 0; m < systems.size(); ++m) {
        systems[m] = calibrate(tp.calibration_models[m], systems[m]);
      }
    }
    return fuse_aligned(tp, systems);
  }
  FrameScoreMatrix fused = fuse_aligned(tp, systems);
  if (c.calibrate) fused = calibrate(tp.calibration_models.front(), fused);
  return fused;
}

}  // namespace

std::string_view to_string(PipelineOrder order) {
  return order == PipelineOrder::kCalibrateThenFuse ? "calibrate_then_fuse" : "fuse_then_calibrate";
}

std::string_view to_string(StrategyKind kind) {
  return kind == StrategyKind::kIndependent ? "independent" : "joint";
}

PipelineOrder parse_pipeline_order(std::string_view text) {
  if (text == "calibrate_then_fuse" || text == "C->F" || text == "CF") {
    return PipelineOrder::kCalibrateThenFuse;
  }
  if (text == "fuse_then_calibrate" || text == "F->C" || text == "FC") {
    return PipelineOrder::kFuseThenCalibrate;
  }
  throw ConfigError("unknown pipeline order '" + std::string(text) + "'");
}

StrategyKind parse_strategy_kind(std::string_view text) {
  if (text == "independent") return StrategyKind::kIndependent;
  if (text == "joint") return StrategyKind::kJoint;
  throw ConfigError("unknown calibration strategy '" + std::string(text) + "'");
}

void PipelineConfig::validate() const {
  if (calibration_space == Space::kPowerset && calibration_strategy != StrategyKind::kJoint) {
    throw ConfigError("powerset calibration only supports the joint strategy");
  }
  if (order == PipelineOrder::kFuseThenCalibrate && fusion_method == FusionMethod::kNone) {
    throw ConfigError("fuse_then_calibrate needs a fusion method");
  }
  if (post.upsample_factor < 1) throw ConfigError("upsample_factor must be >= 1");
  if (post.median_window < 1 || post.median_window % 2 == 0) {
    throw ConfigError("median_window must be a positive odd number");
  }
  if (!(post.threshold > 0.0 && post.threshold < 1.0)) throw ConfigError("threshold must lie in (0, 1)");
  if (!(l2_c > 0.0)) throw ConfigError("l2_c must be positive");
  if (max_iter < 1) throw ConfigError("max_iter must be >= 1");
  if (!(epsilon > 0.0 && epsilon < 0.5)) throw ConfigError("epsilon must lie in (0, 0.5)");
  std::set<std::string> seen;
  for (const auto& s : systems) {
    if (!seen.insert(s).second) throw ConfigError("system '" + s + "' listed twice");
  }
}

CalibrationStrategy PipelineConfig::strategy() const {
  if (calibration_space == Space::kPowerset) return CalibrationStrategy::kJointPower;
  return calibration_strategy == StrategyKind::kJoint ? CalibrationStrategy::kJointMult
                                                      : CalibrationStrategy::kIndependentMult;
}

std::string PipelineConfig::describe() const {
  std::string out = order == PipelineOrder::kCalibrateThenFuse ? "C->F" : "F->C";
  out += calibrate ? " " + std::string(to_string(strategy())) : " raw";
  if (fusion_method != FusionMethod::kNone) {
    out += " " + std::string(to_string(fusion_space)) + "-" + std::string(to_string(fusion_method));
  }
  return out;
}

void TrainedPipeline::validate() const {
  config.validate();
  if (system_ids.empty()) throw ContractError("trained pipeline has no systems");
  if (num_speakers < 1) throw ContractError("trained pipeline has no speakers");
  std::size_t expected = 0;
  if (config.calibrate) {
    expected = config.order == PipelineOrder::kCalibrateThenFuse ? system_ids.size() : 1;
  }
  if (calibration_models.size() != expected) {
    throw ContractError("expected " + std::to_string(expected) + " calibration models, found " +
                        std::to_string(calibration_models.size()));
  }
  for (const auto& m : calibration_models) {
    m.validate();
    if (m.strategy != config.strategy() || m.space != config.calibration_space ||
        m.num_speakers != num_speakers) {
      throw ContractError("stored calibration model does not match the pipeline config");
    }
  }
  const bool needs_meta = config.fusion_method == FusionMethod::kMetaLearner;
  if (needs_meta != metalearner.has_value()) {
    throw ContractError(needs_meta ? "metalearner fusion without a fitted model"
                                   : "unexpected metalearner model");
  }
  if (metalearner) {
    metalearner->validate();
    if (metalearner->space != config.fusion_space || metalearner->system_ids != system_ids) {
      throw ContractError("stored metalearner does not match the pipeline config");
    }
  }
}

TrainedPipeline fit_pipeline(const PipelineConfig& config,
                             const std::vector<TrainingRecording>& train) {
  config.validate();
  if (train.empty()) throw ContractError("empty training set");

  TrainedPipeline tp;
  tp.config = config;
  tp.system_ids = selected_ids(config, train.front().scores.system_ids);
  if (tp.system_ids.empty()) throw ContractError("no systems to train on");

  std::vector<AlignedRecording> recs;
  std::vector<Matrix> targets;
  recs.reserve(train.size());
  for (const auto& r : train) {
    recs.push_back(align_recording(r.scores, tp.system_ids));
    targets.push_back(reference_targets(recs.back().systems.front(), r.reference, config.epsilon));
    tp.training_alignments.push_back({r.scores.recording_id, recs.back().permutations});
  }
  tp.num_speakers = recs.front().systems.front().num_speakers;
  for (const auto& r : recs) {
    if (r.systems.front().num_speakers != tp.num_speakers) {
      throw ContractError("training recordings disagree on the number of speakers");
    }
  }

  const std::size_t m_systems = tp.system_ids.size();
  const bool meta = config.fusion_method == FusionMethod::kMetaLearner;

  if (config.order == PipelineOrder::kCalibrateThenFuse) {
    if (config.calibrate) {
      for (std::size_t m = 0; m < m_systems; ++m) {
        std::vector<FrameScoreMatrix> scores;
        for (const auto& r : recs) scores.push_back(r.systems[m]);
        tp.calibration_models.push_back(fit_one(config, scores, targets));
        for (auto& r : recs) r.systems[m] = calibrate(tp.calibration_models.back(), r.systems[m]);
      }
    }
    if (meta) tp.metalearner = fit_meta(config, tp.system_ids, recs, targets);
  } else {
    if (meta) tp.metalearner = fit_meta(config, tp.system_ids, recs, targets);
    if (config.calibrate) {
      std::vector<FrameScoreMatrix> fused;
      for (const auto& r : recs) fused.push_back(fuse_aligned(tp, r.systems));
      tp.calibration_models.push_back(fit_one(config, fused, targets));
    }
  }
  tp.validate();
  return tp;
}

PipelineOutput apply_pipeline(const TrainedPipeline& tp, const RecordingScores& recording) {
  const AlignedRecording rec = align_recording(recording, tp.system_ids);
  if (rec.systems.front().num_speakers != tp.num_speakers) {
    throw ContractError("recording '" + recording.recording_id + "' has " +
                        std::to_string(rec.systems.front().num_speakers) +
                        " speakers, the pipeline was trained on " + std::to_string(tp.num_speakers));
  }
  const FrameScoreMatrix final_scores = run_stages(tp, rec.systems);
  const PostProcessingConfig& post = tp.config.post;

  PipelineOutput out;
  out.probs = to_space(final_scores, Space::kMultilabel);
  out.probs.recording_id = recording.recording_id;

  FrameScoreMatrix soft = out.probs;
  if (final_scores.space == Space::kPowerset && tp.config.hard_powerset_decisions) {
    soft.values = powerset_decision(final_scores).values.cast<double>();
  }
  const FrameScoreMatrix smoothed = median_filter(upsample(soft, post.upsample_factor), post.median_window);
  out.decisions = threshold_decisions(smoothed, post.threshold);
  out.decisions.recording_id = recording.recording_id;
  out.hypothesis = activity_to_annotation(out.decisions, default_labels(tp.num_speakers));
  out.hypothesis.recording_id = recording.recording_id;
  return out;
}

ExperimentResult run_experiment(const std::vector<PipelineConfig>& grid,
                                const std::vector<TrainingRecording>& train,
                                const std::vector<TrainingRecording>& test,
                                const DerOptions& der_options) {
  std::set<std::string> train_ids;
  for (const auto& r : train) train_ids.insert(r.scores.recording_id);
  std::size_t overlap = 0;
  for (const auto& r : test) overlap += train_ids.count(r.scores.recording_id);
  if (overlap > 0) {
    std::cerr << "warning: " << overlap << " test recording(s) also appear in the training set\n";
  }

  ExperimentResult result;
  for (const auto& config : grid) {
    TrainedPipeline tp = fit_pipeline(config, train);
    DerReport der;
    BceTotals bce;
    for (const auto& r : test) {
      const PipelineOutput out = apply_pipeline(tp, r.scores);
      const BinaryActivityMatrix raw = frame_targets(r.reference, out.probs.frame_rate_hz,
                                                     out.probs.frames(), r.reference.speakers());
      bce += bce_totals(out.probs, aligned_targets(out.probs, raw, config.epsilon), config.epsilon);
      der += der_totals(r.reference, out.hypothesis, der_options);
    }
    result.rows.push_back({config.label(), std::string(to_string(config.fusion_method)),
                           config.calibrate ? std::string(to_string(config.strategy())) : "raw",
                           der, bce.mean()});
    result.pipelines.push_back(std::move(tp));
  }
  return result;
}

std::vector<std::string> ExperimentConfig::recording_ids() const {
  std::vector<std::string> ids;
  if (systems.empty()) return ids;
  for (const auto& [id, path] : systems.front().recordings) ids.push_back(id);
  return ids;
}

std::vector<TrainingRecording> load_recordings(const ExperimentConfig& cfg,
                                               const std::vector<std::string>& ids) {
  if (cfg.systems.empty()) throw ConfigError("experiment config lists no systems");
  const std::vector<std::string> wanted = ids.empty() ? cfg.recording_ids() : ids;
  const std::vector<Annotation> refs = read_rttm(cfg.reference);

  std::vector<TrainingRecording> out;
  out.reserve(wanted.size());
  for (const auto& rec_id : wanted) {
    TrainingRecording r;
    r.scores.recording_id = rec_id;
    for (const auto& sys : cfg.systems) {
      const auto it = std::find_if(sys.recordings.begin(), sys.recordings.end(),
                                   [&](const auto& p) { return p.first == rec_id; });
      if (it == sys.recordings.end()) {
        throw ConfigError("system '" + sys.system_id + "' has no scores for '" + rec_id + "'");
      }
      ScoreFile f = read_scores(it->second);
      if (f.scores.recording_id != rec_id) {
        throw ParseError(it->second.string() + ": recording id '" + f.scores.recording_id +
                         "' does not match '" + rec_id + "'");
      }
      r.scores.system_ids.push_back(sys.system_id);
      r.scores.systems.push_back(std::move(f.scores));
    }
    const auto ref = std::find_if(refs.begin(), refs.end(),
                                  [&](const Annotation& a) { return a.recording_id == rec_id; });
    if (ref != refs.end()) {
      r.reference = *ref;
    } else {
      std::cerr << "warning: no reference segments for '" << rec_id << "', treating it as silent\n";
      r.reference.recording_id = rec_id;
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace diacal
