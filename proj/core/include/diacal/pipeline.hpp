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

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "diacal/assignment.hpp"
#include "diacal/calibration.hpp"
#include "diacal/evaluation.hpp"
#include "diacal/fusion.hpp"
#include "diacal/post_processing.hpp"
#include "diacal/report.hpp"
#include "diacal/score_matrix.hpp"

namespace diacal {

enum class PipelineOrder { kCalibrateThenFuse, kFuseThenCalibrate };
enum class StrategyKind { kIndependent, kJoint };

std::string_view to_string(PipelineOrder order);
std::string_view to_string(StrategyKind kind);
/// Accepts "calibrate_then_fuse"/"C->F" and "fuse_then_calibrate"/"F->C".
PipelineOrder parse_pipeline_order(std::string_view text);
StrategyKind parse_strategy_kind(std::string_view text);

struct PostProcessingConfig {
  int upsample_factor = kDefaultUpsampleFactor;
  int median_window = kDefaultMedianWindow;
  double threshold = kDefaultThreshold;
};

struct PipelineConfig {
  std::string name;  // row label in reports; describe() is used when empty
  PipelineOrder order = PipelineOrder::kFuseThenCalibrate;
  Space calibration_space = Space::kPowerset;
  StrategyKind calibration_strategy = StrategyKind::kJoint;
  Space fusion_space = Space::kMultilabel;
  FusionMethod fusion_method = FusionMethod::kAverageProbs;
  bool calibrate = true;
  CalibrationFeature feature = CalibrationFeature::kLog;
  /// Systems to use, in order; the first is the alignment anchor. Empty means
  /// every available system in input order.
  std::vector<std::string> systems;
  PostProcessingConfig post;
  /// Take the argmax powerset class instead of thresholding marginals when
  /// the final output is in powerset space.
  bool hard_powerset_decisions = false;
  double l2_c = 1.0;
  int max_iter = 1000;
  double epsilon = kDefaultEpsilon;

  /// Throws ConfigError: powerset calibration requires the joint strategy,
  /// fuse-then-calibrate requires a fusion method, and numeric fields must be
  /// in range.
  void validate() const;
  CalibrationStrategy strategy() const;
  /// Short label such as "F->C power-joint mult-average_probs".
  std::string describe() const;
  std::string label() const { return name.empty() ? describe() : name; }
};

/// Scores of all systems for one recording; systems[i] belongs to system_ids[i].
struct RecordingScores {
  std::string recording_id;
  std::vector<std::string> system_ids;
  std::vector<FrameScoreMatrix> systems;
};

struct TrainingRecording {
  RecordingScores scores;
  Annotation reference;
};

struct RecordingAlignment {
  std::string recording_id;
  std::vector<Permutation> permutations;  // one per non-anchor system
};

struct TrainedPipeline {
  PipelineConfig config;
  std::vector<std::string> system_ids;
  int num_speakers = 0;
  std::vector<CalibrationModel> calibration_models;  // M for C->F, 1 for F->C
  std::optional<MetaLearnerModel> metalearner;
  std::vector<RecordingAlignment> training_alignments;

  void validate() const;
};

/// Fits calibrators and/or the MetaLearner in the configured order. Every
/// recording is first aligned to the anchor system, and the anchor to its
/// reference.
TrainedPipeline fit_pipeline(const PipelineConfig& config,
                             const std::vector<TrainingRecording>& train);

struct PipelineOutput {
  FrameScoreMatrix probs;           // multilabel probabilities at the input rate
  BinaryActivityMatrix decisions;   // at the upsampled rate
  Annotation hypothesis;
};

/// Throws ContractError when a trained system id is missing.
PipelineOutput apply_pipeline(const TrainedPipeline& tp, const RecordingScores& recording);

struct ExperimentResult {
  std::vector<ReportRow> rows;  // one per config, in config order
  std::vector<TrainedPipeline> pipelines;
};

/// Fits every config on `train` and scores it on `test`. DER is aggregated
/// over recordings by summing error seconds; BCE is pooled over all test
/// frames and speakers. Overlapping train/test ids only trigger a warning.
ExperimentResult run_experiment(const std::vector<PipelineConfig>& grid,
                                const std::vector<TrainingRecording>& train,
                                const std::vector<TrainingRecording>& test,
                                const DerOptions& der_options = {});

/// Input section of a JSON experiment file.
struct ExperimentConfig {
  struct SystemFiles {
    std::string system_id;
    std::vector<std::pair<std::string, std::filesystem::path>> recordings;  // id -> score file
  };
  std::vector<SystemFiles> systems;
  std::filesystem::path reference;
  std::optional<std::vector<std::string>> train;
  std::optional<std::vector<std::string>> test;
  std::vector<PipelineConfig> configs;

  /// Recording ids in the order listed for the first system.
  std::vector<std::string> recording_ids() const;
};

/// Reads scores and references for `ids` (all recordings when empty).
std::vector<TrainingRecording> load_recordings(const ExperimentConfig& cfg,
                                               const std::vector<std::string>& ids = {});

}  // namespace diacal
