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

#include <gtest/gtest.h>

#include "diacal/error.hpp"
#include "diacal/io.hpp"
#include "diacal/serialization.hpp"
#include "diacal/spaces.hpp"
#include "test_support.hpp"

namespace diacal {
namespace {

std::vector<TrainingRecording> small_set(std::uint64_t seed, int recordings = 6) {
  GeneratorConfig cfg = GeneratorConfig::default_benchmark(seed);
  cfg.frames = 400;
  cfg.num_recordings = recordings;
  return testing::to_training(generate(cfg));
}

PipelineConfig config(PipelineOrder order, FusionMethod method) {
  PipelineConfig c;
  c.order = order;
  c.fusion_method = method;
  return c;
}

TEST(PipelineConfig, Validation) {
  PipelineConfig c;
  EXPECT_NO_THROW(c.validate());
  c.calibration_strategy = StrategyKind::kIndependent;
  EXPECT_THROW(c.validate(), ConfigError);  // powerset needs joint
  c.calibration_space = Space::kMultilabel;
  EXPECT_NO_THROW(c.validate());
  c.fusion_method = FusionMethod::kNone;
  EXPECT_THROW(c.validate(), ConfigError);  // F->C needs a fusion
  c.order = PipelineOrder::kCalibrateThenFuse;
  EXPECT_NO_THROW(c.validate());
  c.post.median_window = 4;
  EXPECT_THROW(c.validate(), ConfigError);
  EXPECT_THROW(fit_pipeline(PipelineConfig{}, {}), Error);
}

TEST(PipelineConfig, OrderNames) {
  EXPECT_EQ(parse_pipeline_order("C->F"), PipelineOrder::kCalibrateThenFuse);
  EXPECT_EQ(parse_pipeline_order("fuse_then_calibrate"), PipelineOrder::kFuseThenCalibrate);
  EXPECT_THROW(parse_pipeline_order("sideways"), Error);
  PipelineConfig c = config(PipelineOrder::kFuseThenCalibrate, FusionMethod::kDynamicLogits);
  EXPECT_EQ(c.strategy(), CalibrationStrategy::kJointPower);
  EXPECT_NE(c.describe().find("F->C"), std::string::npos);
  EXPECT_NE(c.describe().find("dynamic_logits"), std::string::npos);
}

TEST(Pipeline, FuseThenCalibrateStoresOneJointPowerModel) {
  const auto train = small_set(1);
  const TrainedPipeline tp = fit_pipeline(config(PipelineOrder::kFuseThenCalibrate, FusionMethod::kDynamicLogits), train);
  ASSERT_EQ(tp.calibration_models.size(), 1u);
  EXPECT_EQ(tp.calibration_models[0].strategy, CalibrationStrategy::kJointPower);
  EXPECT_EQ(tp.calibration_models[0].scale.rows(), 4);
  EXPECT_FALSE(tp.metalearner.has_value());
  EXPECT_EQ(tp.training_alignments.size(), train.size());
}

TEST(Pipeline, CalibrateThenFuseStoresOneModelPerSystem) {
  const auto train = small_set(2);
  for (FusionMethod method : {FusionMethod::kAverageProbs, FusionMethod::kMetaLearner}) {
    const TrainedPipeline tp = fit_pipeline(config(PipelineOrder::kCalibrateThenFuse, method), train);
    EXPECT_EQ(tp.calibration_models.size(), 3u);
    EXPECT_EQ(tp.metalearner.has_value(), method == FusionMethod::kMetaLearner);
  }
  PipelineConfig raw = config(PipelineOrder::kCalibrateThenFuse, FusionMethod::kAverageLogits);
  raw.calibrate = false;
  EXPECT_TRUE(fit_pipeline(raw, train).calibration_models.empty());
  PipelineConfig three_spk = config(PipelineOrder::kFuseThenCalibrate, FusionMethod::kEntropy);
  three_spk.fusion_space = Space::kPowerset;
  EXPECT_EQ(fit_pipeline(three_spk, train).calibration_models[0].dims(), 4);
}

TEST(Pipeline, MetaLearnerAfterCalibrationSeesCalibratedLogits) {
  const auto train = small_set(3, 4);
  PipelineConfig c = config(PipelineOrder::kCalibrateThenFuse, FusionMethod::kMetaLearner);
  c.systems = {"sysA", "sysB"};
  const TrainedPipeline tp = fit_pipeline(c, train);
  for (const auto& a : tp.training_alignments) EXPECT_EQ(a.permutations[0], (Permutation{0, 1}));

  // Same steps by hand: targets aligned to the anchor, one calibrator per
  // system, then the MetaLearner on the calibrated logits.
  std::vector<Matrix> targets;
  for (const auto& r : train) {
    const FrameScoreMatrix anchor = to_probabilities(r.scores.systems[0]);
    const auto raw = frame_targets(r.reference, anchor.frame_rate_hz, anchor.frames(), r.reference.speakers());
    targets.push_back(aligned_targets(anchor, raw).values.cast<double>());
  }
  MetaLearnerTrainingSet meta;
  meta.space = Space::kMultilabel;
  meta.num_speakers = 2;
  meta.system_ids = c.systems;
  for (const auto& t : targets) {
    meta.multilabel_targets.conservativeResize(meta.multilabel_targets.rows() + t.rows(), 2);
    meta.multilabel_targets.bottomRows(t.rows()) = t;
  }
  for (std::size_t m = 0; m < 2; ++m) {
    std::vector<LabeledScores> data;
    for (std::size_t r = 0; r < train.size(); ++r) data.push_back({to_probabilities(train[r].scores.systems[m]), targets[r]});
    const CalibrationModel cal =
        fit_calibration(build_training_set(data, Space::kPowerset), CalibrationStrategy::kJointPower);
    EXPECT_EQ(cal.scale, tp.calibration_models[m].scale);
    Matrix logits(0, 2);
    for (const auto& d : data) {
      const FrameScoreMatrix z = to_logits(power_to_mult(apply_calibration(cal, mult_to_power(d.probs))));
      logits.conservativeResize(logits.rows() + z.frames(), 2);
      logits.bottomRows(z.frames()) = z.values;
    }
    meta.logits.push_back(logits);
  }
  const MetaLearnerModel expected = fit_metalearner(meta);
  ASSERT_TRUE(tp.metalearner.has_value());
  EXPECT_LT((expected.weights - tp.metalearner->weights).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_LT((expected.bias - tp.metalearner->bias).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Pipeline, IdentityPathIsPurePostProcessing) {
  const auto train = small_set(4, 2);
  PipelineConfig c = config(PipelineOrder::kCalibrateThenFuse, FusionMethod::kNone);
  c.calibrate = false;
  c.systems = {"sysB"};
  const TrainedPipeline tp = fit_pipeline(c, train);
  EXPECT_TRUE(tp.calibration_models.empty());
  const RecordingScores& rec = train[1].scores;
  const PipelineOutput out = apply_pipeline(tp, rec);
  const FrameScoreMatrix raw = to_probabilities(rec.systems[1]);
  EXPECT_LT((out.probs.values - raw.values).cwiseAbs().maxCoeff(), 1e-15);
  const auto expected = threshold_decisions(median_filter(upsample(raw, 10), 11), 0.5);
  EXPECT_EQ(out.decisions.values, expected.values);
  EXPECT_EQ(out.decisions.frame_rate_hz, 100.0);
  EXPECT_EQ(frame_targets(out.hypothesis, 100.0, out.decisions.frames(), {"spk0", "spk1"}).values,
            expected.values);
}

TEST(Pipeline, FusionSpaceMatters) {
  // Averaged marginals agree in both spaces; the powerset rows fed to the
  // calibrator differ unless M = 1.
  const auto train = small_set(5, 3);
  PipelineConfig mult = config(PipelineOrder::kFuseThenCalibrate, FusionMethod::kAverageProbs);
  PipelineConfig power = mult;
  power.fusion_space = Space::kPowerset;
  const auto a = apply_pipeline(fit_pipeline(mult, train), train[0].scores).probs.values;
  const auto b = apply_pipeline(fit_pipeline(power, train), train[0].scores).probs.values;
  EXPECT_GT((a - b).cwiseAbs().maxCoeff(), 1e-3);
  mult.systems = power.systems = {"sysA"};
  const auto c = apply_pipeline(fit_pipeline(mult, train), train[0].scores).probs.values;
  const auto d = apply_pipeline(fit_pipeline(power, train), train[0].scores).probs.values;
  EXPECT_LT((c - d).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Pipeline, DeterministicAndDoesNotMutateInputs) {
  const auto train = small_set(6);
  const auto copy = train;
  for (FusionMethod method : {FusionMethod::kMetaLearner, FusionMethod::kEntropy}) {
    const PipelineConfig c = config(PipelineOrder::kFuseThenCalibrate, method);
    const TrainedPipeline a = fit_pipeline(c, train);
    const TrainedPipeline b = fit_pipeline(c, train);
    EXPECT_EQ(serialize(a), serialize(b));
    std::vector<Annotation> ha, hb;
    for (const auto& r : train) {
      ha.push_back(apply_pipeline(a, r.scores).hypothesis);
      hb.push_back(apply_pipeline(b, r.scores).hypothesis);
    }
    EXPECT_EQ(format_rttm(ha), format_rttm(hb));
  }
  for (std::size_t r = 0; r < train.size(); ++r) {
    for (std::size_t m = 0; m < 3; ++m) EXPECT_EQ(train[r].scores.systems[m].values, copy[r].scores.systems[m].values);
  }
}

TEST(Pipeline, ApplyAlignsSystemsByIdAndRejectsMissingOnes) {
  const auto train = small_set(7, 3);
  const TrainedPipeline tp = fit_pipeline(config(PipelineOrder::kFuseThenCalibrate, FusionMethod::kMetaLearner), train);
  RecordingScores shuffled = train[0].scores;
  std::swap(shuffled.system_ids[0], shuffled.system_ids[2]);
  std::swap(shuffled.systems[0], shuffled.systems[2]);
  EXPECT_EQ(apply_pipeline(tp, shuffled).probs.values, apply_pipeline(tp, train[0].scores).probs.values);
  RecordingScores missing = train[0].scores;
  missing.system_ids.pop_back();
  missing.systems.pop_back();
  EXPECT_THROW(apply_pipeline(tp, missing), ContractError);
}

TEST(Pipeline, RecoversSwappedSpeakerColumns) {
  auto train = small_set(8, 3);
  for (auto& r : train) r.scores.systems[1].values = permute_columns(r.scores.systems[1].values, {1, 0});
  const TrainedPipeline tp = fit_pipeline(config(PipelineOrder::kCalibrateThenFuse, FusionMethod::kAverageProbs), train);
  for (const auto& a : tp.training_alignments) {
    EXPECT_EQ(a.permutations[0], (Permutation{1, 0}));
    EXPECT_EQ(a.permutations[1], (Permutation{0, 1}));
  }
}

TEST(Experiment, GridOfTenRows) {
  const auto train = small_set(9, 4);
  const auto test = small_set(10, 2);
  std::vector<PipelineConfig> grid;
  for (FusionMethod m : {FusionMethod::kAverageProbs, FusionMethod::kAverageLogits, FusionMethod::kDynamicLogits,
                         FusionMethod::kEntropy, FusionMethod::kMetaLearner}) {
    for (PipelineOrder o : {PipelineOrder::kCalibrateThenFuse, PipelineOrder::kFuseThenCalibrate}) {
      grid.push_back(config(o, m));
    }
  }
  const ExperimentResult a = run_experiment(grid, train, test);
  ASSERT_EQ(a.rows.size(), 10u);
  ASSERT_EQ(a.pipelines.size(), 10u);
  for (std::size_t i = 0; i < 10; ++i) {
    EXPECT_EQ(a.rows[i].condition, grid[i].label());
    EXPECT_GT(a.rows[i].der.scored_speech_s, 0.0);
    EXPECT_GT(a.rows[i].bce, 0.0);
  }
  const ExperimentResult b = run_experiment(grid, train, test);
  EXPECT_EQ(format_report_text(a.rows), format_report_text(b.rows));
}

TEST(Experiment, LoadsRecordingsFromFiles) {
  testing::TempDir dir;
  const auto data = small_set(11, 2);
  ExperimentConfig cfg;
  std::vector<Annotation> refs;
  for (std::size_t m = 0; m < 3; ++m) {
    ExperimentConfig::SystemFiles files{data[0].scores.system_ids[m], {}};
    for (const auto& r : data) {
      const auto path = dir / (files.system_id + "_" + r.scores.recording_id + ".scores");
      write_scores(r.scores.systems[m], files.system_id, path);
      files.recordings.emplace_back(r.scores.recording_id, path);
    }
    cfg.systems.push_back(files);
  }
  for (const auto& r : data) refs.push_back(r.reference);
  cfg.reference = dir / "ref.rttm";
  write_rttm(refs, cfg.reference);
  const auto loaded = load_recordings(cfg, {"rec1"});
  ASSERT_EQ(loaded.size(), 1u);
  EXPECT_EQ(loaded[0].scores.systems[2].values, data[1].scores.systems[2].values);
  EXPECT_EQ(canonicalize_annotation(loaded[0].reference), canonicalize_annotation(data[1].reference));
  EXPECT_EQ(load_recordings(cfg).size(), 2u);
}

}  // namespace
}  // namespace diacal
