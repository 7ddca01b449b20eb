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

#include <benchmark/benchmark.h>

#include <vector>

#include "diacal/calibration.hpp"
#include "diacal/datagen.hpp"
#include "diacal/evaluation.hpp"
#include "diacal/fusion.hpp"
#include "diacal/post_processing.hpp"
#include "diacal/spaces.hpp"

namespace {

using namespace diacal;

SyntheticEnsemble ensemble(int frames, int speakers = 2) {
  GeneratorConfig cfg = GeneratorConfig::default_benchmark(11);
  cfg.num_recordings = 1;
  cfg.frames = frames;
  cfg.num_speakers = speakers;
  return generate(cfg);
}

FusionInput fusion_input(const SyntheticEnsemble& e) {
  FusionInput in;
  for (const auto& z : e.recordings[0].system_logits) in.systems.push_back(to_probabilities(z));
  in.system_ids = e.system_ids;
  return in;
}

void BM_MultToPower(benchmark::State& state) {
  const auto e = ensemble(3000, static_cast<int>(state.range(0)));
  const FrameScoreMatrix p = to_probabilities(e.recordings[0].system_logits[0]);
  for (auto _ : state) benchmark::DoNotOptimize(mult_to_power(p));
  state.SetItemsProcessed(state.iterations() * p.frames());
}
BENCHMARK(BM_MultToPower)->Arg(1)->Arg(2)->Arg(3)->Arg(4);

void BM_Fuse(benchmark::State& state) {
  const auto e = ensemble(3000);
  const FusionInput in = fusion_input(e);
  const auto method = static_cast<FusionMethod>(state.range(0));
  const auto space = static_cast<Space>(state.range(1));
  state.SetLabel(std::string(to_string(method)) + "/" + std::string(to_string(space)));
  for (auto _ : state) benchmark::DoNotOptimize(fuse(in, method, space));
}
BENCHMARK(BM_Fuse)
    ->ArgsProduct({{static_cast<int>(FusionMethod::kAverageProbs), static_cast<int>(FusionMethod::kAverageLogits),
                    static_cast<int>(FusionMethod::kDynamicLogits), static_cast<int>(FusionMethod::kEntropy)},
                   {static_cast<int>(Space::kMultilabel), static_cast<int>(Space::kPowerset)}});

void BM_AlignSystems(benchmark::State& state) {
  const auto e = ensemble(3000, static_cast<int>(state.range(0)));
  const FusionInput in = fusion_input(e);
  const std::vector<FrameScoreMatrix> others(in.systems.begin() + 1, in.systems.end());
  for (auto _ : state) benchmark::DoNotOptimize(align_systems(in.systems[0], others));
}
BENCHMARK(BM_AlignSystems)->Arg(2)->Arg(4)->Arg(6);

void BM_FitCalibration(benchmark::State& state) {
  const auto e = ensemble(static_cast<int>(state.range(1)));
  const auto& rec = e.recordings[0];
  const FrameScoreMatrix probs = to_probabilities(rec.system_logits[0]);
  const BinaryActivityMatrix targets =
      frame_targets(rec.reference, probs.frame_rate_hz, probs.frames(), rec.reference.speakers());
  const std::vector<LabeledScores> data = {{probs, targets.values.cast<double>()}};
  const auto strategy = static_cast<CalibrationStrategy>(state.range(0));
  const CalibrationTrainingSet train = build_training_set(data, calibration_space(strategy));
  state.SetLabel(std::string(to_string(strategy)));
  for (auto _ : state) benchmark::DoNotOptimize(fit_calibration(train, strategy));
}
BENCHMARK(BM_FitCalibration)
    ->ArgsProduct({{static_cast<int>(CalibrationStrategy::kIndependentMult),
                    static_cast<int>(CalibrationStrategy::kJointMult),
                    static_cast<int>(CalibrationStrategy::kJointPower)},
                   {3000, 30000}})
    ->Unit(benchmark::kMillisecond);

void BM_Der(benchmark::State& state) {
  const auto e = ensemble(static_cast<int>(state.range(0)));
  const auto& rec = e.recordings[0];
  const FrameScoreMatrix probs = median_filter(upsample(to_probabilities(rec.system_logits[0]), 10), 11);
  const Annotation hyp = activity_to_annotation(threshold_decisions(probs));
  for (auto _ : state) benchmark::DoNotOptimize(compute_der(rec.reference, hyp));
}
BENCHMARK(BM_Der)->Arg(3000)->Arg(30000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
