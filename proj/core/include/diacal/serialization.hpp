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
#include <string>
#include <string_view>

#include "diacal/calibration.hpp"
#include "diacal/fusion.hpp"
#include "diacal/pipeline.hpp"

namespace diacal {

// JSON documents. Doubles are written in shortest round-trip form, so a
// save/load cycle reproduces every parameter bit for bit. Matrices are stored
// row-major as flat arrays next to their dimensions. Parsers throw
// ConfigError on missing or unknown fields.

std::string serialize(const CalibrationModel& model);
CalibrationModel parse_calibration_model(std::string_view json);

std::string serialize(const MetaLearnerModel& model);
MetaLearnerModel parse_metalearner_model(std::string_view json);

std::string serialize(const PipelineConfig& config);
PipelineConfig parse_pipeline_config(std::string_view json);

std::string serialize(const TrainedPipeline& pipeline);
TrainedPipeline parse_trained_pipeline(std::string_view json);

/// Experiment file:
///   {"systems": {"<system>": {"<recording>": "<score file>", ...}, ...},
///    "reference": "<rttm>", "train": [...], "test": [...], "configs": [...]}
/// Relative paths are resolved against `base_dir`.
ExperimentConfig parse_experiment_config(std::string_view json,
                                         const std::filesystem::path& base_dir = {});
ExperimentConfig load_experiment_config(const std::filesystem::path& path);
/// Paths are written relative to `base_dir` when they lie below it.
std::string serialize(const ExperimentConfig& config, const std::filesystem::path& base_dir = {});

}  // namespace diacal
