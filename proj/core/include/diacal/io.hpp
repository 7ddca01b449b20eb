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
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "diacal/evaluation.hpp"
#include "diacal/score_matrix.hpp"

namespace diacal {

/// Whole-file read/write; paths ending in ".gz" are (de)compressed with zlib.
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view content);

/// RTTM lines `SPEAKER <rec> 1 <onset> <dur> <NA> <NA> <spk> <NA> <NA>`.
/// Other line types are skipped with a warning; blank lines and lines starting
/// with ';' or '#' are ignored. Annotations come back in order of first
/// appearance with same-speaker segments merged.
std::vector<Annotation> parse_rttm(std::string_view text);
std::vector<Annotation> read_rttm(const std::filesystem::path& path);

/// Onset and duration at 3-decimal fixed point, segments ordered by
/// (onset, speaker).
std::string format_rttm(std::span<const Annotation> annotations);
void write_rttm(std::span<const Annotation> annotations, const std::filesystem::path& path);

/// Rounds every onset/duration to what format_rttm would print (dropping
/// segments that round to zero length), merges and rounds again.
/// canonicalize(read(write(a))) == canonicalize(a).
Annotation canonicalize_annotation(const Annotation& a);

/// Score file v1:
///   #diacal-scores v1
///   frames=T speakers=S rate_hz=R kind=prob|logit space=mult|power system=<id> recording=<id>
///   T lines of D whitespace-separated numbers
struct ScoreFile {
  std::string system_id;
  FrameScoreMatrix scores;
};

inline constexpr std::string_view kScoreMagic = "#diacal-scores v1";

ScoreFile parse_scores(std::string_view text);
ScoreFile read_scores(const std::filesystem::path& path);
/// Values are written with 17 significant digits, so a round trip is exact.
std::string format_scores(const FrameScoreMatrix& m, std::string_view system_id);
void write_scores(const FrameScoreMatrix& m, std::string_view system_id,
                  const std::filesystem::path& path);

}  // namespace diacal
