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

#include <string>
#include <utility>
#include <vector>

#include "diacal/assignment.hpp"
#include "diacal/score_matrix.hpp"

namespace diacal {

struct Segment {
  std::string speaker;
  double onset = 0.0;     // seconds
  double duration = 0.0;  // seconds, > 0

  double end() const { return onset + duration; }
  friend bool operator==(const Segment&, const Segment&) = default;
};

/// Speaker segments of one recording.
struct Annotation {
  std::string recording_id;
  std::vector<Segment> segments;

  /// Sorted, de-duplicated speaker ids.
  std::vector<std::string> speakers() const;
  void validate() const;
  friend bool operator==(const Annotation&, const Annotation&) = default;
};

/// Unions overlapping or touching segments of the same speaker and sorts the
/// result by (onset, speaker).
Annotation merge_segments(const Annotation& a);

/// Frame t is active for speaker_order[s] iff the frame centre (t + 0.5) / rate
/// lies inside one of that speaker's segments.
BinaryActivityMatrix frame_targets(const Annotation& ref, double frame_rate_hz, Eigen::Index frames,
                                   const std::vector<std::string>& speaker_order);

/// Runs of consecutive active frames become segments labelled
/// speaker_labels[s] (defaults to "spk<s>").
Annotation activity_to_annotation(const BinaryActivityMatrix& activity,
                                  std::vector<std::string> speaker_labels = {});

/// Permutation (over max(S_pred, S_ref) columns, the smaller side padded with
/// zero columns) minimizing summed BCE: padded prediction column perm[i] is
/// matched with reference column i. Exhaustive for up to 6 columns.
Permutation align_to_reference(const FrameScoreMatrix& probs, const BinaryActivityMatrix& targets,
                               double epsilon = kDefaultEpsilon);

/// Reference columns reordered to the prediction's speaker order via
/// align_to_reference; returns T x S_pred. Reference speakers matched to a
/// padding column are dropped.
BinaryActivityMatrix aligned_targets(const FrameScoreMatrix& probs,
                                     const BinaryActivityMatrix& targets,
                                     double epsilon = kDefaultEpsilon);

struct BceTotals {
  double loss_sum = 0.0;
  Eigen::Index count = 0;

  double mean() const;
  BceTotals& operator+=(const BceTotals& other);
};

/// Summed per-speaker BCE (natural log, clamped p). Powerset inputs are
/// marginalized first. Targets must already be aligned.
BceTotals bce_totals(const FrameScoreMatrix& probs, const BinaryActivityMatrix& targets,
                     double epsilon = kDefaultEpsilon);
double compute_bce(const FrameScoreMatrix& probs, const BinaryActivityMatrix& targets,
                   double epsilon = kDefaultEpsilon);

inline constexpr double kDefaultCollar = 0.25;

struct DerOptions {
  double collar_s = kDefaultCollar;
  bool score_overlap = true;
};

/// Time-weighted error totals. Aggregate across recordings with +=.
struct DerReport {
  double miss_s = 0.0;
  double false_alarm_s = 0.0;
  double confusion_s = 0.0;
  double scored_speech_s = 0.0;
  double collar_s = 0.0;
  std::vector<std::pair<std::string, std::string>> mapping;  // (reference, hypothesis)

  double miss_pct() const;
  double false_alarm_pct() const;
  double confusion_pct() const;
  double der_pct() const;
  DerReport& operator+=(const DerReport& other);
};

/// Optimal speaker mapping maximizing scored overlap time, computed with
/// hungarian_min_cost on the reference x hypothesis overlap matrix.
/// Throws ContractError when there is no scored reference speech.
DerReport compute_der(const Annotation& ref, const Annotation& hyp, const DerOptions& options = {});

/// Same as compute_der but accepts recordings without scored speech (their
/// false alarms still count when aggregated).
DerReport der_totals(const Annotation& ref, const Annotation& hyp, const DerOptions& options = {});

/// Scored overlap matrix (seconds) between reference and hypothesis speakers,
/// in the order of speakers(); exposed for mapping tests.
Matrix speaker_overlap_matrix(const Annotation& ref, const Annotation& hyp,
                              const DerOptions& options = {});

}  // namespace diacal
