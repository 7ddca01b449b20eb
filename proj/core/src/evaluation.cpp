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

#include "diacal/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <map>

#include "diacal/error.hpp"
#include "diacal/spaces.hpp"

namespace diacal {
namespace {

// Elementary intervals between all segment and collar boundaries, with the
// activity of every speaker on each interval.
struct Timeline {
  std::vector<double> bounds;  // size intervals + 1
  std::vector<char> scored;
  std::vector<std::string> ref_speakers;
  std::vector<std::string> hyp_speakers;
  std::vector<std::vector<char>> ref_active;  // [speaker][interval]
  std::vector<std::vector<char>> hyp_active;

  std::size_t intervals() const { return scored.size(); }
  double length(std::size_t k) const { return bounds[k + 1] - bounds[k]; }

  // Interval index range [first, last) covering [from, to).
  std::pair<std::size_t, std::size_t> range(double from, double to) const {
    const auto lo = std::lower_bound(bounds.begin(), bounds.end(), from) - bounds.begin();
    const auto hi = std::lower_bound(bounds.begin(), bounds.end(), to) - bounds.begin();
    return {static_cast<std::size_t>(lo), static_cast<std::size_t>(hi)};
  }
};

std::vector<std::vector<char>> mark_activity(const Timeline& tl, const Annotation& a,
                                             const std::vector<std::string>& speakers) {
  std::vector<std::vector<char>> active(speakers.size(), std::vector<char>(tl.intervals(), 0));
  for (const auto& seg : a.segments) {
    const auto idx = std::lower_bound(speakers.begin(), speakers.end(), seg.speaker) - speakers.begin();
    const auto [lo, hi] = tl.range(seg.onset, seg.end());
    for (std::size_t k = lo; k < hi; ++k) active[static_cast<std::size_t>(idx)][k] = 1;
  }
  return active;
}

Timeline build_timeline(const Annotation& ref_in, const Annotation& hyp_in, const DerOptions& opt) {
  if (opt.collar_s < 0.0) throw ArgumentError("collar must be >= 0");
  const Annotation ref = merge_segments(ref_in);
  const Annotation hyp = merge_segments(hyp_in);
  Timeline tl;
  for (const auto* a : {&ref, &hyp}) {
    for (const auto& s : a->segments) {
      tl.bounds.push_back(s.onset);
      tl.bounds.push_back(s.end());
    }
  }
  if (opt.collar_s > 0.0) {
    for (const auto& s : ref.segments) {
      for (double x : {s.onset, s.end()}) {
        tl.bounds.push_back(std::max(0.0, x - opt.collar_s));
        tl.bounds.push_back(x + opt.collar_s);
      }
    }
  }
  std::sort(tl.bounds.begin(), tl.bounds.end());
  tl.bounds.erase(std::unique(tl.bounds.begin(), tl.bounds.end()), tl.bounds.end());
  if (tl.bounds.size() < 2) tl.bounds.assign({0.0, 0.0});
  tl.scored.assign(tl.bounds.size() - 1, 1);

  tl.ref_speakers = ref.speakers();
  tl.hyp_speakers = hyp.speakers();
  tl.ref_active = mark_activity(tl, ref, tl.ref_speakers);
  tl.hyp_active = mark_activity(tl, hyp, tl.hyp_speakers);

  if (opt.collar_s > 0.0) {
    for (const auto& s : ref.segments) {
      for (double x : {s.onset, s.end()}) {
        const auto [lo, hi] = tl.range(std::max(0.0, x - opt.collar_s), x + opt.collar_s);
        for (std::size_t k = lo; k < hi; ++k) tl.scored[k] = 0;
      }
    }
  }
  if (!opt.score_overlap) {
    for (std::size_t k = 0; k < tl.intervals(); ++k) {
      int n = 0;
      for (const auto& r : tl.ref_active) n += r[k];
      if (n >= 2) tl.scored[k] = 0;
    }
  }
  return tl;
}

Matrix overlap_matrix(const Timeline& tl) {
  Matrix o = Matrix::Zero(static_cast<Eigen::Index>(tl.ref_speakers.size()),
                          static_cast<Eigen::Index>(tl.hyp_speakers.size()));
  for (std::size_t k = 0; k < tl.intervals(); ++k) {
    if (!tl.scored[k]) continue;
    const double d = tl.length(k);
    for (std::size_t r = 0; r < tl.ref_speakers.size(); ++r) {
      if (!tl.ref_active[r][k]) continue;
      for (std::size_t h = 0; h < tl.hyp_speakers.size(); ++h) {
        if (tl.hyp_active[h][k]) o(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(h)) += d;
      }
    }
  }
  return o;
}

double safe_pct(double part, double total) { return total > 0.0 ? 100.0 * part / total : 0.0; }

}  // namespace

std::vector<std::string> Annotation::speakers() const {
  std::vector<std::string> out;
  out.reserve(segments.size());
  for (const auto& s : segments) out.push_back(s.speaker);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

void Annotation::validate() const {
  for (const auto& s : segments) {
    if (!(s.onset >= 0.0) || !(s.duration > 0.0) || !std::isfinite(s.end())) {
      throw ContractError("invalid segment for speaker '" + s.speaker + "' in recording '" +
                          recording_id + "'");
    }
  }
}

Annotation merge_segments(const Annotation& a) {
  a.validate();
  std::map<std::string, std::vector<std::pair<double, double>>> by_speaker;
  for (const auto& s : a.segments) by_speaker[s.speaker].emplace_back(s.onset, s.end());
  Annotation out;
  out.recording_id = a.recording_id;
  for (auto& [speaker, spans] : by_speaker) {
    std::sort(spans.begin(), spans.end());
    double start = spans.front().first;
    double stop = spans.front().second;
    for (std::size_t i = 1; i < spans.size(); ++i) {
      if (spans[i].first <= stop) {
        stop = std::max(stop, spans[i].second);
      } else {
        out.segments.push_back({speaker, start, stop - start});
        start = spans[i].first;
        stop = spans[i].second;
      }
    }
    out.segments.push_back({speaker, start, stop - start});
  }
  std::stable_sort(out.segments.begin(), out.segments.end(), [](const Segment& x, const Segment& y) {
    return x.onset != y.onset ? x.onset < y.onset : x.speaker < y.speaker;
  });
  return out;
}

BinaryActivityMatrix frame_targets(const Annotation& ref, double frame_rate_hz, Eigen::Index frames,
                                   const std::vector<std::string>& speaker_order) {
  if (!(frame_rate_hz > 0.0)) throw ArgumentError("frame rate must be positive");
  ref.validate();
  BinaryActivityMatrix out;
  out.values = ActivityValues::Zero(frames, static_cast<Eigen::Index>(speaker_order.size()));
  out.frame_rate_hz = frame_rate_hz;
  out.recording_id = ref.recording_id;
  bool dropped = false;
  for (const auto& seg : ref.segments) {
    const auto it = std::find(speaker_order.begin(), speaker_order.end(), seg.speaker);
    if (it == speaker_order.end()) {
      dropped = true;
      continue;
    }
    const auto s = static_cast<Eigen::Index>(it - speaker_order.begin());
    // Frames whose centre lies in [onset, end): t >= onset*rate - 0.5 and t < end*rate - 0.5.
    const auto first = static_cast<Eigen::Index>(std::max(0.0, std::ceil(seg.onset * frame_rate_hz - 0.5)));
    const auto last = std::min<Eigen::Index>(
        frames, static_cast<Eigen::Index>(std::ceil(seg.end() * frame_rate_hz - 0.5)));
    for (Eigen::Index t = first; t < last; ++t) out.values(t, s) = 1;
  }
  if (dropped) {
    std::cerr << "warning: recording '" << ref.recording_id
              << "': segments of speakers outside the requested order were dropped\n";
  }
  return out;
}

Annotation activity_to_annotation(const BinaryActivityMatrix& activity,
                                  std::vector<std::string> speaker_labels) {
  activity.validate();
  if (speaker_labels.empty()) {
    for (Eigen::Index s = 0; s < activity.speakers(); ++s) speaker_labels.push_back("spk" + std::to_string(s));
  }
  if (static_cast<Eigen::Index>(speaker_labels.size()) != activity.speakers()) {
    throw ArgumentError("speaker label count does not match the activity matrix");
  }
  Annotation out;
  out.recording_id = activity.recording_id;
  const double step = 1.0 / activity.frame_rate_hz;
  for (Eigen::Index s = 0; s < activity.speakers(); ++s) {
    Eigen::Index t = 0;
    while (t < activity.frames()) {
      if (!activity.values(t, s)) {
        ++t;
        continue;
      }
      Eigen::Index end = t;
      while (end < activity.frames() && activity.values(end, s)) ++end;
      const double onset = static_cast<double>(t) * step;
      out.segments.push_back({speaker_labels[static_cast<std::size_t>(s)], onset,
                              static_cast<double>(end) * step - onset});
      t = end;
    }
  }
  std::stable_sort(out.segments.begin(), out.segments.end(), [](const Segment& x, const Segment& y) {
    return x.onset != y.onset ? x.onset < y.onset : x.speaker < y.speaker;
  });
  return out;
}

Permutation align_to_reference(const FrameScoreMatrix& probs_in, const BinaryActivityMatrix& targets,
                               double epsilon) {
  check_epsilon(epsilon);
  FrameScoreMatrix probs = to_probabilities(probs_in);
  if (probs.space == Space::kPowerset) probs = power_to_mult(probs);
  if (probs.frames() != targets.frames()) throw ContractError("scores and targets differ in length");
  const Eigen::Index n = std::max(probs.dims(), targets.speakers());
  Matrix cost = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      double c = 0.0;
      for (Eigen::Index t = 0; t < probs.frames(); ++t) {
        const double p = clamp_probability(j < probs.dims() ? probs.values(t, j) : 0.0, epsilon);
        const bool y = i < targets.speakers() && targets.values(t, i);
        c -= y ? std::log(p) : std::log1p(-p);
      }
      cost(i, j) = c;
    }
  }
  return best_column_permutation(cost);
}

BinaryActivityMatrix aligned_targets(const FrameScoreMatrix& probs,
                                     const BinaryActivityMatrix& targets, double epsilon) {
  const Permutation perm = align_to_reference(probs, targets, epsilon);
  BinaryActivityMatrix out;
  out.values = ActivityValues::Zero(targets.frames(), probs.num_speakers);
  out.frame_rate_hz = targets.frame_rate_hz;
  out.recording_id = targets.recording_id;
  bool dropped = false;
  for (std::size_t i = 0; i < perm.size(); ++i) {
    const auto ref_col = static_cast<Eigen::Index>(i);
    if (ref_col >= targets.speakers()) continue;
    if (perm[i] >= probs.num_speakers) {
      dropped = dropped || targets.values.col(ref_col).any();
      continue;
    }
    out.values.col(perm[i]) = targets.values.col(ref_col);
  }
  if (dropped) {
    std::cerr << "warning: recording '" << targets.recording_id
              << "': reference has more active speakers than the scores; extra speakers dropped\n";
  }
  return out;
}

double BceTotals::mean() const {
  if (count == 0) throw ContractError("BCE over zero frames");
  return loss_sum / static_cast<double>(count);
}

BceTotals& BceTotals::operator+=(const BceTotals& other) {
  loss_sum += other.loss_sum;
  count += other.count;
  return *this;
}

BceTotals bce_totals(const FrameScoreMatrix& probs_in, const BinaryActivityMatrix& targets,
                     double epsilon) {
  check_epsilon(epsilon);
  FrameScoreMatrix probs = to_probabilities(probs_in);
  if (probs.space == Space::kPowerset) probs = power_to_mult(probs);
  if (probs.frames() != targets.frames() || probs.dims() != targets.speakers()) {
    throw ContractError("BCE needs scores and targets of the same shape");
  }
  BceTotals totals;
  for (Eigen::Index s = 0; s < probs.dims(); ++s) {
    for (Eigen::Index t = 0; t < probs.frames(); ++t) {
      const double p = clamp_probability(probs.values(t, s), epsilon);
      totals.loss_sum -= targets.values(t, s) ? std::log(p) : std::log1p(-p);
    }
  }
  totals.count = probs.values.size();
  return totals;
}

double compute_bce(const FrameScoreMatrix& probs, const BinaryActivityMatrix& targets,
                   double epsilon) {
  return bce_totals(probs, targets, epsilon).mean();
}

double DerReport::miss_pct() const { return safe_pct(miss_s, scored_speech_s); }
double DerReport::false_alarm_pct() const { return safe_pct(false_alarm_s, scored_speech_s); }
double DerReport::confusion_pct() const { return safe_pct(confusion_s, scored_speech_s); }
double DerReport::der_pct() const { return miss_pct() + false_alarm_pct() + confusion_pct(); }

DerReport& DerReport::operator+=(const DerReport& other) {
  miss_s += other.miss_s;
  false_alarm_s += other.false_alarm_s;
  confusion_s += other.confusion_s;
  scored_speech_s += other.scored_speech_s;
  collar_s = other.collar_s;
  mapping.insert(mapping.end(), other.mapping.begin(), other.mapping.end());
  return *this;
}

Matrix speaker_overlap_matrix(const Annotation& ref, const Annotation& hyp, const DerOptions& options) {
  return overlap_matrix(build_timeline(ref, hyp, options));
}

DerReport der_totals(const Annotation& ref, const Annotation& hyp, const DerOptions& options) {
  const Timeline tl = build_timeline(ref, hyp, options);
  const Matrix overlap = overlap_matrix(tl);

  // Maximize mapped overlap == minimize its negation.
  std::vector<int> map(tl.ref_speakers.size(), -1);
  if (overlap.size() > 0) map = hungarian_min_cost(-overlap);

  DerReport report;
  report.collar_s = options.collar_s;
  for (std::size_t r = 0; r < map.size(); ++r) {
    if (map[r] >= 0 && overlap(static_cast<Eigen::Index>(r), map[r]) > 0.0) {
      report.mapping.emplace_back(tl.ref_speakers[r], tl.hyp_speakers[static_cast<std::size_t>(map[r])]);
    }
  }
  for (std::size_t k = 0; k < tl.intervals(); ++k) {
    if (!tl.scored[k]) continue;
    const double d = tl.length(k);
    int n_ref = 0;
    int n_hyp = 0;
    int n_correct = 0;
    for (std::size_t r = 0; r < tl.ref_speakers.size(); ++r) {
      if (!tl.ref_active[r][k]) continue;
      ++n_ref;
      if (map[r] >= 0 && tl.hyp_active[static_cast<std::size_t>(map[r])][k]) ++n_correct;
    }
    for (const auto& h : tl.hyp_active) n_hyp += h[k];
    report.scored_speech_s += n_ref * d;
    report.miss_s += std::max(0, n_ref - n_hyp) * d;
    report.false_alarm_s += std::max(0, n_hyp - n_ref) * d;
    report.confusion_s += (std::min(n_ref, n_hyp) - n_correct) * d;
  }
  return report;
}

DerReport compute_der(const Annotation& ref, const Annotation& hyp, const DerOptions& options) {
  DerReport report = der_totals(ref, hyp, options);
  if (!(report.scored_speech_s > 0.0)) {
    throw ContractError("DER undefined for recording '" + ref.recording_id +
                        "': no scored reference speech");
  }
  return report;
}

}  // namespace diacal
