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

#include "diacal/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <zlib.h>

#include "diacal/error.hpp"

namespace diacal {
namespace {

bool is_gzip(const std::filesystem::path& path) { return path.extension() == ".gz"; }

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start < text.size()) {
    const std::size_t nl = text.find('\n', start);
    const std::size_t end = nl == std::string_view::npos ? text.size() : nl;
    out.push_back(text.substr(start, end - start));
    if (nl == std::string_view::npos) break;
    start = nl + 1;
  }
  return out;
}

double parse_double(std::string_view token, std::size_t line, const char* what) {
  double v = 0.0;
  const auto* first = token.data();
  const auto* last = token.data() + token.size();
  if (!token.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v)) {
    throw ParseError("malformed " + std::string(what) + " '" + std::string(token) + "'", line);
  }
  return v;
}

long parse_long(std::string_view token, std::size_t line, const char* what) {
  long v = 0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    throw ParseError("malformed " + std::string(what) + " '" + std::string(token) + "'", line);
  }
  return v;
}

std::string fixed3(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

double quantize3(double v) { return std::strtod(fixed3(v).c_str(), nullptr); }

}  // namespace

std::string read_text_file(const std::filesystem::path& path) {
  if (is_gzip(path)) {
    gzFile f = gzopen(path.string().c_str(), "rb");
    if (!f) throw Error("cannot open '" + path.string() + "' for reading");
    std::string out;
    char buf[1 << 16];
    int n = 0;
    while ((n = gzread(f, buf, sizeof(buf))) > 0) out.append(buf, static_cast<std::size_t>(n));
    const bool failed = n < 0;
    gzclose(f);
    if (failed) throw Error("corrupt gzip stream in '" + path.string() + "'");
    return out;
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  if (is_gzip(path)) {
    gzFile f = gzopen(path.string().c_str(), "wb");
    if (!f) throw Error("cannot open '" + path.string() + "' for writing");
    const bool ok = content.empty() ||
                    gzwrite(f, content.data(), static_cast<unsigned>(content.size())) ==
                        static_cast<int>(content.size());
    if (gzclose(f) != Z_OK || !ok) throw Error("failed writing '" + path.string() + "'");
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error("failed writing '" + path.string() + "'");
}

std::vector<Annotation> parse_rttm(std::string_view text) {
  std::vector<Annotation> out;
  std::map<std::string, std::size_t, std::less<>> index;
  const auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    const auto tok = split_ws(lines[i]);
    if (tok.empty() || tok[0].front() == ';' || tok[0].front() == '#') continue;
    if (tok[0] != "SPEAKER") {
      std::cerr << "warning: skipping RTTM line " << line_no << " of type '" << tok[0] << "'\n";
      continue;
    }
    if (tok.size() < 8) throw ParseError("RTTM SPEAKER line has too few fields", line_no);
    const double onset = parse_double(tok[3], line_no, "onset");
    const double duration = parse_double(tok[4], line_no, "duration");
    if (onset < 0.0 || duration < 0.0) throw ParseError("negative onset or duration", line_no);
    const std::string rec(tok[1]);
    auto it = index.find(rec);
    if (it == index.end()) {
      it = index.emplace(rec, out.size()).first;
      out.push_back(Annotation{rec, {}});
    }
    if (duration == 0.0) {
      std::cerr << "warning: skipping zero-length RTTM segment on line " << line_no << "\n";
      continue;
    }
    out[it->second].segments.push_back({std::string(tok[7]), onset, duration});
  }
  for (auto& a : out) a = merge_segments(a);
  return out;
}

std::vector<Annotation> read_rttm(const std::filesystem::path& path) {
  return parse_rttm(read_text_file(path));
}

std::string format_rttm(std::span<const Annotation> annotations) {
  std::string out;
  for (const auto& a : annotations) {
    std::vector<Segment> segs = a.segments;
    std::stable_sort(segs.begin(), segs.end(), [](const Segment& x, const Segment& y) {
      return x.onset != y.onset ? x.onset < y.onset : x.speaker < y.speaker;
    });
    for (const auto& s : segs) {
      out += "SPEAKER " + a.recording_id + " 1 " + fixed3(s.onset) + " " + fixed3(s.duration) +
             " <NA> <NA> " + s.speaker + " <NA> <NA>\n";
    }
  }
  return out;
}

void write_rttm(std::span<const Annotation> annotations, const std::filesystem::path& path) {
  write_text_file(path, format_rttm(annotations));
}

Annotation canonicalize_annotation(const Annotation& a) {
  Annotation q;
  q.recording_id = a.recording_id;
  for (const auto& s : a.segments) {
    const double d = quantize3(s.duration);
    if (d > 0.0) q.segments.push_back({s.speaker, quantize3(s.onset), d});
  }
  Annotation merged = merge_segments(q);
  for (auto& s : merged.segments) {
    s.onset = quantize3(s.onset);
    s.duration = quantize3(s.duration);
  }
  return merged;
}

ScoreFile parse_scores(std::string_view text) {
  const auto lines = split_lines(text);
  if (lines.empty() || split_ws(lines[0]).size() != 2 ||
      lines[0].substr(0, kScoreMagic.size()) != kScoreMagic) {
    throw ParseError("missing '" + std::string(kScoreMagic) + "' header", 1);
  }
  if (lines.size() < 2) throw ParseError("missing score header fields", 2);

  std::map<std::string, std::string, std::less<>> kv;
  for (auto token : split_ws(lines[1])) {
    const auto eq = token.find('=');
    if (eq == std::string_view::npos) throw ParseError("header token without '='", 2);
    kv[std::string(token.substr(0, eq))] = std::string(token.substr(eq + 1));
  }
  const auto field = [&](const char* key) -> const std::string& {
    const auto it = kv.find(key);
    if (it == kv.end()) throw ParseError(std::string("score header lacks '") + key + "'", 2);
    return it->second;
  };

  ScoreFile file;
  FrameScoreMatrix& m = file.scores;
  const long frames = parse_long(field("frames"), 2, "frames");
  const long speakers = parse_long(field("speakers"), 2, "speakers");
  if (frames < 0 || speakers < 1) throw ParseError("invalid frames/speakers in header", 2);
  m.num_speakers = static_cast<int>(speakers);
  m.frame_rate_hz = parse_double(field("rate_hz"), 2, "rate_hz");
  if (!(m.frame_rate_hz > 0.0)) throw ParseError("rate_hz must be positive", 2);
  m.kind = parse_score_kind(field("kind"));
  m.space = parse_space(field("space"));
  file.system_id = field("system");
  m.recording_id = field("recording");
  const int dims = space_dimension(m.space, m.num_speakers);

  m.values.resize(frames, dims);
  std::size_t row = 0;
  for (std::size_t i = 2; i < lines.size(); ++i) {
    const auto tok = split_ws(lines[i]);
    if (tok.empty()) continue;
    if (row >= static_cast<std::size_t>(frames)) {
      throw ParseError("more data lines than frames=" + std::to_string(frames), i + 1);
    }
    if (tok.size() != static_cast<std::size_t>(dims)) {
      throw ParseError("expected " + std::to_string(dims) + " columns, found " +
                           std::to_string(tok.size()),
                       i + 1);
    }
    for (int c = 0; c < dims; ++c) {
      m.values(static_cast<Eigen::Index>(row), c) = parse_double(tok[static_cast<std::size_t>(c)], i + 1, "score");
    }
    ++row;
  }
  if (row != static_cast<std::size_t>(frames)) {
    throw ParseError("found " + std::to_string(row) + " data lines, header says " + std::to_string(frames));
  }
  try {
    m.validate(kSimplexTolerance);
  } catch (const ContractError& e) {
    throw ParseError(std::string("invalid scores: ") + e.what());
  }
  return file;
}

ScoreFile read_scores(const std::filesystem::path& path) {
  try {
    return parse_scores(read_text_file(path));
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

std::string format_scores(const FrameScoreMatrix& m, std::string_view system_id) {
  m.validate(kSimplexTolerance);
  std::string out(kScoreMagic);
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", m.frame_rate_hz);
  out += "\nframes=" + std::to_string(m.frames()) + " speakers=" + std::to_string(m.num_speakers) +
         " rate_hz=" + buf + " kind=" + (m.kind == ScoreKind::kProbability ? "prob" : "logit") +
         " space=" + (m.space == Space::kMultilabel ? "mult" : "power") +
         " system=" + std::string(system_id) + " recording=" + m.recording_id + "\n";
  out.reserve(out.size() + static_cast<std::size_t>(m.values.size()) * 24);
  for (Eigen::Index t = 0; t < m.frames(); ++t) {
    for (Eigen::Index c = 0; c < m.dims(); ++c) {
      std::snprintf(buf, sizeof(buf), "%.17g", m.values(t, c));
      out += buf;
      out += c + 1 < m.dims() ? ' ' : '\n';
    }
  }
  return out;
}

void write_scores(const FrameScoreMatrix& m, std::string_view system_id,
                  const std::filesystem::path& path) {
  write_text_file(path, format_scores(m, system_id));
}

}  // namespace diacal
