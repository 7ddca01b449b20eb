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

#include "diacal/report.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <sstream>

namespace diacal {
namespace {

constexpr std::array<const char*, 8> kHeader = {"condition", "method", "strategy", "MS",
                                                "FA",        "SC",     "DER",      "BCE"};

std::array<std::string, 8> cells(const ReportRow& r) {
  return {r.condition,
          r.method,
          r.strategy,
          format_fixed3(r.der.miss_pct()),
          format_fixed3(r.der.false_alarm_pct()),
          format_fixed3(r.der.confusion_pct()),
          format_fixed3(r.der.der_pct()),
          format_fixed3(r.bce)};
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string format_fixed3(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3f", value);
  return buf;
}

std::vector<ReportRow> sorted_rows(std::vector<ReportRow> rows) {
  std::stable_sort(rows.begin(), rows.end(), [](const ReportRow& a, const ReportRow& b) {
    return a.condition != b.condition ? a.condition < b.condition : a.method < b.method;
  });
  return rows;
}

std::string format_report_text(const std::vector<ReportRow>& rows) {
  std::vector<std::array<std::string, 8>> table;
  table.reserve(rows.size() + 1);
  std::array<std::string, 8> header;
  for (std::size_t i = 0; i < kHeader.size(); ++i) header[i] = kHeader[i];
  table.push_back(header);
  for (const auto& r : rows) table.push_back(cells(r));

  std::array<std::size_t, 8> width{};
  for (const auto& row : table) {
    for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());
  }
  std::ostringstream out;
  for (const auto& row : table) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      // Text columns left-aligned, numbers right-aligned.
      const std::string pad(width[i] - row[i].size(), ' ');
      out << (i < 3 ? row[i] + pad : pad + row[i]);
      out << (i + 1 < row.size() ? "  " : "\n");
    }
  }
  return out.str();
}

std::string format_report_csv(const std::vector<ReportRow>& rows) {
  std::ostringstream out;
  for (std::size_t i = 0; i < kHeader.size(); ++i) out << kHeader[i] << (i + 1 < kHeader.size() ? "," : "\n");
  for (const auto& r : rows) {
    const auto c = cells(r);
    for (std::size_t i = 0; i < c.size(); ++i) out << csv_escape(c[i]) << (i + 1 < c.size() ? "," : "\n");
  }
  return out.str();
}

}  // namespace diacal
