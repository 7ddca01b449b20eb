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
#include <vector>

#include "diacal/evaluation.hpp"

namespace diacal {

/// One evaluated configuration.
struct ReportRow {
  std::string condition;  // free-form label, e.g. the config name
  std::string method;     // fusion method
  std::string strategy;   // calibration strategy / ordering summary
  DerReport der;
  double bce = 0.0;
};

/// Rows stably sorted by (condition, method).
std::vector<ReportRow> sorted_rows(std::vector<ReportRow> rows);

/// Fixed-width plain-text table, 3 decimals. Columns: condition, method,
/// strategy, MS, FA, SC, DER, BCE. An empty input yields the header only.
std::string format_report_text(const std::vector<ReportRow>& rows);

/// Same content as CSV with a header row.
std::string format_report_csv(const std::vector<ReportRow>& rows);

/// "%.3f".
std::string format_fixed3(double value);

}  // namespace diacal
