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

#include <cstdint>
#include <cstdio>
#include <string>

#include <Eigen/Core>

namespace diacal::detail {

/// FNV-1a 64-bit over raw bytes; stable across runs for identical input.
class Fingerprint {
 public:
  void add_bytes(const void* data, std::size_t size) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < size; ++i) {
      hash_ ^= p[i];
      hash_ *= 0x100000001b3ULL;
    }
  }

  template <typename Derived>
  void add(const Eigen::DenseBase<Derived>& m) {
    const auto evaluated = m.eval();
    const std::int64_t dims[2] = {static_cast<std::int64_t>(evaluated.rows()),
                                  static_cast<std::int64_t>(evaluated.cols())};
    add_bytes(dims, sizeof(dims));
    add_bytes(evaluated.data(), sizeof(typename Derived::Scalar) * evaluated.size());
  }

  std::string hex() const {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash_));
    return buf;
  }

 private:
  std::uint64_t hash_ = 0xcbf29ce484222325ULL;
};

}  // namespace diacal::detail
