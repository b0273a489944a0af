// Copyright 2026 The MGE Authors.
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

#include "mge/common.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mge {

double sup_norm(std::span<const double> values) {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

double sup_norm(const Matrix& m) { return sup_norm(m.data()); }

double sup_norm_diff(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorKind::kDimensionMismatch,
                "sup_norm_diff: sizes " + std::to_string(a.size()) + " and " +
                    std::to_string(b.size()) + " differ");
  }
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

double sup_norm_diff(const Matrix& a, const Matrix& b) {
  if (!a.same_shape(b)) {
    throw Error(ErrorKind::kDimensionMismatch, "sup_norm_diff: matrix shapes differ");
  }
  return sup_norm_diff(a.data(), b.data());
}

ProductIndexer::ProductIndexer(std::vector<std::size_t> sizes) : sizes_(std::move(sizes)) {
  strides_.assign(sizes_.size(), 1);
  count_ = 1;
  for (std::size_t k = sizes_.size(); k-- > 0;) {
    strides_[k] = count_;
    if (sizes_[k] != 0 && count_ > std::numeric_limits<std::size_t>::max() / sizes_[k]) {
      throw Error(ErrorKind::kInvalidArgument, "product index space overflows size_t");
    }
    count_ *= sizes_[k];
  }
}

std::size_t ProductIndexer::flat(std::span<const std::size_t> components) const {
  if (components.size() != sizes_.size()) {
    throw Error(ErrorKind::kDimensionMismatch,
                "expected " + std::to_string(sizes_.size()) + " components, got " +
                    std::to_string(components.size()));
  }
  std::size_t f = 0;
  for (std::size_t k = 0; k < sizes_.size(); ++k) {
    if (components[k] >= sizes_[k]) {
      throw Error(ErrorKind::kOutOfRange, "component " + std::to_string(k) + " = " +
                                              std::to_string(components[k]) +
                                              " out of range [0, " +
                                              std::to_string(sizes_[k]) + ")");
    }
    f += components[k] * strides_[k];
  }
  return f;
}

std::vector<std::size_t> ProductIndexer::components(std::size_t flat) const {
  if (flat >= count_) {
    throw Error(ErrorKind::kOutOfRange, "flat index " + std::to_string(flat) +
                                            " out of range [0, " + std::to_string(count_) +
                                            ")");
  }
  std::vector<std::size_t> c(sizes_.size());
  for (std::size_t k = 0; k < sizes_.size(); ++k) c[k] = (flat / strides_[k]) % sizes_[k];
  return c;
}

}  // namespace mge
