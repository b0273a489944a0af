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

#ifndef MGE_COMMON_HPP_
#define MGE_COMMON_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mge {

enum class ErrorKind {
  kInvalidArgument,
  kParse,
  kValidation,
  kDimensionMismatch,
  kOutOfRange,
  kIo,
  kUnsupported,
};

// All library failures are reported through this exception type. The C API
// maps `kind()` onto its status codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

// Probability mass tolerance used for kernel rows and initial distributions.
inline constexpr double kProbTolerance = 1e-12;
// Row-sum tolerance for Boltzmann policy tables.
inline constexpr double kPolicyTolerance = 1e-10;

using ValueTable = std::vector<double>;

// Dense row-major matrix of doubles. Rows are joint states (or cells) and
// columns are actions throughout the library.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  bool same_shape(const Matrix& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Exact sup norm over all entries.
double sup_norm(std::span<const double> values);
double sup_norm(const Matrix& m);
// max |a - b| over all entries; throws kDimensionMismatch on shape mismatch.
double sup_norm_diff(std::span<const double> a, std::span<const double> b);
double sup_norm_diff(const Matrix& a, const Matrix& b);

// Row-major linearization of a product of finite index ranges, first factor
// outermost. Used for joint states and joint actions alike.
class ProductIndexer {
 public:
  ProductIndexer() = default;
  explicit ProductIndexer(std::vector<std::size_t> sizes);

  std::size_t count() const { return count_; }
  std::size_t factors() const { return sizes_.size(); }
  const std::vector<std::size_t>& sizes() const { return sizes_; }

  std::size_t flat(std::span<const std::size_t> components) const;
  std::vector<std::size_t> components(std::size_t flat) const;
  // Component `factor` of flat index `flat`, without materializing the rest.
  std::size_t component(std::size_t flat, std::size_t factor) const {
    return (flat / strides_[factor]) % sizes_[factor];
  }
  std::size_t stride(std::size_t factor) const { return strides_[factor]; }

 private:
  std::vector<std::size_t> sizes_;
  std::vector<std::size_t> strides_;
  std::size_t count_ = 0;
};

}  // namespace mge

#endif  // MGE_COMMON_HPP_
