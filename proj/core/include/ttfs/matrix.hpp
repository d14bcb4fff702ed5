// Copyright 2026 The ttfsnet Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef TTFS_MATRIX_H_
#define TTFS_MATRIX_H_

#include <cstddef>
#include <cstdint>
#include <vector>

namespace ttfs {

using Vector = std::vector<double>;
using BoolVector = std::vector<std::uint8_t>;

// Dense row-major matrix of 64-bit reals. The only numeric storage type used
// by the library; kept deliberately small.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  // Takes ownership of `data`; throws DimensionError unless
  // data.size() == rows * cols.
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  static DenseMatrix identity(std::size_t n);

  double& operator()(std::size_t r, std::size_t c) {
    return data_[r * cols_ + c];
  }
  double operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool square() const { return rows_ == cols_; }
  bool all_finite() const;

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  bool operator==(const DenseMatrix& other) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// m * v
Vector matvec(const DenseMatrix& m, const Vector& v);
// m^T * v
Vector matvec_transposed(const DenseMatrix& m, const Vector& v);
Vector row_sums(const DenseMatrix& m);
double trace(const DenseMatrix& m);
double frobenius_norm(const DenseMatrix& m);
double max_abs(const DenseMatrix& m);
DenseMatrix scaled(const DenseMatrix& m, double factor);

double dot(const Vector& a, const Vector& b);
double l2_norm(const Vector& v);

}  // namespace ttfs

#endif  // TTFS_MATRIX_H_
