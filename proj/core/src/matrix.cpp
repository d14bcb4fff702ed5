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

#include "ttfs/matrix.hpp"

#include <cmath>
#include <utility>

#include "ttfs/error.hpp"

namespace ttfs {

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols,
                         std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    throw DimensionError("matrix data length does not match rows*cols");
  }
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

bool DenseMatrix::all_finite() const {
  for (double v : data_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

Vector matvec(const DenseMatrix& m, const Vector& v) {
  if (v.size() != m.cols()) {
    throw DimensionError("matvec: vector length does not match matrix cols");
  }
  Vector out(m.rows(), 0.0);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    double acc = 0.0;
    const double* row = m.data().data() + r * m.cols();
    for (std::size_t c = 0; c < m.cols(); ++c) acc += row[c] * v[c];
    out[r] = acc;
  }
  return out;
}

Vector matvec_transposed(const DenseMatrix& m, const Vector& v) {
  if (v.size() != m.rows()) {
    throw DimensionError(
        "matvec_transposed: vector length does not match matrix rows");
  }
  Vector out(m.cols(), 0.0);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const double* row = m.data().data() + r * m.cols();
    const double s = v[r];
    for (std::size_t c = 0; c < m.cols(); ++c) out[c] += row[c] * s;
  }
  return out;
}

Vector row_sums(const DenseMatrix& m) {
  Vector out(m.rows(), 0.0);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    double acc = 0.0;
    for (std::size_t c = 0; c < m.cols(); ++c) acc += m(r, c);
    out[r] = acc;
  }
  return out;
}

double trace(const DenseMatrix& m) {
  if (!m.square()) throw DimensionError("trace: matrix is not square");
  double acc = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i) acc += m(i, i);
  return acc;
}

double frobenius_norm(const DenseMatrix& m) {
  double acc = 0.0;
  for (double v : m.data()) acc += v * v;
  return std::sqrt(acc);
}

double max_abs(const DenseMatrix& m) {
  double best = 0.0;
  for (double v : m.data()) best = std::max(best, std::fabs(v));
  return best;
}

DenseMatrix scaled(const DenseMatrix& m, double factor) {
  DenseMatrix out = m;
  for (double& v : out.data()) v *= factor;
  return out;
}

double dot(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw DimensionError("dot: length mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double l2_norm(const Vector& v) { return std::sqrt(dot(v, v)); }

}  // namespace ttfs
