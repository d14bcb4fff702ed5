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

#ifndef TTFS_EIGEN_H_
#define TTFS_EIGEN_H_

#include <complex>
#include <vector>

#include "ttfs/matrix.hpp"

namespace ttfs {

// Eigenvalues of a real square matrix, sorted by descending modulus.
// Ties are broken by descending real part, then descending imaginary part,
// so the ordering is deterministic.
struct ComplexSpectrum {
  std::vector<std::complex<double>> values;

  std::size_t size() const { return values.size(); }
};

// Full eigenvalue spectrum of a general real square matrix.
//
// Diagonal balancing, Householder reduction to upper Hessenberg form, then
// the implicitly shifted double QR iteration. Complex conjugate pairs are
// recovered from the 2x2 blocks of the quasi-triangular limit. Throws
// DimensionError for non-square input, DomainError for non-finite entries
// and ConvergenceError when the iteration budget (100 * n sweeps) runs out.
ComplexSpectrum eig_spectrum(const DenseMatrix& m);

// Largest eigenvalue modulus of a square matrix; 0 for an empty matrix.
double spectral_radius(const DenseMatrix& m);

}  // namespace ttfs

#endif  // TTFS_EIGEN_H_
