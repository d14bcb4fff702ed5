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

#include "ttfs/eigen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ttfs/error.hpp"

namespace ttfs {
namespace {

double sign_of(double magnitude, double sign_source) {
  return sign_source >= 0.0 ? std::fabs(magnitude) : -std::fabs(magnitude);
}

// Diagonal similarity scaling (Parlett-Reinsch, powers of 2) to reduce the
// norm imbalance between rows and columns. The permutation phase is omitted;
// deflation in the QR sweep takes care of reducible matrices.
void balance(DenseMatrix& a) {
  const std::size_t n = a.rows();
  constexpr double kRadix = 2.0;
  constexpr double kRadixSq = kRadix * kRadix;
  bool done = false;
  while (!done) {
    done = true;
    for (std::size_t i = 0; i < n; ++i) {
      double r = 0.0, c = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        c += std::fabs(a(j, i));
        r += std::fabs(a(i, j));
      }
      if (c == 0.0 || r == 0.0) continue;
      double g = r / kRadix;
      double f = 1.0;
      const double s = c + r;
      while (c < g) {
        f *= kRadix;
        c *= kRadixSq;
      }
      g = r * kRadix;
      while (c > g) {
        f /= kRadix;
        c /= kRadixSq;
      }
      if ((c + r) / f < 0.95 * s) {
        done = false;
        const double inv_f = 1.0 / f;
        for (std::size_t j = 0; j < n; ++j) a(i, j) *= inv_f;
        for (std::size_t j = 0; j < n; ++j) a(j, i) *= f;
      }
    }
  }
}

// Householder reduction to upper Hessenberg form, in place.
void hessenberg(DenseMatrix& a) {
  const std::size_t n = a.rows();
  if (n < 3) return;
  Vector v(n, 0.0);
  for (std::size_t k = 0; k + 2 < n; ++k) {
    double sigma_sq = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) sigma_sq += a(i, k) * a(i, k);
    const double sigma = std::sqrt(sigma_sq);
    if (sigma == 0.0) continue;
    const double alpha = a(k + 1, k) >= 0.0 ? -sigma : sigma;
    v[k + 1] = a(k + 1, k) - alpha;
    for (std::size_t i = k + 2; i < n; ++i) v[i] = a(i, k);
    double beta = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) beta += v[i] * v[i];
    if (beta == 0.0) continue;
    const double two_over_beta = 2.0 / beta;
    // Left multiply by P = I - (2/beta) v v^T.
    for (std::size_t j = k; j < n; ++j) {
      double s = 0.0;
      for (std::size_t i = k + 1; i < n; ++i) s += v[i] * a(i, j);
      s *= two_over_beta;
      for (std::size_t i = k + 1; i < n; ++i) a(i, j) -= s * v[i];
    }
    // Right multiply by P.
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t j = k + 1; j < n; ++j) s += a(i, j) * v[j];
      s *= two_over_beta;
      for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= s * v[j];
    }
    a(k + 1, k) = alpha;
    for (std::size_t i = k + 2; i < n; ++i) a(i, k) = 0.0;
  }
}

// Francis double-shift QR on an upper Hessenberg matrix; eigenvalues only.
// Follows the classic EISPACK formulation, with an explicit epsilon in the
// deflation tests and a global sweep budget of 100 * n.
std::vector<std::complex<double>> hessenberg_qr(DenseMatrix& a) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(a.rows());
  std::vector<std::complex<double>> eigenvalues;
  eigenvalues.reserve(n);
  constexpr double kEps = std::numeric_limits<double>::epsilon();

  double anorm = 0.0;
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    for (std::ptrdiff_t j = std::max<std::ptrdiff_t>(i - 1, 0); j < n; ++j) {
      anorm += std::fabs(a(i, j));
    }
  }

  std::ptrdiff_t nn = n - 1;
  std::ptrdiff_t budget = 100 * n;
  double t = 0.0;
  while (nn >= 0) {
    std::ptrdiff_t its = 0;
    std::ptrdiff_t l = 0;
    for (;;) {
      // Look for a single small subdiagonal element.
      for (l = nn; l >= 1; --l) {
        double s = std::fabs(a(l - 1, l - 1)) + std::fabs(a(l, l));
        if (s == 0.0) s = anorm;
        if (std::fabs(a(l, l - 1)) <= kEps * s) {
          a(l, l - 1) = 0.0;
          break;
        }
      }
      if (l < 0) l = 0;
      double x = a(nn, nn);
      if (l == nn) {
        eigenvalues.emplace_back(x + t, 0.0);
        --nn;
        break;
      }
      double y = a(nn - 1, nn - 1);
      double w = a(nn, nn - 1) * a(nn - 1, nn);
      if (l == nn - 1) {
        double p = 0.5 * (y - x);
        double q = p * p + w;
        double z = std::sqrt(std::fabs(q));
        x += t;
        if (q >= 0.0) {
          z = p + sign_of(z, p);
          const double r1 = x + z;
          const double r2 = (z != 0.0) ? x - w / z : r1;
          eigenvalues.emplace_back(r1, 0.0);
          eigenvalues.emplace_back(r2, 0.0);
        } else {
          eigenvalues.emplace_back(x + p, z);
          eigenvalues.emplace_back(x + p, -z);
        }
        nn -= 2;
        break;
      }
      if (budget-- <= 0) {
        throw ConvergenceError("eig_spectrum: QR sweep budget exhausted");
      }
      if (its == 10 || its == 20) {
        // Exceptional shift.
        t += x;
        for (std::ptrdiff_t i = 0; i <= nn; ++i) a(i, i) -= x;
        const double s =
            std::fabs(a(nn, nn - 1)) + std::fabs(a(nn - 1, nn - 2));
        y = x = 0.75 * s;
        w = -0.4375 * s * s;
      }
      ++its;
      // Look for two consecutive small subdiagonal elements.
      std::ptrdiff_t m;
      double p = 0.0, q = 0.0, r = 0.0, z = 0.0;
      for (m = nn - 2; m >= l; --m) {
        z = a(m, m);
        r = x - z;
        double s = y - z;
        p = (r * s - w) / a(m + 1, m) + a(m, m + 1);
        q = a(m + 1, m + 1) - z - r - s;
        r = a(m + 2, m + 1);
        s = std::fabs(p) + std::fabs(q) + std::fabs(r);
        p /= s;
        q /= s;
        r /= s;
        if (m == l) break;
        const double u = std::fabs(a(m, m - 1)) * (std::fabs(q) + std::fabs(r));
        const double v = std::fabs(p) * (std::fabs(a(m - 1, m - 1)) +
                                         std::fabs(z) +
                                         std::fabs(a(m + 1, m + 1)));
        if (u <= kEps * v) break;
      }
      for (std::ptrdiff_t i = m + 2; i <= nn; ++i) {
        a(i, i - 2) = 0.0;
        if (i != m + 2) a(i, i - 3) = 0.0;
      }
      // Double QR step on rows l..nn, columns m..nn.
      for (std::ptrdiff_t k = m; k <= nn - 1; ++k) {
        const bool notlast = (k != nn - 1);
        if (k != m) {
          p = a(k, k - 1);
          q = a(k + 1, k - 1);
          r = notlast ? a(k + 2, k - 1) : 0.0;
          x = std::fabs(p) + std::fabs(q) + std::fabs(r);
          if (x == 0.0) continue;
          p /= x;
          q /= x;
          r /= x;
        }
        double s = sign_of(std::sqrt(p * p + q * q + r * r), p);
        if (s == 0.0) continue;
        if (k == m) {
          if (l != m) a(k, k - 1) = -a(k, k - 1);
        } else {
          a(k, k - 1) = -s * x;
        }
        p += s;
        x = p / s;
        y = q / s;
        z = r / s;
        q /= p;
        r /= p;
        for (std::ptrdiff_t j = k; j <= nn; ++j) {
          double pj = a(k, j) + q * a(k + 1, j);
          if (notlast) {
            pj += r * a(k + 2, j);
            a(k + 2, j) -= pj * z;
          }
          a(k + 1, j) -= pj * y;
          a(k, j) -= pj * x;
        }
        const std::ptrdiff_t mmin = std::min(nn, k + 3);
        for (std::ptrdiff_t i = l; i <= mmin; ++i) {
          double pi = x * a(i, k) + y * a(i, k + 1);
          if (notlast) {
            pi += z * a(i, k + 2);
            a(i, k + 2) -= pi * r;
          }
          a(i, k + 1) -= pi * q;
          a(i, k) -= pi;
        }
      }
    }
  }
  return eigenvalues;
}

}  // namespace

ComplexSpectrum eig_spectrum(const DenseMatrix& m) {
  if (!m.square()) {
    throw DimensionError("eig_spectrum: matrix is not square");
  }
  if (!m.all_finite()) {
    throw DomainError("eig_spectrum: matrix has non-finite entries");
  }
  ComplexSpectrum spectrum;
  const std::size_t n = m.rows();
  if (n == 0) return spectrum;
  if (n == 1) {
    spectrum.values.emplace_back(m(0, 0), 0.0);
    return spectrum;
  }
  DenseMatrix work = m;
  balance(work);
  hessenberg(work);
  spectrum.values = hessenberg_qr(work);
  std::sort(spectrum.values.begin(), spectrum.values.end(),
            [](const std::complex<double>& a, const std::complex<double>& b) {
              const double ma = std::abs(a), mb = std::abs(b);
              if (ma != mb) return ma > mb;
              if (a.real() != b.real()) return a.real() > b.real();
              return a.imag() > b.imag();
            });
  return spectrum;
}

double spectral_radius(const DenseMatrix& m) {
  const ComplexSpectrum spectrum = eig_spectrum(m);
  if (spectrum.values.empty()) return 0.0;
  return std::abs(spectrum.values.front());
}

}  // namespace ttfs
