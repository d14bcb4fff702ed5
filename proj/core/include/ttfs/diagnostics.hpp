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

#ifndef TTFS_DIAGNOSTICS_H_
#define TTFS_DIAGNOSTICS_H_

#include <iosfwd>

#include "ttfs/ann.hpp"
#include "ttfs/eigen.hpp"
#include "ttfs/network.hpp"

namespace ttfs {

// Eigenvalue spectra of the per-layer spike-time Jacobians (1/B) W. Layers
// that are not square are skipped with a note. The spike mask is left out by
// default; pass a trace to apply it.
struct SpectrumReport {
  std::vector<ComplexSpectrum> spectra;
  std::vector<double> spectral_radii;
  std::vector<double> fraction_outside_unit_circle;
  BoolVector skipped_non_square;
  std::vector<int> nonpositive_slope_counts;
};

SpectrumReport jacobian_spectrum_report(const Network& net,
                                        const ForwardTrace* mask_trace = nullptr);

void write_spectrum_csv(const SpectrumReport& report, std::ostream& os);
void write_spectrum_json(const SpectrumReport& report, std::ostream& os);

// L2 norms of dL/dt per layer plus a geometric growth-rate estimate across
// depth (> 1: the norm grows toward the input; < 1: it decays).
struct GradientNormProfile {
  std::vector<double> norms;     // layer order, input-most first
  double growth_rate = 1.0;
};

GradientNormProfile gradient_norm_profile(
    const std::vector<Vector>& spike_time_grads);

// Cosine between flattened vectors; 1 if both are zero, 0 if exactly one is.
double cosine_similarity(const Vector& a, const Vector& b);

// Per-layer cosine between the mapped SNN weights W/B and the ANN weights w.
std::vector<double> weight_cosine_similarity(const Network& net,
                                             const AnnNetwork& ann);

// Per-step record of a dual-track training run.
struct TrajectoryRow {
  long step = 0;
  double snn_loss = 0.0;
  double ann_loss = 0.0;
  double snn_accuracy = 0.0;
  double ann_accuracy = 0.0;
  std::vector<double> cosines;

  double cosine_mean() const;
};

struct TrajectoryReport {
  std::vector<TrajectoryRow> rows;
};

void write_trajectory_csv(const TrajectoryReport& report, std::ostream& os);

}  // namespace ttfs

#endif  // TTFS_DIAGNOSTICS_H_
