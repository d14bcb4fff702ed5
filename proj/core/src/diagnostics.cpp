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

#include "ttfs/diagnostics.hpp"

#include <cmath>
#include <ostream>

#include "json.hpp"
#include "ttfs/error.hpp"

namespace ttfs {

SpectrumReport jacobian_spectrum_report(const Network& net,
                                        const ForwardTrace* mask_trace) {
  SpectrumReport report;
  const std::size_t depth = net.depth();
  report.spectra.resize(depth);
  report.spectral_radii.assign(depth, 0.0);
  report.fraction_outside_unit_circle.assign(depth, 0.0);
  report.skipped_non_square.assign(depth, 0);
  report.nonpositive_slope_counts.assign(depth, 0);
  for (std::size_t n = 0; n < depth; ++n) {
    const SnnLayer& layer = net.layers[n];
    for (std::size_t i = 0; i < layer.out_size(); ++i) {
      if (!(layer.slope_at_threshold_of(i) > 0.0)) {
        ++report.nonpositive_slope_counts[n];
      }
    }
    if (!layer.weights.square()) {
      report.skipped_non_square[n] = 1;
      continue;
    }
    DenseMatrix j(layer.out_size(), layer.in_size());
    for (std::size_t i = 0; i < layer.out_size(); ++i) {
      const bool masked_out =
          mask_trace != nullptr &&
          !mask_trace->layers[n].output.mask[i];
      if (masked_out) continue;
      const double inv_b = 1.0 / layer.slope_at_threshold_of(i);
      for (std::size_t k = 0; k < layer.in_size(); ++k) {
        j(i, k) = layer.weights(i, k) * inv_b;
      }
    }
    report.spectra[n] = eig_spectrum(j);
    std::size_t outside = 0;
    for (const std::complex<double>& lambda : report.spectra[n].values) {
      if (std::abs(lambda) > 1.0) ++outside;
    }
    report.spectral_radii[n] =
        report.spectra[n].values.empty()
            ? 0.0
            : std::abs(report.spectra[n].values.front());
    report.fraction_outside_unit_circle[n] =
        report.spectra[n].values.empty()
            ? 0.0
            : static_cast<double>(outside) /
                  static_cast<double>(report.spectra[n].size());
  }
  return report;
}

void write_spectrum_csv(const SpectrumReport& report, std::ostream& os) {
  os << "layer,eigenvalue_index,real,imag,modulus\n";
  for (std::size_t n = 0; n < report.spectra.size(); ++n) {
    if (report.skipped_non_square[n]) continue;
    const auto& values = report.spectra[n].values;
    for (std::size_t k = 0; k < values.size(); ++k) {
      os << n << ',' << k << ',' << values[k].real() << ',' << values[k].imag()
         << ',' << std::abs(values[k]) << '\n';
    }
  }
}

void write_spectrum_json(const SpectrumReport& report, std::ostream& os) {
  nlohmann::json j;
  j["layers"] = nlohmann::json::array();
  for (std::size_t n = 0; n < report.spectra.size(); ++n) {
    nlohmann::json layer;
    layer["layer"] = n;
    layer["skipped_non_square"] = static_cast<bool>(report.skipped_non_square[n]);
    layer["spectral_radius"] = report.spectral_radii[n];
    layer["fraction_outside_unit_circle"] =
        report.fraction_outside_unit_circle[n];
    layer["nonpositive_slope_count"] = report.nonpositive_slope_counts[n];
    j["layers"].push_back(layer);
  }
  os << j.dump(2) << '\n';
}

GradientNormProfile gradient_norm_profile(
    const std::vector<Vector>& spike_time_grads) {
  GradientNormProfile profile;
  profile.norms.reserve(spike_time_grads.size());
  for (const Vector& g : spike_time_grads) profile.norms.push_back(l2_norm(g));
  // Geometric mean of the backward amplification per layer, estimated from
  // the endpoints of the log-norm profile.
  if (profile.norms.size() >= 2) {
    const double first = profile.norms.front();
    const double last = profile.norms.back();
    if (first > 0.0 && last > 0.0) {
      profile.growth_rate =
          std::pow(first / last,
                   1.0 / static_cast<double>(profile.norms.size() - 1));
    } else if (first == 0.0 && last > 0.0) {
      profile.growth_rate = 0.0;
    }
  }
  return profile;
}

double cosine_similarity(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) {
    throw DimensionError("cosine_similarity: length mismatch");
  }
  const double na = l2_norm(a);
  const double nb = l2_norm(b);
  if (na == 0.0 && nb == 0.0) return 1.0;
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot(a, b) / (na * nb);
}

std::vector<double> weight_cosine_similarity(const Network& net,
                                             const AnnNetwork& ann) {
  if (net.depth() != ann.depth()) {
    throw DimensionError("weight_cosine_similarity: depth mismatch");
  }
  std::vector<double> cosines(net.depth());
  for (std::size_t n = 0; n < net.depth(); ++n) {
    const SnnLayer& layer = net.layers[n];
    if (layer.weights.rows() != ann.hidden[n].weights.rows() ||
        layer.weights.cols() != ann.hidden[n].weights.cols()) {
      throw DimensionError("weight_cosine_similarity: layer shape mismatch");
    }
    Vector mapped(layer.weights.size());
    for (std::size_t i = 0; i < layer.out_size(); ++i) {
      const double inv_b = 1.0 / layer.slope_at_threshold_of(i);
      for (std::size_t j = 0; j < layer.in_size(); ++j) {
        mapped[i * layer.in_size() + j] = layer.weights(i, j) * inv_b;
      }
    }
    cosines[n] = cosine_similarity(mapped, ann.hidden[n].weights.data());
  }
  return cosines;
}

double TrajectoryRow::cosine_mean() const {
  if (cosines.empty()) return 1.0;
  double acc = 0.0;
  for (double c : cosines) acc += c;
  return acc / static_cast<double>(cosines.size());
}

void write_trajectory_csv(const TrajectoryReport& report, std::ostream& os) {
  const std::size_t layers =
      report.rows.empty() ? 0 : report.rows.front().cosines.size();
  os << "step,snn_loss,ann_loss,snn_accuracy,ann_accuracy,cosine_mean";
  for (std::size_t n = 0; n < layers; ++n) os << ",cosine_" << n;
  os << '\n';
  for (const TrajectoryRow& row : report.rows) {
    os << row.step << ',' << row.snn_loss << ',' << row.ann_loss << ','
       << row.snn_accuracy << ',' << row.ann_accuracy << ','
       << row.cosine_mean();
    for (double c : row.cosines) os << ',' << c;
    os << '\n';
  }
}

}  // namespace ttfs
