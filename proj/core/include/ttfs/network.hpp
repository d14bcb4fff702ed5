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

#ifndef TTFS_NETWORK_H_
#define TTFS_NETWORK_H_

#include <cstdint>
#include <cstddef>
#include <vector>

#include "ttfs/matrix.hpp"

namespace ttfs {

// How the ramp weight alpha_i of a layer is chosen.
//
// kLinearlyMappable ties alpha_i = 1 - sum_j W_ij so that the
// slope-at-threshold B_i is identically 1 and SNN weights coincide with the
// weights of the equivalent ReLU network. kConstantAlpha keeps alpha as a
// free per-neuron constant; B_i then depends on the weight row and must stay
// positive.
enum class AlphaPolicy : std::uint8_t {
  kLinearlyMappable = 0,
  kConstantAlpha = 1,
};

struct NetworkConfig {
  // Conversion parameter translating unit-free values into time units.
  double tau_c = 1.0;

  double input_t_min() const { return 0.0; }
  // The input coding window is [0, tau_c]: x = 1 spikes at 0, x = 0 at tau_c.
  double input_t_max() const { return tau_c; }
};

// One hidden spiking layer. Weights W and the threshold shift D are the
// trainable parameters; the base threshold and the coding window
// [t_min, t_max] are owned by the window scheduler.
struct SnnLayer {
  DenseMatrix weights;     // W, out_size x in_size
  Vector threshold_shift;  // D, trainable, threshold = base + shift
  Vector base_threshold;   // theta_tilde, scheduler-owned
  AlphaPolicy alpha_policy = AlphaPolicy::kLinearlyMappable;
  Vector alpha;  // per-neuron ramp weight, used only under kConstantAlpha
  double t_min = 0.0;
  double t_max = 1.0;

  std::size_t out_size() const { return weights.rows(); }
  std::size_t in_size() const { return weights.cols(); }
  double width() const { return t_max - t_min; }
  double threshold(std::size_t i) const {
    return base_threshold[i] + threshold_shift[i];
  }
  // Policy-resolved ramp weight of neuron i.
  double alpha_of(std::size_t i) const;
  // Slope of the potential at threshold crossing, in units of 1/tau_c:
  // B_i = alpha_i + sum_k W_ik. Exactly 1.0 under kLinearlyMappable.
  double slope_at_threshold_of(std::size_t i) const;

  // Throws unless t_max > t_min, all thresholds are positive and (under
  // kConstantAlpha) all slopes-at-threshold are positive.
  void validate() const;
};

// Non-spiking read-out layer. Potentials integrate the last hidden layer's
// spikes plus a ramp of weight alpha starting at t_min (the opening of the
// last hidden window); integration stops at t_read (its closing).
struct OutputLayer {
  DenseMatrix weights;
  Vector alpha;
  double t_min = 0.0;
  double t_read = 1.0;

  std::size_t out_size() const { return weights.rows(); }
  std::size_t in_size() const { return weights.cols(); }
};

// At-most-one spike per neuron; mask[i] is true iff the spike fired strictly
// before t_max (forced emissions carry mask false and sit exactly at t_max).
// saturated_low[i] marks spikes clamped at t_min because the closed-form
// candidate fell before the window opened.
struct SpikeVector {
  Vector times;
  BoolVector mask;
  BoolVector saturated_low;

  SpikeVector() = default;
  explicit SpikeVector(std::size_t n)
      : times(n, 0.0), mask(n, 1), saturated_low(n, 0) {}

  std::size_t size() const { return times.size(); }
};

// Per-layer record of one forward pass: the layer's input and output spikes
// plus the closed-form numerator A (time units) and slope-at-threshold B.
// For unmasked, unsaturated spikes, output.times[i] == numerator[i]/slope[i].
struct LayerTrace {
  SpikeVector input;
  SpikeVector output;
  Vector numerator;
  Vector slope;
};

struct ForwardTrace {
  SpikeVector input_spikes;
  std::vector<LayerTrace> layers;
  Vector output_potentials;

  // Spikes feeding the read-out layer.
  const SpikeVector& last_spikes() const {
    return layers.empty() ? input_spikes : layers.back().output;
  }
};

struct Network {
  NetworkConfig config;
  std::vector<SnnLayer> layers;
  OutputLayer output;

  std::size_t depth() const { return layers.size(); }
  // Read-out time of the final layer; the classification latency.
  double latency() const { return output.t_read; }

  // Checks layer invariants plus window chaining: layer n opens where layer
  // n-1 closes, the first hidden window opens at tau_c, and the read-out
  // integrates over the last hidden window.
  void validate() const;
};

// Slope-at-threshold vector B of a layer. All ones under kLinearlyMappable.
Vector slope_at_threshold(const SnnLayer& layer);

}  // namespace ttfs

#endif  // TTFS_NETWORK_H_
