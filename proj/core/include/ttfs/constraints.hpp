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

#ifndef TTFS_CONSTRAINTS_H_
#define TTFS_CONSTRAINTS_H_

#include <random>
#include <utility>

#include "ttfs/ann.hpp"
#include "ttfs/network.hpp"

namespace ttfs {

// Hardware-deployment perturbation settings. Zero / 100 values leave the
// corresponding constraint disabled.
struct QuantSpec {
  int time_steps = 0;        // spike-time grid points per layer window
  int weight_bits = 0;       // q; weights stored on [-2^(q-1), 2^(q-1)-1]
  double percentile_low = 1.0;
  double percentile_high = 99.0;
  double jitter_sd = 0.0;    // time units
  double latency_percentile = 100.0;

  bool any_enabled() const {
    return time_steps > 0 || weight_bits > 0 || jitter_sd > 0.0 ||
           latency_percentile < 100.0;
  }
  void validate() const;
};

// Linear-interpolation percentile of a sample (values copied and sorted).
double percentile(Vector values, double pct);

// Adds N(0, sd^2) to every spike time, clamps into [t_min, t_max] and
// recomputes flags: spikes landing at t_max become forced, spikes pushed
// below t_min are clamped and marked low-saturated.
SpikeVector add_spike_jitter(const SpikeVector& spikes, double sd,
                             double t_min, double t_max,
                             std::mt19937_64& rng);

// Snaps fired spikes to the nearest of `steps` uniform grid points (bin
// centers) on [t_min, t_max]; times below t_min are clipped at t_min first.
// Forced spikes stay pinned at t_max.
SpikeVector quantize_times(const SpikeVector& spikes, int steps, double t_min,
                           double t_max);

// Per-tensor uniform quantizer grid: value = lo + level * step with
// level in [0, 2^bits - 1], stored as the signed integer level - 2^(bits-1).
struct WeightQuantScale {
  double lo = 0.0;
  double step = 0.0;
  int bits = 0;
  bool degenerate = false;  // all-equal tensor; quantization is a passthrough

  int min_int() const { return -(1 << (bits - 1)); }
  int max_int() const { return (1 << (bits - 1)) - 1; }
};

// Grid from the empirical distribution of the tensor, clipped to the given
// percentile range.
WeightQuantScale weight_quant_scale(const DenseMatrix& weights, int bits,
                                    double pct_low, double pct_high);

DenseMatrix apply_weight_quantization(const DenseMatrix& weights,
                                      const WeightQuantScale& scale);

// Signed integer level of one weight on the grid.
int quantized_level(double weight, const WeightQuantScale& scale);

// Clip to the percentile range, quantize uniformly to 2^bits levels, return
// the dequantized tensor used in the forward pass plus the grid metadata.
std::pair<DenseMatrix, WeightQuantScale> quantize_weights(
    const DenseMatrix& weights, int bits, double pct_low = 1.0,
    double pct_high = 99.0);

// Activation values of every hidden layer over a batch, concatenated across
// samples; input to the percentile-based window sizing.
std::vector<Vector> collect_activation_values(const AnnNetwork& ann,
                                              const std::vector<Vector>& batch);

// Shrinks every window to contain the given percentile of the ReLU
// activation outputs (activations above the cut clip at t_min), re-chains
// the windows and recomputes thresholds. The adaptive t_max rule must be
// disabled while the reduced windows are in use.
void reduce_latency(Network& net, double pct,
                    const std::vector<Vector>& activation_values,
                    double min_width = 1e-3);

// Double-exponential synapse filter configuration; the linear coding regime
// requires every per-layer span to stay well inside the rise time tau_1.
struct DoubleExpConfig {
  double tau_1 = 1.0;
  double tau_2 = 2.0;

  void validate() const;  // tau_2 >= 2 tau_1 > 0
};

struct DoubleExpReport {
  bool pass = false;
  double max_span = 0.0;           // max over layers of t_max(n) - t_min(n-1)
  std::size_t binding_layer = 0;   // layer attaining the max span
  double min_admissible_tau_1 = 0.0;  // 2 * max_span
  double margin = 0.0;             // 0.5 * tau_1 - max_span
};

// Checks max_n [t_max(n) - t_min(n-1)] <= 0.5 * tau_1 over all hidden
// layers (spans measured from the opening of the previous window, which is
// the earliest possible input spike of the layer).
DoubleExpReport check_double_exp_validity(const Network& net,
                                          const DoubleExpConfig& config);

}  // namespace ttfs

#endif  // TTFS_CONSTRAINTS_H_
