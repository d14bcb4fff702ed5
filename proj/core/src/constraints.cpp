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

#include "ttfs/constraints.hpp"

#include <algorithm>
#include <cmath>

#include "ttfs/error.hpp"
#include "ttfs/scheduler.hpp"

namespace ttfs {

void QuantSpec::validate() const {
  if (time_steps != 0 && time_steps < 2) {
    throw ConfigError("QuantSpec: time_steps must be >= 2 when enabled");
  }
  if (weight_bits != 0 && weight_bits < 2) {
    throw ConfigError("QuantSpec: weight_bits must be >= 2 when enabled");
  }
  if (!(percentile_low >= 0.0 && percentile_high <= 100.0 &&
        percentile_low < percentile_high)) {
    throw ConfigError("QuantSpec: percentile clip range invalid");
  }
  if (!(jitter_sd >= 0.0)) {
    throw ConfigError("QuantSpec: jitter_sd must be >= 0");
  }
  if (!(latency_percentile > 0.0 && latency_percentile <= 100.0)) {
    throw ConfigError("QuantSpec: latency_percentile must be in (0, 100]");
  }
}

double percentile(Vector values, double pct) {
  if (values.empty()) throw DomainError("percentile: empty sample");
  if (!(pct >= 0.0 && pct <= 100.0)) {
    throw DomainError("percentile: pct outside [0, 100]");
  }
  std::sort(values.begin(), values.end());
  const double rank = pct / 100.0 * static_cast<double>(values.size() - 1);
  const std::size_t lower = static_cast<std::size_t>(std::floor(rank));
  const std::size_t upper = std::min(lower + 1, values.size() - 1);
  const double frac = rank - static_cast<double>(lower);
  return values[lower] + frac * (values[upper] - values[lower]);
}

SpikeVector add_spike_jitter(const SpikeVector& spikes, double sd,
                             double t_min, double t_max,
                             std::mt19937_64& rng) {
  if (!(sd >= 0.0)) throw DomainError("add_spike_jitter: sd must be >= 0");
  if (sd == 0.0) return spikes;
  std::normal_distribution<double> noise(0.0, sd);
  SpikeVector out = spikes;
  for (std::size_t i = 0; i < out.size(); ++i) {
    double t = out.times[i] + noise(rng);
    if (t >= t_max) {
      out.times[i] = t_max;
      out.mask[i] = 0;
      out.saturated_low[i] = 0;
    } else if (t < t_min) {
      out.times[i] = t_min;
      out.mask[i] = 1;
      out.saturated_low[i] = 1;
    } else {
      out.times[i] = t;
      out.mask[i] = 1;
      out.saturated_low[i] = 0;
    }
  }
  return out;
}

SpikeVector quantize_times(const SpikeVector& spikes, int steps, double t_min,
                           double t_max) {
  if (steps < 2) throw DomainError("quantize_times: steps must be >= 2");
  const double width = t_max - t_min;
  const double bin = width / static_cast<double>(steps);
  SpikeVector out = spikes;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!out.mask[i]) continue;  // forced spikes stay pinned at t_max
    double t = out.times[i];
    if (t < t_min) {
      out.times[i] = t_min;
      out.saturated_low[i] = 1;
      continue;
    }
    int level = static_cast<int>(std::floor((t - t_min) / bin));
    level = std::clamp(level, 0, steps - 1);
    out.times[i] = t_min + (static_cast<double>(level) + 0.5) * bin;
  }
  return out;
}

WeightQuantScale weight_quant_scale(const DenseMatrix& weights, int bits,
                                    double pct_low, double pct_high) {
  if (bits < 2) throw DomainError("weight_quant_scale: bits must be >= 2");
  WeightQuantScale scale;
  scale.bits = bits;
  scale.lo = percentile(weights.data(), pct_low);
  const double hi = percentile(weights.data(), pct_high);
  const double range = hi - scale.lo;
  if (range <= 0.0) {
    scale.degenerate = true;
    scale.step = 0.0;
    return scale;
  }
  scale.step = range / static_cast<double>((1 << bits) - 1);
  return scale;
}

int quantized_level(double weight, const WeightQuantScale& scale) {
  if (scale.degenerate) return 0;
  const int levels = 1 << scale.bits;
  int level =
      static_cast<int>(std::lround((weight - scale.lo) / scale.step));
  level = std::clamp(level, 0, levels - 1);
  return level - (1 << (scale.bits - 1));
}

DenseMatrix apply_weight_quantization(const DenseMatrix& weights,
                                      const WeightQuantScale& scale) {
  if (scale.degenerate) return weights;
  DenseMatrix out(weights.rows(), weights.cols());
  const int offset = 1 << (scale.bits - 1);
  for (std::size_t k = 0; k < weights.size(); ++k) {
    const int level = quantized_level(weights.data()[k], scale) + offset;
    out.data()[k] = scale.lo + static_cast<double>(level) * scale.step;
  }
  return out;
}

std::pair<DenseMatrix, WeightQuantScale> quantize_weights(
    const DenseMatrix& weights, int bits, double pct_low, double pct_high) {
  const WeightQuantScale scale =
      weight_quant_scale(weights, bits, pct_low, pct_high);
  return {apply_weight_quantization(weights, scale), scale};
}

std::vector<Vector> collect_activation_values(
    const AnnNetwork& ann, const std::vector<Vector>& batch) {
  std::vector<Vector> values(ann.depth());
  for (const Vector& x : batch) {
    const ReluForwardResult fwd = relu_forward(ann, x);
    for (std::size_t n = 0; n < ann.depth(); ++n) {
      values[n].insert(values[n].end(), fwd.activations[n].begin(),
                       fwd.activations[n].end());
    }
  }
  return values;
}

void reduce_latency(Network& net, double pct,
                    const std::vector<Vector>& activation_values,
                    double min_width) {
  if (!(pct > 0.0 && pct <= 100.0)) {
    throw DomainError("reduce_latency: percentile must be in (0, 100]");
  }
  if (activation_values.size() != net.depth()) {
    throw DimensionError(
        "reduce_latency: one activation sample per hidden layer required");
  }
  std::vector<double> widths(net.depth());
  for (std::size_t n = 0; n < net.depth(); ++n) {
    const double cut = percentile(activation_values[n], pct);
    widths[n] =
        std::max(net.config.tau_c * cut * (1.0 + 1e-12), min_width);
  }
  rebuild_windows(net, widths);
}

void DoubleExpConfig::validate() const {
  if (!(tau_1 > 0.0) || !(tau_2 >= 2.0 * tau_1)) {
    throw ConfigError("DoubleExpConfig: requires tau_2 >= 2 tau_1 > 0");
  }
}

DoubleExpReport check_double_exp_validity(const Network& net,
                                          const DoubleExpConfig& config) {
  config.validate();
  DoubleExpReport report;
  double prev_t_min = net.config.input_t_min();
  for (std::size_t n = 0; n < net.depth(); ++n) {
    const double span = net.layers[n].t_max - prev_t_min;
    if (n == 0 || span > report.max_span) {
      report.max_span = span;
      report.binding_layer = n;
    }
    prev_t_min = net.layers[n].t_min;
  }
  report.min_admissible_tau_1 = 2.0 * report.max_span;
  report.margin = 0.5 * config.tau_1 - report.max_span;
  report.pass = report.margin >= 0.0;
  return report;
}

}  // namespace ttfs
