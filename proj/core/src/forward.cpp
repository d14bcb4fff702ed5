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

#include "ttfs/forward.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ttfs/error.hpp"

namespace ttfs {

SpikeVector encode_ttfs(const Vector& x, const NetworkConfig& config) {
  SpikeVector spikes(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (!(x[j] >= 0.0 && x[j] <= 1.0)) {
      throw DomainError("encode_ttfs: input " + std::to_string(j) +
                        " outside [0, 1]; normalize before encoding");
    }
    spikes.times[j] = config.tau_c * (1.0 - x[j]);
  }
  return spikes;
}

Vector decode_ttfs(const SpikeVector& spikes, double t_max, double tau_c) {
  Vector x(spikes.size(), 0.0);
  for (std::size_t i = 0; i < spikes.size(); ++i) {
    x[i] = spikes.mask[i] ? (t_max - spikes.times[i]) / tau_c : 0.0;
  }
  return x;
}

LayerForwardResult layer_forward(const SpikeVector& input,
                                 const SnnLayer& layer, double tau_c) {
  const std::size_t n_out = layer.out_size();
  if (input.size() != layer.in_size()) {
    throw DimensionError("layer_forward: input size mismatch");
  }
  LayerForwardResult result;
  result.spikes = SpikeVector(n_out);
  result.numerator.resize(n_out);
  result.slope.resize(n_out);
  for (std::size_t i = 0; i < n_out; ++i) {
    const double alpha_i = layer.alpha_of(i);
    const double slope_i = layer.slope_at_threshold_of(i);
    if (!(slope_i > 0.0)) {
      throw InvalidSlopeError(
          "layer_forward: slope-at-threshold <= 0 for neuron " +
          std::to_string(i) + "; spike time undefined");
    }
    double weighted_times = 0.0;
    const double* row = layer.weights.data().data() + i * layer.in_size();
    for (std::size_t j = 0; j < layer.in_size(); ++j) {
      weighted_times += row[j] * input.times[j];
    }
    const double numerator =
        tau_c * layer.threshold(i) + alpha_i * layer.t_min + weighted_times;
    result.numerator[i] = numerator;
    result.slope[i] = slope_i;
    const double candidate = numerator / slope_i;
    if (candidate >= layer.t_max) {
      // Forced emission at the window end; maps to the ReLU zero regime.
      result.spikes.times[i] = layer.t_max;
      result.spikes.mask[i] = 0;
    } else if (candidate < layer.t_min) {
      result.spikes.times[i] = layer.t_min;
      result.spikes.saturated_low[i] = 1;
    } else {
      result.spikes.times[i] = candidate;
    }
  }
  return result;
}

Vector output_potentials(const SpikeVector& input, const OutputLayer& out,
                         double tau_c) {
  if (input.size() != out.in_size()) {
    throw DimensionError("output_potentials: input size mismatch");
  }
  Vector v(out.out_size());
  for (std::size_t m = 0; m < out.out_size(); ++m) {
    double acc = out.alpha[m] * (out.t_read - out.t_min);
    const double* row = out.weights.data().data() + m * out.in_size();
    for (std::size_t j = 0; j < out.in_size(); ++j) {
      acc += row[j] * (out.t_read - input.times[j]);
    }
    v[m] = acc / tau_c;
  }
  return v;
}

ForwardTrace network_forward(const Vector& x, const Network& net) {
  return network_forward(x, net, PerturbationHook());
}

ForwardTrace network_forward(const Vector& x, const Network& net,
                             const PerturbationHook& hook) {
  ForwardTrace trace;
  trace.input_spikes = encode_ttfs(x, net.config);
  if (hook) {
    hook(0, net.config.input_t_min(), net.config.input_t_max(),
         trace.input_spikes);
  }
  const SpikeVector* current = &trace.input_spikes;
  trace.layers.reserve(net.depth());
  for (std::size_t n = 0; n < net.depth(); ++n) {
    const SnnLayer& layer = net.layers[n];
    LayerTrace record;
    record.input = *current;
    LayerForwardResult result = layer_forward(record.input, layer, net.config.tau_c);
    record.output = std::move(result.spikes);
    record.numerator = std::move(result.numerator);
    record.slope = std::move(result.slope);
    if (hook) hook(n + 1, layer.t_min, layer.t_max, record.output);
    trace.layers.push_back(std::move(record));
    current = &trace.layers.back().output;
  }
  trace.output_potentials = output_potentials(*current, net.output, net.config.tau_c);
  return trace;
}

LossAndGrad softmax_cross_entropy(const Vector& v, std::size_t label) {
  if (label >= v.size()) {
    throw DomainError("softmax_cross_entropy: label out of range");
  }
  LossAndGrad out;
  const double vmax = *std::max_element(v.begin(), v.end());
  double denom = 0.0;
  out.grad.resize(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) denom += std::exp(v[k] - vmax);
  for (std::size_t k = 0; k < v.size(); ++k) {
    out.grad[k] = std::exp(v[k] - vmax) / denom;
  }
  out.loss = -(v[label] - vmax - std::log(denom));
  out.grad[label] -= 1.0;
  return out;
}

SpikeVector integrate_potential_oracle(const SpikeVector& input,
                                       const SnnLayer& layer, double tau_c,
                                       double dt) {
  const std::size_t n_out = layer.out_size();
  SpikeVector spikes(n_out);
  double t_start = layer.t_min;
  for (double t : input.times) t_start = std::min(t_start, t);
  for (std::size_t i = 0; i < n_out; ++i) {
    const double alpha_i = layer.alpha_of(i);
    const double theta_i = layer.threshold(i);
    const double* row = layer.weights.data().data() + i * layer.in_size();
    // Phase 1: accumulate the potential up to t_min; no spiking allowed.
    double v = 0.0;
    double t = t_start;
    while (t < layer.t_min) {
      const double step = std::min(dt, layer.t_min - t);
      double slope = 0.0;
      for (std::size_t j = 0; j < layer.in_size(); ++j) {
        if (t > input.times[j]) slope += row[j];
      }
      v += step * slope / tau_c;
      t += step;
    }
    if (v >= theta_i) {
      // Already at threshold when the window opens.
      spikes.times[i] = layer.t_min;
      spikes.saturated_low[i] = 1;
      continue;
    }
    // Phase 2: march to t_max watching for the first upward crossing.
    bool fired = false;
    t = layer.t_min;
    while (t < layer.t_max) {
      const double step = std::min(dt, layer.t_max - t);
      double slope = alpha_i;
      for (std::size_t j = 0; j < layer.in_size(); ++j) {
        if (t > input.times[j]) slope += row[j];
      }
      const double v_next = v + step * slope / tau_c;
      if (v_next >= theta_i && v_next > v) {
        spikes.times[i] = t + step * (theta_i - v) / (v_next - v);
        fired = true;
        break;
      }
      v = v_next;
      t += step;
    }
    if (!fired) {
      spikes.times[i] = layer.t_max;
      spikes.mask[i] = 0;
    }
  }
  return spikes;
}

}  // namespace ttfs
