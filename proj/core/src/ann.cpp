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

#include "ttfs/ann.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ttfs/error.hpp"
#include "ttfs/forward.hpp"

namespace ttfs {

AnnNetwork snn_to_ann(const Network& net) {
  AnnNetwork ann;
  ann.hidden.reserve(net.depth());
  for (const SnnLayer& layer : net.layers) {
    AnnLayer out;
    const double width_over_tau = layer.width() / net.config.tau_c;
    if (layer.alpha_policy == AlphaPolicy::kLinearlyMappable) {
      out.weights = layer.weights;
      out.biases.resize(layer.out_size());
      for (std::size_t i = 0; i < layer.out_size(); ++i) {
        out.biases[i] = -layer.threshold(i) + width_over_tau;
      }
    } else {
      out.weights = DenseMatrix(layer.out_size(), layer.in_size());
      out.biases.resize(layer.out_size());
      for (std::size_t i = 0; i < layer.out_size(); ++i) {
        const double b_i = layer.slope_at_threshold_of(i);
        if (!(b_i > 0.0)) {
          throw InvalidSlopeError(
              "snn_to_ann: slope-at-threshold <= 0 for neuron " +
              std::to_string(i));
        }
        for (std::size_t j = 0; j < layer.in_size(); ++j) {
          out.weights(i, j) = layer.weights(i, j) / b_i;
        }
        out.biases[i] = -layer.threshold(i) / b_i + width_over_tau;
      }
    }
    ann.hidden.push_back(std::move(out));
  }
  ann.output.weights = net.output.weights;
  ann.output.biases.resize(net.output.out_size());
  const double read_width_over_tau =
      (net.output.t_read - net.output.t_min) / net.config.tau_c;
  for (std::size_t m = 0; m < net.output.out_size(); ++m) {
    ann.output.biases[m] = net.output.alpha[m] * read_width_over_tau;
  }
  return ann;
}

Network ann_to_snn(const AnnNetwork& ann, AlphaPolicy policy,
                   const std::vector<Vector>& alpha,
                   const std::vector<WindowSpec>& windows, double tau_c) {
  if (windows.size() != ann.depth()) {
    throw DimensionError("ann_to_snn: one window per hidden layer required");
  }
  if (policy == AlphaPolicy::kConstantAlpha && alpha.size() != ann.depth()) {
    throw DimensionError("ann_to_snn: one alpha vector per hidden layer required");
  }
  Network net;
  net.config.tau_c = tau_c;
  net.layers.reserve(ann.depth());
  for (std::size_t n = 0; n < ann.depth(); ++n) {
    const AnnLayer& src = ann.hidden[n];
    SnnLayer layer;
    layer.alpha_policy = policy;
    layer.t_min = windows[n].t_min;
    layer.t_max = windows[n].t_max;
    const double width_over_tau = layer.width() / tau_c;
    const std::size_t n_out = src.out_size();
    layer.threshold_shift.resize(n_out);
    layer.base_threshold.resize(n_out);
    if (policy == AlphaPolicy::kLinearlyMappable) {
      layer.weights = src.weights;
      for (std::size_t i = 0; i < n_out; ++i) {
        layer.base_threshold[i] = width_over_tau;
        // theta = width/tau_c - b, split as base + shift with shift = -b.
        layer.threshold_shift[i] = -src.biases[i];
      }
    } else {
      layer.alpha = alpha[n];
      if (layer.alpha.size() != n_out) {
        throw DimensionError("ann_to_snn: alpha vector size mismatch");
      }
      layer.weights = DenseMatrix(n_out, src.in_size());
      for (std::size_t i = 0; i < n_out; ++i) {
        double w_row_sum = 0.0;
        for (std::size_t j = 0; j < src.in_size(); ++j) {
          w_row_sum += src.weights(i, j);
        }
        const double denom = 1.0 - w_row_sum;
        const double b_i = layer.alpha[i] / denom;
        if (!(b_i > 0.0)) {
          throw InfeasibleMappingError(
              "ann_to_snn: implied slope-at-threshold is not positive for "
              "neuron " +
              std::to_string(i) + " (row sum of w is " +
              std::to_string(w_row_sum) + ")");
        }
        for (std::size_t j = 0; j < src.in_size(); ++j) {
          layer.weights(i, j) = b_i * src.weights(i, j);
        }
        layer.base_threshold[i] = b_i * width_over_tau;
        layer.threshold_shift[i] = -b_i * src.biases[i];
      }
    }
    net.layers.push_back(std::move(layer));
  }
  net.output.weights = ann.output.weights;
  net.output.alpha.resize(ann.output.out_size());
  if (!net.layers.empty()) {
    net.output.t_min = net.layers.back().t_min;
    net.output.t_read = net.layers.back().t_max;
  } else {
    net.output.t_min = net.config.input_t_min();
    net.output.t_read = net.config.input_t_max();
  }
  const double read_width = net.output.t_read - net.output.t_min;
  for (std::size_t m = 0; m < ann.output.out_size(); ++m) {
    net.output.alpha[m] = ann.output.biases[m] * tau_c / read_width;
  }
  return net;
}

ReluForwardResult relu_forward(const AnnNetwork& ann, const Vector& x) {
  ReluForwardResult result;
  result.activations.reserve(ann.depth());
  const Vector* current = &x;
  for (const AnnLayer& layer : ann.hidden) {
    Vector a = matvec(layer.weights, *current);
    for (std::size_t i = 0; i < a.size(); ++i) {
      a[i] = std::max(0.0, a[i] + layer.biases[i]);
    }
    result.activations.push_back(std::move(a));
    current = &result.activations.back();
  }
  result.logits = matvec(ann.output.weights, *current);
  for (std::size_t m = 0; m < result.logits.size(); ++m) {
    result.logits[m] += ann.output.biases[m];
  }
  return result;
}

EquivalenceReport check_equivalence(const Network& net, const AnnNetwork& ann,
                                    const std::vector<Vector>& batch,
                                    double tolerance) {
  if (net.depth() != ann.depth()) {
    throw DimensionError("check_equivalence: depth mismatch");
  }
  for (std::size_t n = 0; n < net.depth(); ++n) {
    if (net.layers[n].out_size() != ann.hidden[n].out_size() ||
        net.layers[n].in_size() != ann.hidden[n].in_size()) {
      throw DimensionError("check_equivalence: layer shape mismatch");
    }
  }
  EquivalenceReport report;
  report.tolerance = tolerance;
  report.per_layer_max_residual.assign(net.depth(), 0.0);
  const double tau_c = net.config.tau_c;
  for (const Vector& x : batch) {
    const ForwardTrace trace = network_forward(x, net);
    const ReluForwardResult relu = relu_forward(ann, x);
    for (std::size_t n = 0; n < net.depth(); ++n) {
      const LayerTrace& layer = trace.layers[n];
      const double t_max = net.layers[n].t_max;
      for (std::size_t i = 0; i < layer.output.size(); ++i) {
        const double residual = std::fabs(relu.activations[n][i] * tau_c -
                                          (t_max - layer.output.times[i]));
        report.per_layer_max_residual[n] =
            std::max(report.per_layer_max_residual[n], residual);
      }
    }
    std::size_t argmax = 0;
    for (std::size_t m = 0; m < relu.logits.size(); ++m) {
      if (relu.logits[m] > relu.logits[argmax]) argmax = m;
      report.logit_max_diff =
          std::max(report.logit_max_diff,
                   std::fabs(relu.logits[m] - trace.output_potentials[m]));
    }
    const double snn_loss =
        softmax_cross_entropy(trace.output_potentials, argmax).loss;
    const double ann_loss = softmax_cross_entropy(relu.logits, argmax).loss;
    report.loss_max_diff =
        std::max(report.loss_max_diff, std::fabs(snn_loss - ann_loss));
  }
  report.pass = report.logit_max_diff <= tolerance &&
                report.loss_max_diff <= tolerance;
  for (double r : report.per_layer_max_residual) {
    if (r > tolerance) report.pass = false;
  }
  return report;
}

}  // namespace ttfs
