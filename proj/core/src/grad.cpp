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

#include "ttfs/grad.hpp"

#include <cmath>

#include "ttfs/error.hpp"
#include "ttfs/forward.hpp"

namespace ttfs {
namespace {

// Gradient flows through a spike only if it fired inside the open window:
// forced spikes are pinned at t_max and low-saturated spikes at t_min.
inline bool propagates(const SpikeVector& spikes, std::size_t i) {
  return spikes.mask[i] && !spikes.saturated_low[i];
}

void apply_sgd(DenseMatrix& param, const DenseMatrix& grad, double lr) {
  for (std::size_t k = 0; k < param.size(); ++k) {
    param.data()[k] -= lr * grad.data()[k];
  }
}

void apply_sgd(Vector& param, const Vector& grad, double lr) {
  for (std::size_t k = 0; k < param.size(); ++k) param[k] -= lr * grad[k];
}

void apply_adam(double* param, const double* grad, double* m, double* v,
                std::size_t count, double lr, double bias1, double bias2,
                const AdamConfig& cfg) {
  for (std::size_t k = 0; k < count; ++k) {
    m[k] = cfg.beta1 * m[k] + (1.0 - cfg.beta1) * grad[k];
    v[k] = cfg.beta2 * v[k] + (1.0 - cfg.beta2) * grad[k] * grad[k];
    const double m_hat = m[k] / bias1;
    const double v_hat = v[k] / bias2;
    param[k] -= lr * m_hat / (std::sqrt(v_hat) + cfg.epsilon);
  }
}

}  // namespace

GradientSet GradientSet::zeros_like(const Network& net) {
  GradientSet g;
  g.weight_grads.reserve(net.depth());
  g.shift_grads.reserve(net.depth());
  for (const SnnLayer& layer : net.layers) {
    g.weight_grads.emplace_back(layer.out_size(), layer.in_size());
    g.shift_grads.emplace_back(layer.out_size(), 0.0);
  }
  g.output_weight_grad =
      DenseMatrix(net.output.out_size(), net.output.in_size());
  return g;
}

void GradientSet::add(const GradientSet& other) {
  for (std::size_t n = 0; n < weight_grads.size(); ++n) {
    for (std::size_t k = 0; k < weight_grads[n].size(); ++k) {
      weight_grads[n].data()[k] += other.weight_grads[n].data()[k];
    }
    for (std::size_t k = 0; k < shift_grads[n].size(); ++k) {
      shift_grads[n][k] += other.shift_grads[n][k];
    }
  }
  for (std::size_t k = 0; k < output_weight_grad.size(); ++k) {
    output_weight_grad.data()[k] += other.output_weight_grad.data()[k];
  }
}

void GradientSet::scale(double factor) {
  for (DenseMatrix& g : weight_grads) {
    for (double& v : g.data()) v *= factor;
  }
  for (Vector& g : shift_grads) {
    for (double& v : g) v *= factor;
  }
  for (double& v : output_weight_grad.data()) v *= factor;
}

DenseMatrix layer_jacobian(const LayerTrace& trace, const SnnLayer& layer) {
  DenseMatrix j(layer.out_size(), layer.in_size());
  for (std::size_t i = 0; i < layer.out_size(); ++i) {
    if (!propagates(trace.output, i)) continue;
    const double inv_b = 1.0 / trace.slope[i];
    for (std::size_t k = 0; k < layer.in_size(); ++k) {
      j(i, k) = layer.weights(i, k) * inv_b;
    }
  }
  return j;
}

BackwardResult backward(const ForwardTrace& trace, const Network& net,
                        std::size_t label) {
  BackwardResult result;
  result.grads = GradientSet::zeros_like(net);
  result.spike_time_grads.resize(net.depth());

  const LossAndGrad top = softmax_cross_entropy(trace.output_potentials, label);
  result.loss = top.loss;
  const double tau_c = net.config.tau_c;
  const SpikeVector& last = trace.last_spikes();

  // Read-out weights: dV_m/dW_mj = (t_read - t_j) / tau_c. Forced input
  // spikes sit exactly at t_read, so their contribution vanishes on its own.
  for (std::size_t m = 0; m < net.output.out_size(); ++m) {
    for (std::size_t j = 0; j < net.output.in_size(); ++j) {
      result.grads.output_weight_grad(m, j) =
          top.grad[m] * (net.output.t_read - last.times[j]) / tau_c;
    }
  }
  if (net.depth() == 0) return result;

  // dL/dt for the last hidden layer: dV_m/dt_j = -W_mj / tau_c, gated by the
  // spike mask (pinned spikes are constants).
  Vector grad_t(last.size(), 0.0);
  for (std::size_t j = 0; j < last.size(); ++j) {
    if (!propagates(last, j)) continue;
    double acc = 0.0;
    for (std::size_t m = 0; m < net.output.out_size(); ++m) {
      acc += top.grad[m] * net.output.weights(m, j);
    }
    grad_t[j] = -acc / tau_c;
  }

  for (std::size_t n = net.depth(); n-- > 0;) {
    const SnnLayer& layer = net.layers[n];
    const LayerTrace& record = trace.layers[n];
    result.spike_time_grads[n] = grad_t;

    DenseMatrix& dw = result.grads.weight_grads[n];
    Vector& dd = result.grads.shift_grads[n];
    const bool linearly_mappable =
        layer.alpha_policy == AlphaPolicy::kLinearlyMappable;
    for (std::size_t i = 0; i < layer.out_size(); ++i) {
      if (!propagates(record.output, i)) continue;
      const double g = grad_t[i];
      const double b_i = record.slope[i];
      dd[i] = g * tau_c / b_i;
      if (linearly_mappable) {
        for (std::size_t j = 0; j < layer.in_size(); ++j) {
          dw(i, j) = g * (record.input.times[j] - layer.t_min);
        }
      } else {
        const double t_i = record.output.times[i];
        for (std::size_t j = 0; j < layer.in_size(); ++j) {
          dw(i, j) = g * (record.input.times[j] - t_i) / b_i;
        }
      }
    }

    if (n == 0) break;
    // Chain to the previous layer through the spike-time Jacobian.
    Vector grad_prev(layer.in_size(), 0.0);
    const SpikeVector& prev = trace.layers[n - 1].output;
    for (std::size_t i = 0; i < layer.out_size(); ++i) {
      if (!propagates(record.output, i)) continue;
      const double scaled = grad_t[i] / record.slope[i];
      for (std::size_t j = 0; j < layer.in_size(); ++j) {
        grad_prev[j] += scaled * layer.weights(i, j);
      }
    }
    for (std::size_t j = 0; j < grad_prev.size(); ++j) {
      if (!propagates(prev, j)) grad_prev[j] = 0.0;
    }
    grad_t = std::move(grad_prev);
  }
  return result;
}

std::size_t SwitchingFlags::switching_count() const {
  std::size_t count = 0;
  for (const BoolVector& v : weight) {
    for (std::uint8_t f : v) count += f;
  }
  for (const BoolVector& v : shift) {
    for (std::uint8_t f : v) count += f;
  }
  for (std::uint8_t f : output_weight) count += f;
  return count;
}

namespace {

bool same_pattern(const ForwardTrace& a, const ForwardTrace& b) {
  for (std::size_t n = 0; n < a.layers.size(); ++n) {
    if (a.layers[n].output.mask != b.layers[n].output.mask) return false;
    if (a.layers[n].output.saturated_low != b.layers[n].output.saturated_low) {
      return false;
    }
  }
  return true;
}

}  // namespace

FiniteDiffResult finite_diff_grad(const Network& net, const Vector& x,
                                  std::size_t label, double eps) {
  if (!(eps >= 1e-8 && eps <= 1e-4)) {
    throw DomainError("finite_diff_grad: eps outside [1e-8, 1e-4]");
  }
  FiniteDiffResult result;
  result.grads = GradientSet::zeros_like(net);
  const ForwardTrace base = network_forward(x, net);

  Network probe = net;
  auto probe_loss = [&](ForwardTrace& out) {
    out = network_forward(x, probe);
    return softmax_cross_entropy(out.output_potentials, label).loss;
  };
  auto central = [&](double& param, double& grad_out, std::uint8_t& flag) {
    const double saved = param;
    ForwardTrace plus_trace, minus_trace;
    param = saved + eps;
    const double plus = probe_loss(plus_trace);
    param = saved - eps;
    const double minus = probe_loss(minus_trace);
    param = saved;
    grad_out = (plus - minus) / (2.0 * eps);
    flag = (!same_pattern(base, plus_trace) || !same_pattern(base, minus_trace))
               ? 1
               : 0;
  };

  result.switching.weight.resize(net.depth());
  result.switching.shift.resize(net.depth());
  for (std::size_t n = 0; n < net.depth(); ++n) {
    SnnLayer& layer = probe.layers[n];
    result.switching.weight[n].assign(layer.weights.size(), 0);
    result.switching.shift[n].assign(layer.out_size(), 0);
    for (std::size_t k = 0; k < layer.weights.size(); ++k) {
      central(layer.weights.data()[k], result.grads.weight_grads[n].data()[k],
              result.switching.weight[n][k]);
    }
    for (std::size_t i = 0; i < layer.out_size(); ++i) {
      central(layer.threshold_shift[i], result.grads.shift_grads[n][i],
              result.switching.shift[n][i]);
    }
  }
  result.switching.output_weight.assign(probe.output.weights.size(), 0);
  for (std::size_t k = 0; k < probe.output.weights.size(); ++k) {
    central(probe.output.weights.data()[k],
            result.grads.output_weight_grad.data()[k],
            result.switching.output_weight[k]);
  }
  return result;
}

double mapping_derivative(double slope, double weight) {
  return (slope - weight) / (slope * slope);
}

DenseMatrix predicted_ann_update(const SnnLayer& layer,
                                 const DenseMatrix& weight_grad, double lr) {
  if (layer.alpha_policy != AlphaPolicy::kConstantAlpha) {
    throw PolicyError(
        "predicted_ann_update: the weight map is the identity under the "
        "linearly mappable condition; no biased update to predict");
  }
  if (weight_grad.rows() != layer.weights.rows() ||
      weight_grad.cols() != layer.weights.cols()) {
    throw DimensionError("predicted_ann_update: gradient shape mismatch");
  }
  DenseMatrix delta(weight_grad.rows(), weight_grad.cols());
  for (std::size_t i = 0; i < weight_grad.rows(); ++i) {
    const double b_i = layer.slope_at_threshold_of(i);
    double row_sum = 0.0;
    for (std::size_t k = 0; k < weight_grad.cols(); ++k) {
      row_sum += weight_grad(i, k);
    }
    for (std::size_t j = 0; j < weight_grad.cols(); ++j) {
      delta(i, j) = -lr * (weight_grad(i, j) / b_i -
                           layer.weights(i, j) * row_sum / (b_i * b_i));
    }
  }
  return delta;
}

void sgd_step(Network& net, const GradientSet& grads, double lr) {
  for (std::size_t n = 0; n < net.depth(); ++n) {
    apply_sgd(net.layers[n].weights, grads.weight_grads[n], lr);
    apply_sgd(net.layers[n].threshold_shift, grads.shift_grads[n], lr);
  }
  apply_sgd(net.output.weights, grads.output_weight_grad, lr);
}

AdamState AdamState::zeros_like(const Network& net) {
  AdamState state;
  state.first_moment = GradientSet::zeros_like(net);
  state.second_moment = GradientSet::zeros_like(net);
  return state;
}

void adam_step(Network& net, const GradientSet& grads, AdamState& state,
               double lr, const AdamConfig& config) {
  ++state.step;
  const double bias1 = 1.0 - std::pow(config.beta1, state.step);
  const double bias2 = 1.0 - std::pow(config.beta2, state.step);
  for (std::size_t n = 0; n < net.depth(); ++n) {
    apply_adam(net.layers[n].weights.data().data(),
               grads.weight_grads[n].data().data(),
               state.first_moment.weight_grads[n].data().data(),
               state.second_moment.weight_grads[n].data().data(),
               net.layers[n].weights.size(), lr, bias1, bias2, config);
    apply_adam(net.layers[n].threshold_shift.data(),
               grads.shift_grads[n].data(),
               state.first_moment.shift_grads[n].data(),
               state.second_moment.shift_grads[n].data(),
               net.layers[n].threshold_shift.size(), lr, bias1, bias2, config);
  }
  apply_adam(net.output.weights.data().data(),
             grads.output_weight_grad.data().data(),
             state.first_moment.output_weight_grad.data().data(),
             state.second_moment.output_weight_grad.data().data(),
             net.output.weights.size(), lr, bias1, bias2, config);
}

double lr_schedule(double lr0, long iteration) {
  return lr0 * std::pow(0.9, static_cast<double>(iteration) / 5000.0);
}

AnnGradients ann_zeros_like(const AnnNetwork& ann) {
  AnnGradients g;
  for (const AnnLayer& layer : ann.hidden) {
    g.weight_grads.emplace_back(layer.out_size(), layer.in_size());
    g.bias_grads.emplace_back(layer.out_size(), 0.0);
  }
  g.output_weight_grad =
      DenseMatrix(ann.output.out_size(), ann.output.in_size());
  g.output_bias_grad.assign(ann.output.out_size(), 0.0);
  return g;
}

AnnGradients ann_backward(const AnnNetwork& ann, const Vector& x,
                          std::size_t label) {
  AnnGradients grads = ann_zeros_like(ann);
  const ReluForwardResult fwd = relu_forward(ann, x);
  const LossAndGrad top = softmax_cross_entropy(fwd.logits, label);
  grads.loss = top.loss;

  const Vector& last =
      ann.hidden.empty() ? x : fwd.activations.back();
  for (std::size_t m = 0; m < ann.output.out_size(); ++m) {
    grads.output_bias_grad[m] = top.grad[m];
    for (std::size_t j = 0; j < ann.output.in_size(); ++j) {
      grads.output_weight_grad(m, j) = top.grad[m] * last[j];
    }
  }
  if (ann.hidden.empty()) return grads;

  Vector delta = matvec_transposed(ann.output.weights, top.grad);
  for (std::size_t n = ann.depth(); n-- > 0;) {
    const AnnLayer& layer = ann.hidden[n];
    const Vector& input = (n == 0) ? x : fwd.activations[n - 1];
    for (std::size_t i = 0; i < layer.out_size(); ++i) {
      if (fwd.activations[n][i] <= 0.0) delta[i] = 0.0;
    }
    for (std::size_t i = 0; i < layer.out_size(); ++i) {
      grads.bias_grads[n][i] = delta[i];
      for (std::size_t j = 0; j < layer.in_size(); ++j) {
        grads.weight_grads[n](i, j) = delta[i] * input[j];
      }
    }
    if (n > 0) delta = matvec_transposed(layer.weights, delta);
  }
  return grads;
}

void ann_accumulate(AnnGradients& into, const AnnGradients& grads) {
  for (std::size_t n = 0; n < into.weight_grads.size(); ++n) {
    for (std::size_t k = 0; k < into.weight_grads[n].size(); ++k) {
      into.weight_grads[n].data()[k] += grads.weight_grads[n].data()[k];
    }
    for (std::size_t k = 0; k < into.bias_grads[n].size(); ++k) {
      into.bias_grads[n][k] += grads.bias_grads[n][k];
    }
  }
  for (std::size_t k = 0; k < into.output_weight_grad.size(); ++k) {
    into.output_weight_grad.data()[k] += grads.output_weight_grad.data()[k];
  }
  for (std::size_t k = 0; k < into.output_bias_grad.size(); ++k) {
    into.output_bias_grad[k] += grads.output_bias_grad[k];
  }
  into.loss += grads.loss;
}

void ann_scale(AnnGradients& grads, double factor) {
  for (DenseMatrix& g : grads.weight_grads) {
    for (double& v : g.data()) v *= factor;
  }
  for (Vector& g : grads.bias_grads) {
    for (double& v : g) v *= factor;
  }
  for (double& v : grads.output_weight_grad.data()) v *= factor;
  for (double& v : grads.output_bias_grad) v *= factor;
  grads.loss *= factor;
}

void ann_sgd_step(AnnNetwork& ann, const AnnGradients& grads, double lr,
                  bool update_output_bias) {
  for (std::size_t n = 0; n < ann.depth(); ++n) {
    apply_sgd(ann.hidden[n].weights, grads.weight_grads[n], lr);
    apply_sgd(ann.hidden[n].biases, grads.bias_grads[n], lr);
  }
  apply_sgd(ann.output.weights, grads.output_weight_grad, lr);
  if (update_output_bias) {
    apply_sgd(ann.output.biases, grads.output_bias_grad, lr);
  }
}

AnnAdamState AnnAdamState::zeros_like(const AnnNetwork& ann) {
  AnnAdamState state;
  state.first_moment = ann_zeros_like(ann);
  state.second_moment = ann_zeros_like(ann);
  return state;
}

void ann_adam_step(AnnNetwork& ann, const AnnGradients& grads,
                   AnnAdamState& state, double lr, const AdamConfig& config,
                   bool update_output_bias) {
  ++state.step;
  const double bias1 = 1.0 - std::pow(config.beta1, state.step);
  const double bias2 = 1.0 - std::pow(config.beta2, state.step);
  for (std::size_t n = 0; n < ann.depth(); ++n) {
    apply_adam(ann.hidden[n].weights.data().data(),
               grads.weight_grads[n].data().data(),
               state.first_moment.weight_grads[n].data().data(),
               state.second_moment.weight_grads[n].data().data(),
               ann.hidden[n].weights.size(), lr, bias1, bias2, config);
    apply_adam(ann.hidden[n].biases.data(), grads.bias_grads[n].data(),
               state.first_moment.bias_grads[n].data(),
               state.second_moment.bias_grads[n].data(),
               ann.hidden[n].biases.size(), lr, bias1, bias2, config);
  }
  apply_adam(ann.output.weights.data().data(),
             grads.output_weight_grad.data().data(),
             state.first_moment.output_weight_grad.data().data(),
             state.second_moment.output_weight_grad.data().data(),
             ann.output.weights.size(), lr, bias1, bias2, config);
  if (update_output_bias) {
    apply_adam(ann.output.biases.data(), grads.output_bias_grad.data(),
               state.first_moment.output_bias_grad.data(),
               state.second_moment.output_bias_grad.data(),
               ann.output.biases.size(), lr, bias1, bias2, config);
  }
}

}  // namespace ttfs
