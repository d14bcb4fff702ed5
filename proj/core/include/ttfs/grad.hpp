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

#ifndef TTFS_GRAD_H_
#define TTFS_GRAD_H_

#include "ttfs/ann.hpp"
#include "ttfs/network.hpp"

namespace ttfs {

// Loss gradients for every trainable parameter: hidden W and D, read-out W.
// The base threshold, the windows and the read-out ramp weights are
// scheduler-owned and never gradient-updated.
struct GradientSet {
  std::vector<DenseMatrix> weight_grads;
  std::vector<Vector> shift_grads;
  DenseMatrix output_weight_grad;

  static GradientSet zeros_like(const Network& net);
  void add(const GradientSet& other);
  void scale(double factor);
};

// Layer Jacobian dt_out/dt_in = M (1/B) W: entry (i, j) is
// mask_i * W_ij / B_i, with rows of forced or low-saturated neurons zero.
DenseMatrix layer_jacobian(const LayerTrace& trace, const SnnLayer& layer);

struct BackwardResult {
  GradientSet grads;
  // dL/dt per hidden layer, retained for gradient-flow diagnostics.
  std::vector<Vector> spike_time_grads;
  double loss = 0.0;
};

// Exact backpropagation through spike times for one sample. The chain runs
// through the read-out potentials, the per-layer Jacobians and the local
// parameter derivatives of the closed-form spike time; windows and base
// thresholds are treated as constants. Under kLinearlyMappable the ramp
// weight's dependence on W is part of the derivative (dt/dW = M (t_in -
// t_min)); under kConstantAlpha it is a free constant (dt/dW = M (t_in -
// t_out)/B). Forced and low-saturated neurons propagate no gradient.
BackwardResult backward(const ForwardTrace& trace, const Network& net,
                        std::size_t label);

// Per-parameter flags marking finite-difference probes that flipped a spike
// mask or saturation flag; those entries are excluded from comparisons.
struct SwitchingFlags {
  std::vector<BoolVector> weight;  // row-major per hidden layer
  std::vector<BoolVector> shift;
  BoolVector output_weight;

  std::size_t switching_count() const;
};

struct FiniteDiffResult {
  GradientSet grads;
  SwitchingFlags switching;
};

// Central-difference gradient oracle: (L(p + eps) - L(p - eps)) / (2 eps)
// per parameter, checking each probe's spiking pattern against the base
// trace.
FiniteDiffResult finite_diff_grad(const Network& net, const Vector& x,
                                  std::size_t label, double eps);

// Derivative of the weight map w = W / B at one entry under kConstantAlpha:
// dw/dW = (B - W) / B^2. Equal to 1 at the unbiased point B = 1, W = 0.
double mapping_derivative(double slope, double weight);

// First-order prediction of how a gradient step -lr * weight_grad taken in
// SNN space moves the equivalent ANN weights: row-wise
//   dw_ij = -lr [ g_ij / B_i - W_ij (sum_k g_ik) / B_i^2 ].
// Only meaningful under kConstantAlpha (under kLinearlyMappable the map is
// the identity and no bias exists); throws PolicyError otherwise.
DenseMatrix predicted_ann_update(const SnnLayer& layer,
                                 const DenseMatrix& weight_grad, double lr);

enum class OptimizerKind : std::uint8_t { kSgd = 0, kAdam = 1 };

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  GradientSet first_moment;
  GradientSet second_moment;
  long step = 0;

  static AdamState zeros_like(const Network& net);
};

void sgd_step(Network& net, const GradientSet& grads, double lr);
void adam_step(Network& net, const GradientSet& grads, AdamState& state,
               double lr, const AdamConfig& config = AdamConfig());

// Exponential decay: lr0 * 0.9^(it / 5000).
double lr_schedule(double lr0, long iteration);

// --- Reference ReLU-network training (independent of the spiking path) ---

struct AnnGradients {
  std::vector<DenseMatrix> weight_grads;
  std::vector<Vector> bias_grads;
  DenseMatrix output_weight_grad;
  Vector output_bias_grad;
  double loss = 0.0;
};

// Plain backpropagation through the ReLU network; used both as the
// verification oracle for the spiking gradients and as the reference track
// in trajectory-equivalence runs.
AnnGradients ann_backward(const AnnNetwork& ann, const Vector& x,
                          std::size_t label);

struct AnnAdamState {
  AnnGradients first_moment;
  AnnGradients second_moment;
  long step = 0;

  static AnnAdamState zeros_like(const AnnNetwork& ann);
};

// The read-out bias is kept frozen by default, mirroring the spiking network
// whose read-out ramp weights are not gradient-updated.
void ann_sgd_step(AnnNetwork& ann, const AnnGradients& grads, double lr,
                  bool update_output_bias = false);
void ann_adam_step(AnnNetwork& ann, const AnnGradients& grads,
                   AnnAdamState& state, double lr,
                   const AdamConfig& config = AdamConfig(),
                   bool update_output_bias = false);

void ann_accumulate(AnnGradients& into, const AnnGradients& grads);
void ann_scale(AnnGradients& grads, double factor);
AnnGradients ann_zeros_like(const AnnNetwork& ann);

}  // namespace ttfs

#endif  // TTFS_GRAD_H_
