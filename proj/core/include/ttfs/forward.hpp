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

#ifndef TTFS_FORWARD_H_
#define TTFS_FORWARD_H_

#include <functional>

#include "ttfs/network.hpp"

namespace ttfs {

// TTFS encoding of an input in [0, 1]^d: times[j] = tau_c * (1 - x[j]), so a
// stronger input spikes earlier. Throws DomainError outside [0, 1].
SpikeVector encode_ttfs(const Vector& x, const NetworkConfig& config);

// Inverse of the coding identity: x[i] = (t_max - times[i]) / tau_c. Forced
// spikes decode to exactly 0.
Vector decode_ttfs(const SpikeVector& spikes, double t_max, double tau_c);

struct LayerForwardResult {
  SpikeVector spikes;
  Vector numerator;  // A_i, time units
  Vector slope;      // B_i
};

// Closed-form spike times of one hidden layer.
//
// With all inputs arriving by t_min, the potential rises linearly with slope
// B_i / tau_c past t_min, giving the candidate crossing
//   t_i = A_i / B_i,  A_i = tau_c * theta_i + alpha_i * t_min + sum_j W_ij t_j.
// Candidates at or past t_max are forced to t_max with mask false; candidates
// before t_min are clamped to t_min and flagged saturated_low (transient
// mid-training state; the scheduler normally prevents it).
LayerForwardResult layer_forward(const SpikeVector& input,
                                 const SnnLayer& layer, double tau_c);

// Read-out potentials at t_read:
//   V_m = [alpha_m (t_read - t_min) + sum_j W_mj (t_read - t_j)] / tau_c.
Vector output_potentials(const SpikeVector& input, const OutputLayer& out,
                         double tau_c);

// Optional per-layer spike perturbation (jitter, time quantization). Called
// with the layer index (0 = encoded input, n >= 1 = hidden layer n), the
// owning coding window and the spikes to edit in place. Implementations must
// keep window containment and mask consistency intact.
using PerturbationHook =
    std::function<void(std::size_t layer_index, double t_min, double t_max,
                       SpikeVector& spikes)>;

ForwardTrace network_forward(const Vector& x, const Network& net);
ForwardTrace network_forward(const Vector& x, const Network& net,
                             const PerturbationHook& hook);

struct LossAndGrad {
  double loss = 0.0;
  Vector grad;  // d loss / d potentials
};

// Cross-entropy of softmax(v) against `label`, with max-subtraction for
// stability; grad = softmax(v) - onehot(label).
LossAndGrad softmax_cross_entropy(const Vector& v, std::size_t label);

// Independent verification oracle: explicit Euler integration of the
// piecewise-linear potential from the earliest input spike to t_max, with
// threshold crossings located by sign change and linear interpolation.
// Spiking is impossible before t_min. Spike times agree with layer_forward
// to within 2 * dt.
SpikeVector integrate_potential_oracle(const SpikeVector& input,
                                       const SnnLayer& layer, double tau_c,
                                       double dt);

}  // namespace ttfs

#endif  // TTFS_FORWARD_H_
