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

#ifndef TTFS_ANN_H_
#define TTFS_ANN_H_

#include <vector>

#include "ttfs/network.hpp"

namespace ttfs {

struct AnnLayer {
  DenseMatrix weights;
  Vector biases;

  std::size_t out_size() const { return weights.rows(); }
  std::size_t in_size() const { return weights.cols(); }
};

// ReLU network equivalent to a spiking network: hidden layers apply
// max(0, w x + b), the final layer is affine.
struct AnnNetwork {
  std::vector<AnnLayer> hidden;
  AnnLayer output;

  std::size_t depth() const { return hidden.size(); }
};

// Exact reverse mapping from SNN parameters to the equivalent ReLU network:
//   hidden: w_ij = W_ij / B_i,  b_i = -theta_i / B_i + (t_max - t_min)/tau_c
//   output: w = W,              b_m = alpha_m (t_read - t_min) / tau_c
// Under kLinearlyMappable the hidden weights are copied verbatim (w == W
// bitwise). Throws InvalidSlopeError if any B_i <= 0.
AnnNetwork snn_to_ann(const Network& net);

struct WindowSpec {
  double t_min = 0.0;
  double t_max = 1.0;
};

// Inverse mapping. Windows come from the scheduler; the base threshold is
// set to its scheduler form B_i * (t_max - t_min) / tau_c and the ANN bias
// is absorbed into the trainable shift D. Under kConstantAlpha the implied
// slope B_i = alpha_i / (1 - sum_j w_ij) must be positive, otherwise
// InfeasibleMappingError is thrown. `alpha` holds the per-layer constant
// ramp weight and is ignored under kLinearlyMappable.
Network ann_to_snn(const AnnNetwork& ann, AlphaPolicy policy,
                   const std::vector<Vector>& alpha,
                   const std::vector<WindowSpec>& windows, double tau_c);

struct ReluForwardResult {
  std::vector<Vector> activations;  // per hidden layer
  Vector logits;
};

ReluForwardResult relu_forward(const AnnNetwork& ann, const Vector& x);

// Residuals of the coding identity x * tau_c = t_max - t between a spiking
// network and a ReLU network evaluated on the same inputs.
struct EquivalenceReport {
  std::vector<double> per_layer_max_residual;  // max |x tau_c - (t_max - t)|
  double logit_max_diff = 0.0;
  double loss_max_diff = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

EquivalenceReport check_equivalence(const Network& net, const AnnNetwork& ann,
                                    const std::vector<Vector>& batch,
                                    double tolerance = 1e-9);

}  // namespace ttfs

#endif  // TTFS_ANN_H_
