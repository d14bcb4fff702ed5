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

#include "ttfs/network.hpp"

#include <cmath>
#include <string>

#include "ttfs/error.hpp"

namespace ttfs {

double SnnLayer::alpha_of(std::size_t i) const {
  if (alpha_policy == AlphaPolicy::kConstantAlpha) return alpha[i];
  double sum = 0.0;
  for (std::size_t j = 0; j < in_size(); ++j) sum += weights(i, j);
  return 1.0 - sum;
}

double SnnLayer::slope_at_threshold_of(std::size_t i) const {
  // The linearly mappable choice alpha = 1 - sum(W) makes the slope exactly
  // one; return the literal constant rather than re-adding the cancelling
  // terms in floating point.
  if (alpha_policy == AlphaPolicy::kLinearlyMappable) return 1.0;
  double sum = alpha[i];
  for (std::size_t j = 0; j < in_size(); ++j) sum += weights(i, j);
  return sum;
}

void SnnLayer::validate() const {
  const std::size_t n = out_size();
  if (threshold_shift.size() != n || base_threshold.size() != n) {
    throw DimensionError("SnnLayer: threshold vectors do not match out_size");
  }
  if (alpha_policy == AlphaPolicy::kConstantAlpha && alpha.size() != n) {
    throw DimensionError("SnnLayer: alpha vector does not match out_size");
  }
  if (!(t_max > t_min)) {
    throw DomainError("SnnLayer: window requires t_max > t_min");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!(threshold(i) > 0.0)) {
      throw DomainError("SnnLayer: threshold must be positive (neuron " +
                        std::to_string(i) + ")");
    }
    if (alpha_policy == AlphaPolicy::kConstantAlpha &&
        !(slope_at_threshold_of(i) > 0.0)) {
      throw InvalidSlopeError(
          "SnnLayer: slope-at-threshold must be positive (neuron " +
          std::to_string(i) + ")");
    }
  }
}

void Network::validate() const {
  double expected_t_min = config.input_t_max();
  std::size_t expected_in = 0;
  bool first = true;
  for (const SnnLayer& layer : layers) {
    layer.validate();
    if (layer.t_min != expected_t_min) {
      throw DomainError("Network: window chain broken (t_min != previous t_max)");
    }
    if (!first && layer.in_size() != expected_in) {
      throw DimensionError("Network: layer input size mismatch");
    }
    expected_t_min = layer.t_max;
    expected_in = layer.out_size();
    first = false;
  }
  if (!layers.empty()) {
    if (output.in_size() != layers.back().out_size()) {
      throw DimensionError("Network: read-out input size mismatch");
    }
    if (output.t_min != layers.back().t_min ||
        output.t_read != layers.back().t_max) {
      throw DomainError("Network: read-out window must span the last hidden window");
    }
  } else {
    if (output.t_min != config.input_t_min() ||
        output.t_read != config.input_t_max()) {
      throw DomainError("Network: read-out window must span the input window");
    }
  }
  if (output.alpha.size() != output.out_size()) {
    throw DimensionError("Network: read-out alpha does not match out_size");
  }
}

Vector slope_at_threshold(const SnnLayer& layer) {
  Vector b(layer.out_size());
  for (std::size_t i = 0; i < layer.out_size(); ++i) {
    b[i] = layer.slope_at_threshold_of(i);
  }
  return b;
}

}  // namespace ttfs
