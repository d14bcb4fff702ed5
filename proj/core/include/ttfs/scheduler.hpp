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

#ifndef TTFS_SCHEDULER_H_
#define TTFS_SCHEDULER_H_

#include "ttfs/ann.hpp"
#include "ttfs/network.hpp"

namespace ttfs {

struct SchedulerConfig {
  // Safety margin on the initial window width.
  double zeta = 0.5;
  // Expansion factor of the adaptive t_max rule; the window is widened
  // whenever the earliest spike falls in the first (1 - 1/gamma) of it.
  double gamma = 10.0;
  // Reference slope used when converting the reference voltage into a window
  // width; fixed at unit value.
  double reference_slope = 1.0;
  // Fallback width for layers whose calibration potentials are all
  // non-positive.
  double min_width = 1e-3;

  void validate() const;
};

// Per-layer batch statistics feeding the adaptive window rule.
struct LayerStats {
  double min_spike_time = 0.0;
  double max_potential_at_tmin = 0.0;
};

struct InitReport {
  std::vector<double> widths;
  std::vector<double> max_potentials;
  BoolVector degenerate;  // layers that fell back to min_width

  std::size_t degenerate_count() const;
};

// Recursive window and base-threshold initialization on a calibration batch.
//
// Layer by layer: the window opens where the previous one closes, the
// reference voltage is (1 + zeta) * max over neurons and samples of the
// potential at the opening, the window width is tau_c * reference voltage /
// reference slope, and base thresholds are B_i * width / tau_c. Requires
// threshold shifts D to still be zero so that every calibration spike is
// guaranteed to fall inside its window.
InitReport init_windows_and_thresholds(Network& net,
                                       const std::vector<Vector>& batch,
                                       const SchedulerConfig& config);

// Batch statistics from forward traces: the earliest spike per layer and the
// largest potential at the window opening.
std::vector<LayerStats> gather_layer_stats(
    const Network& net, const std::vector<ForwardTrace>& traces);

// Expansion-only adaptive update of one layer's t_max. Returns the applied
// increment (0 when the earliest spike is already in the last 1/gamma of
// the window). On expansion, every deeper window shifts by the same amount
// with its width preserved, base thresholds are recomputed, and the
// read-out ramp weights are rescaled so the implied read-out bias is
// unchanged; the computed input-output function of the network is therefore
// invariant under the update.
double adapt_tmax(Network& net, std::size_t layer_index,
                  const LayerStats& stats, const SchedulerConfig& config);

// Applies adapt_tmax to every layer in order; returns the per-layer deltas.
std::vector<double> adapt_all(Network& net,
                              const std::vector<LayerStats>& stats,
                              const SchedulerConfig& config);

// Replaces every hidden window width (re-chaining the windows from the input
// window), recomputes base thresholds and preserves the implied read-out
// bias. The mapped ReLU network, and hence the computed function, is
// unchanged.
void rebuild_windows(Network& net, const std::vector<double>& widths);

struct TightenReport {
  double latency_before = 0.0;
  double latency_after = 0.0;
  std::vector<double> widths;
};

// Shrinks every window so that the earliest calibration spike lands
// immediately after its opening (optionally with safety margin zeta), then
// recomputes thresholds. Run after training with frozen parameters; the
// calibration batch keeps its spiking pattern and logits.
TightenReport tighten_for_inference(Network& net,
                                    const std::vector<Vector>& batch,
                                    double zeta = 0.0,
                                    double min_width = 1e-3);

// Window chain for converting a ReLU network: per layer,
// width = (1 + zeta) * tau_c * max activation over the batch.
std::vector<WindowSpec> windows_from_relu_stats(const AnnNetwork& ann,
                                                const std::vector<Vector>& batch,
                                                double zeta, double tau_c,
                                                double min_width = 1e-3);

}  // namespace ttfs

#endif  // TTFS_SCHEDULER_H_
