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

#include "ttfs/scheduler.hpp"

#include <algorithm>
#include <cmath>

#include "ttfs/error.hpp"
#include "ttfs/forward.hpp"

namespace ttfs {
namespace {

void recompute_base_thresholds(SnnLayer& layer, double tau_c) {
  const double width_over_tau = layer.width() / tau_c;
  for (std::size_t i = 0; i < layer.out_size(); ++i) {
    layer.base_threshold[i] =
        layer.slope_at_threshold_of(i) * width_over_tau;
  }
}

// Rescale read-out ramp weights so alpha * (t_read - t_min) is preserved
// when the read-out window changes.
void preserve_readout_bias(OutputLayer& output, double old_width) {
  const double new_width = output.t_read - output.t_min;
  if (new_width == old_width) return;
  const double factor = old_width / new_width;
  for (double& a : output.alpha) a *= factor;
}

void repoint_readout(Network& net, double old_read_width) {
  if (!net.layers.empty()) {
    net.output.t_min = net.layers.back().t_min;
    net.output.t_read = net.layers.back().t_max;
  }
  preserve_readout_bias(net.output, old_read_width);
}

}  // namespace

void SchedulerConfig::validate() const {
  if (!(zeta >= 0.0)) throw ConfigError("scheduler: zeta must be >= 0");
  if (!(gamma > 1.0)) throw ConfigError("scheduler: gamma must be > 1");
  if (reference_slope != 1.0) {
    throw ConfigError("scheduler: reference slope is fixed at unit value");
  }
  if (!(min_width > 0.0)) throw ConfigError("scheduler: min_width must be > 0");
}

std::size_t InitReport::degenerate_count() const {
  std::size_t count = 0;
  for (std::uint8_t f : degenerate) count += f;
  return count;
}

InitReport init_windows_and_thresholds(Network& net,
                                       const std::vector<Vector>& batch,
                                       const SchedulerConfig& config) {
  config.validate();
  for (const SnnLayer& layer : net.layers) {
    for (double d : layer.threshold_shift) {
      if (d != 0.0) {
        throw DomainError(
            "init_windows_and_thresholds: threshold shifts must be zero at "
            "initialization");
      }
    }
  }
  InitReport report;
  report.widths.resize(net.depth());
  report.max_potentials.resize(net.depth());
  report.degenerate.assign(net.depth(), 0);

  const double tau_c = net.config.tau_c;
  const double old_read_width = net.output.t_read - net.output.t_min;
  std::vector<SpikeVector> current;
  current.reserve(batch.size());
  for (const Vector& x : batch) current.push_back(encode_ttfs(x, net.config));

  double t_min = net.config.input_t_max();
  for (std::size_t n = 0; n < net.depth(); ++n) {
    SnnLayer& layer = net.layers[n];
    layer.t_min = t_min;
    double vmax = 0.0;
    bool any = false;
    for (const SpikeVector& spikes : current) {
      for (std::size_t i = 0; i < layer.out_size(); ++i) {
        double v = 0.0;
        for (std::size_t j = 0; j < layer.in_size(); ++j) {
          v += layer.weights(i, j) * (t_min - spikes.times[j]);
        }
        v /= tau_c;
        vmax = any ? std::max(vmax, v) : v;
        any = true;
      }
    }
    report.max_potentials[n] = vmax;
    double width;
    if (vmax > 0.0) {
      const double reference_voltage = (1.0 + config.zeta) * vmax;
      width = tau_c * reference_voltage / config.reference_slope;
      width = std::max(width, config.min_width);
    } else {
      // Every calibration potential is non-positive at the opening; the
      // layer would never spike. Fall back to a fixed minimum width.
      width = config.min_width;
      report.degenerate[n] = 1;
    }
    report.widths[n] = width;
    layer.t_max = t_min + width;
    recompute_base_thresholds(layer, tau_c);
    for (SpikeVector& spikes : current) {
      spikes = layer_forward(spikes, layer, tau_c).spikes;
    }
    t_min = layer.t_max;
  }
  repoint_readout(net, old_read_width);
  return report;
}

std::vector<LayerStats> gather_layer_stats(
    const Network& net, const std::vector<ForwardTrace>& traces) {
  std::vector<LayerStats> stats(net.depth());
  const double tau_c = net.config.tau_c;
  for (std::size_t n = 0; n < net.depth(); ++n) {
    const SnnLayer& layer = net.layers[n];
    bool any = false;
    for (const ForwardTrace& trace : traces) {
      const LayerTrace& record = trace.layers[n];
      for (std::size_t i = 0; i < record.output.size(); ++i) {
        // Potential at the window opening, recovered from the closed form:
        // V(t_min) = theta_i + (B_i t_min - A_i) / tau_c.
        const double v = layer.threshold(i) +
                         (record.slope[i] * layer.t_min - record.numerator[i]) /
                             tau_c;
        const double t = record.output.times[i];
        if (!any) {
          stats[n].min_spike_time = t;
          stats[n].max_potential_at_tmin = v;
          any = true;
        } else {
          stats[n].min_spike_time = std::min(stats[n].min_spike_time, t);
          stats[n].max_potential_at_tmin =
              std::max(stats[n].max_potential_at_tmin, v);
        }
      }
    }
  }
  return stats;
}

double adapt_tmax(Network& net, std::size_t layer_index,
                  const LayerStats& stats, const SchedulerConfig& config) {
  SnnLayer& layer = net.layers[layer_index];
  const double width = layer.width();
  const double gap = layer.t_max - stats.min_spike_time;
  const double delta = config.gamma * gap - width;
  // Expansion-only; the tolerance absorbs round-off when the rule sits at
  // its fixed point.
  if (!(delta > 1e-12 * std::max(width, std::fabs(layer.t_max)))) return 0.0;

  const double tau_c = net.config.tau_c;
  const double old_read_width = net.output.t_read - net.output.t_min;
  layer.t_max += delta;
  recompute_base_thresholds(layer, tau_c);
  for (std::size_t m = layer_index + 1; m < net.depth(); ++m) {
    SnnLayer& deeper = net.layers[m];
    const double deeper_width = deeper.width();
    deeper.t_min = net.layers[m - 1].t_max;
    deeper.t_max = deeper.t_min + deeper_width;
    recompute_base_thresholds(deeper, tau_c);
  }
  repoint_readout(net, old_read_width);
  return delta;
}

std::vector<double> adapt_all(Network& net,
                              const std::vector<LayerStats>& stats,
                              const SchedulerConfig& config) {
  std::vector<double> deltas(net.depth(), 0.0);
  for (std::size_t n = 0; n < net.depth(); ++n) {
    // Earlier expansions shift deeper spikes and windows by the same amount,
    // so the recorded gap and width stay valid.
    deltas[n] = adapt_tmax(net, n, stats[n], config);
  }
  return deltas;
}

void rebuild_windows(Network& net, const std::vector<double>& widths) {
  if (widths.size() != net.depth()) {
    throw DimensionError("rebuild_windows: one width per hidden layer");
  }
  const double tau_c = net.config.tau_c;
  const double old_read_width = net.output.t_read - net.output.t_min;
  double t_min = net.config.input_t_max();
  for (std::size_t n = 0; n < net.depth(); ++n) {
    SnnLayer& layer = net.layers[n];
    if (!(widths[n] > 0.0)) {
      throw DomainError("rebuild_windows: widths must be positive");
    }
    layer.t_min = t_min;
    layer.t_max = t_min + widths[n];
    recompute_base_thresholds(layer, tau_c);
    t_min = layer.t_max;
  }
  repoint_readout(net, old_read_width);
}

TightenReport tighten_for_inference(Network& net,
                                    const std::vector<Vector>& batch,
                                    double zeta, double min_width) {
  TightenReport report;
  report.latency_before = net.latency();
  const AnnNetwork ann = snn_to_ann(net);
  report.widths = [&] {
    std::vector<WindowSpec> specs =
        windows_from_relu_stats(ann, batch, zeta, net.config.tau_c, min_width);
    std::vector<double> widths(specs.size());
    for (std::size_t n = 0; n < specs.size(); ++n) {
      widths[n] = specs[n].t_max - specs[n].t_min;
    }
    return widths;
  }();
  rebuild_windows(net, report.widths);
  report.latency_after = net.latency();
  return report;
}

std::vector<WindowSpec> windows_from_relu_stats(const AnnNetwork& ann,
                                                const std::vector<Vector>& batch,
                                                double zeta, double tau_c,
                                                double min_width) {
  std::vector<double> max_activation(ann.depth(), 0.0);
  for (const Vector& x : batch) {
    const ReluForwardResult fwd = relu_forward(ann, x);
    for (std::size_t n = 0; n < ann.depth(); ++n) {
      for (double a : fwd.activations[n]) {
        max_activation[n] = std::max(max_activation[n], a);
      }
    }
  }
  std::vector<WindowSpec> windows(ann.depth());
  double t_min = tau_c;
  for (std::size_t n = 0; n < ann.depth(); ++n) {
    // The tiny slack keeps the earliest calibration spike from landing a
    // round-off below the window opening.
    double width =
        (1.0 + zeta) * tau_c * max_activation[n] * (1.0 + 1e-12);
    width = std::max(width, min_width);
    windows[n].t_min = t_min;
    windows[n].t_max = t_min + width;
    t_min = windows[n].t_max;
  }
  return windows;
}

}  // namespace ttfs
