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

#include "ttfs/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "json.hpp"
#include "ttfs/checkpoint.hpp"
#include "ttfs/diagnostics.hpp"
#include "ttfs/error.hpp"
#include "ttfs/forward.hpp"

namespace ttfs {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::size_t argmax(const Vector& v) {
  return static_cast<std::size_t>(
      std::max_element(v.begin(), v.end()) - v.begin());
}

DenseMatrix random_weights(std::size_t rows, std::size_t cols,
                           std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double scale = 1.0 / std::sqrt(static_cast<double>(cols));
  DenseMatrix w(rows, cols);
  for (double& v : w.data()) v = gauss(rng) * scale;
  return w;
}

struct QatScales {
  std::vector<WeightQuantScale> hidden;
  WeightQuantScale output;
};

QatScales make_qat_scales(const Network& net, const QuantSpec& spec) {
  double lo = spec.percentile_low;
  double hi = spec.percentile_high;
  if (spec.weight_bits == 4 && lo == 1.0 && hi == 99.0) {
    // Narrower clip for the 4-bit grid.
    lo = 4.0;
    hi = 96.0;
  }
  QatScales scales;
  scales.hidden.reserve(net.depth());
  for (const SnnLayer& layer : net.layers) {
    scales.hidden.push_back(
        weight_quant_scale(layer.weights, spec.weight_bits, lo, hi));
  }
  scales.output =
      weight_quant_scale(net.output.weights, spec.weight_bits, lo, hi);
  return scales;
}

Network quantized_copy(const Network& net, const QatScales& scales) {
  Network q = net;
  for (std::size_t n = 0; n < q.depth(); ++n) {
    q.layers[n].weights =
        apply_weight_quantization(q.layers[n].weights, scales.hidden[n]);
  }
  q.output.weights =
      apply_weight_quantization(q.output.weights, scales.output);
  return q;
}

PerturbationHook make_constraint_hook(const QuantSpec& spec,
                                      std::mt19937_64* jitter_rng) {
  if (spec.jitter_sd <= 0.0 && spec.time_steps <= 0) return PerturbationHook();
  const double sd = spec.jitter_sd;
  const int steps = spec.time_steps;
  return [sd, steps, jitter_rng](std::size_t, double t_min, double t_max,
                                 SpikeVector& spikes) {
    if (sd > 0.0) {
      spikes = add_spike_jitter(spikes, sd, t_min, t_max, *jitter_rng);
    }
    if (steps > 0) spikes = quantize_times(spikes, steps, t_min, t_max);
  };
}

std::size_t count_saturated(const ForwardTrace& trace) {
  std::size_t count = 0;
  for (const LayerTrace& layer : trace.layers) {
    for (std::uint8_t f : layer.output.saturated_low) count += f;
  }
  return count;
}

}  // namespace

Network make_mlp(std::size_t input_size,
                 const std::vector<std::size_t>& hidden_widths,
                 std::size_t num_classes, AlphaPolicy policy,
                 double alpha_value, std::uint64_t seed, double tau_c) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Network net;
  net.config.tau_c = tau_c;
  std::size_t fan_in = input_size;
  double t_min = tau_c;
  for (std::size_t width : hidden_widths) {
    SnnLayer layer;
    layer.alpha_policy = policy;
    layer.weights = random_weights(width, fan_in, rng);
    if (policy == AlphaPolicy::kConstantAlpha) {
      layer.alpha.assign(width, alpha_value);
      // Redraw rows whose slope-at-threshold is not safely positive.
      const double scale = 1.0 / std::sqrt(static_cast<double>(fan_in));
      for (std::size_t i = 0; i < width; ++i) {
        while (layer.slope_at_threshold_of(i) <= 0.05) {
          for (std::size_t j = 0; j < fan_in; ++j) {
            layer.weights(i, j) = gauss(rng) * scale;
          }
        }
      }
    }
    layer.threshold_shift.assign(width, 0.0);
    layer.t_min = t_min;
    layer.t_max = t_min + tau_c;
    layer.base_threshold.resize(width);
    const double width_over_tau = layer.width() / tau_c;
    for (std::size_t i = 0; i < width; ++i) {
      layer.base_threshold[i] =
          layer.slope_at_threshold_of(i) * width_over_tau;
    }
    t_min = layer.t_max;
    fan_in = width;
    net.layers.push_back(std::move(layer));
  }
  net.output.weights = random_weights(num_classes, fan_in, rng);
  net.output.alpha.assign(num_classes, 0.0);
  if (!net.layers.empty()) {
    net.output.t_min = net.layers.back().t_min;
    net.output.t_read = net.layers.back().t_max;
  } else {
    net.output.t_min = net.config.input_t_min();
    net.output.t_read = net.config.input_t_max();
  }
  return net;
}

AnnNetwork make_ann_mlp(std::size_t input_size,
                        const std::vector<std::size_t>& hidden_widths,
                        std::size_t num_classes, std::uint64_t seed,
                        double max_row_sum) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  AnnNetwork ann;
  std::size_t fan_in = input_size;
  for (std::size_t width : hidden_widths) {
    AnnLayer layer;
    layer.weights = random_weights(width, fan_in, rng);
    if (max_row_sum > 0.0) {
      const double scale = 1.0 / std::sqrt(static_cast<double>(fan_in));
      for (std::size_t i = 0; i < width; ++i) {
        for (;;) {
          double sum = 0.0;
          for (std::size_t j = 0; j < fan_in; ++j) sum += layer.weights(i, j);
          if (sum < max_row_sum) break;
          for (std::size_t j = 0; j < fan_in; ++j) {
            layer.weights(i, j) = gauss(rng) * scale;
          }
        }
      }
    }
    layer.biases.assign(width, 0.0);
    fan_in = width;
    ann.hidden.push_back(std::move(layer));
  }
  ann.output.weights = random_weights(num_classes, fan_in, rng);
  ann.output.biases.assign(num_classes, 0.0);
  return ann;
}

double evaluate_accuracy(const Network& net, const Dataset& data,
                         const PerturbationHook& hook) {
  if (data.size() == 0) return 0.0;
  std::size_t correct = 0;
  for (std::size_t s = 0; s < data.size(); ++s) {
    const ForwardTrace trace = network_forward(data.images[s], net, hook);
    if (argmax(trace.output_potentials) ==
        static_cast<std::size_t>(data.labels[s])) {
      ++correct;
    }
  }
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

double evaluate_ann_accuracy(const AnnNetwork& ann, const Dataset& data) {
  if (data.size() == 0) return 0.0;
  std::size_t correct = 0;
  for (std::size_t s = 0; s < data.size(); ++s) {
    const ReluForwardResult fwd = relu_forward(ann, data.images[s]);
    if (argmax(fwd.logits) == static_cast<std::size_t>(data.labels[s])) {
      ++correct;
    }
  }
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

TrainResult train(Network net, const Dataset& train_data,
                  const Dataset& test_data, const TrainOptions& options) {
  TrainOptions opts = options;
  opts.constraints.validate();
  opts.scheduler.validate();
  if (train_data.size() == 0) throw ConfigError("train: empty training set");

  TrainResult result;
  result.net = std::move(net);
  Network& latent = result.net;

  // Percentile-sized windows for time quantization and latency reduction;
  // the adaptive rule stays off while these fixed grids are in force.
  if (opts.constraints.time_steps > 0 ||
      opts.constraints.latency_percentile < 100.0) {
    const AnnNetwork mapped = snn_to_ann(latent);
    std::vector<Vector> batch;
    const std::size_t stats_n =
        std::min(opts.stats_samples, train_data.size());
    batch.reserve(stats_n);
    for (std::size_t s = 0; s < stats_n; ++s) {
      batch.push_back(train_data.images[s]);
    }
    const std::vector<Vector> values =
        collect_activation_values(mapped, batch);
    const double pct = opts.constraints.latency_percentile < 100.0
                           ? opts.constraints.latency_percentile
                           : 99.0;
    reduce_latency(latent, pct, values, opts.scheduler.min_width);
    opts.adaptive_tmax = false;
  }

  const bool use_qat = opts.constraints.weight_bits > 0;
  QatScales qat_scales;
  if (use_qat) qat_scales = make_qat_scales(latent, opts.constraints);

  if (opts.dual_track) {
    result.ann = snn_to_ann(use_qat ? quantized_copy(latent, qat_scales)
                                    : latent);
    result.has_ann = true;
  }

  AdamState adam = AdamState::zeros_like(latent);
  AnnAdamState ann_adam =
      result.has_ann ? AnnAdamState::zeros_like(result.ann) : AnnAdamState{};

  std::mt19937_64 shuffle_rng(opts.seed ^ 0x9E3779B97F4A7C15ull);
  std::mt19937_64 jitter_rng(opts.seed ^ 0xC2B2AE3D27D4EB4Full);
  const PerturbationHook train_hook =
      make_constraint_hook(opts.constraints, &jitter_rng);

  auto eval_snn = [&](std::uint64_t salt) {
    std::mt19937_64 eval_rng(opts.seed * 1000003ull + salt);
    const PerturbationHook eval_hook =
        make_constraint_hook(opts.constraints, &eval_rng);
    if (use_qat) {
      return evaluate_accuracy(quantized_copy(latent, qat_scales), test_data,
                               eval_hook);
    }
    return evaluate_accuracy(latent, test_data, eval_hook);
  };

  std::vector<std::size_t> order(train_data.size());
  std::iota(order.begin(), order.end(), 0);
  long it = 0;
  bool stop = false;
  for (std::size_t epoch = 0; epoch < opts.epochs && !stop; ++epoch) {
    const auto epoch_start = Clock::now();
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double loss_sum = 0.0;
    std::size_t correct = 0;
    std::size_t seen = 0;
    std::size_t epoch_saturated = 0;
    std::vector<double> delta_sums(latent.depth(), 0.0);

    for (std::size_t start = 0; start < order.size() && !stop;
         start += opts.batch_size) {
      const std::size_t batch_n =
          std::min(opts.batch_size, order.size() - start);
      Network qnet;
      const Network* fnet = &latent;
      if (use_qat) {
        qnet = quantized_copy(latent, qat_scales);
        fnet = &qnet;
      }
      GradientSet grads = GradientSet::zeros_like(latent);
      AnnGradients ann_grads =
          result.has_ann ? ann_zeros_like(result.ann) : AnnGradients{};
      std::vector<ForwardTrace> traces;
      traces.reserve(batch_n);
      double batch_loss = 0.0;
      std::size_t batch_saturated = 0;
      for (std::size_t k = 0; k < batch_n; ++k) {
        const std::size_t idx = order[start + k];
        const Vector& x = train_data.images[idx];
        const std::size_t label =
            static_cast<std::size_t>(train_data.labels[idx]);
        ForwardTrace trace = network_forward(x, *fnet, train_hook);
        BackwardResult bw = backward(trace, *fnet, label);
        grads.add(bw.grads);
        batch_loss += bw.loss;
        if (argmax(trace.output_potentials) == label) ++correct;
        batch_saturated += count_saturated(trace);
        traces.push_back(std::move(trace));
        if (result.has_ann) {
          ann_accumulate(ann_grads, ann_backward(result.ann, x, label));
        }
      }
      const double inv_n = 1.0 / static_cast<double>(batch_n);
      grads.scale(inv_n);
      if (result.has_ann) ann_scale(ann_grads, inv_n);
      loss_sum += batch_loss;
      seen += batch_n;
      epoch_saturated += batch_saturated;

      std::vector<double> deltas(latent.depth(), 0.0);
      if (opts.adaptive_tmax && latent.depth() > 0) {
        const std::vector<LayerStats> stats =
            gather_layer_stats(latent, traces);
        deltas = adapt_all(latent, stats, opts.scheduler);
        for (std::size_t n = 0; n < deltas.size(); ++n) {
          delta_sums[n] += deltas[n];
        }
      }

      const double lr =
          opts.exponential_lr ? lr_schedule(opts.lr0, it) : opts.lr0;
      if (opts.optimizer == OptimizerKind::kSgd) {
        sgd_step(latent, grads, lr);
        if (result.has_ann) ann_sgd_step(result.ann, ann_grads, lr);
      } else {
        adam_step(latent, grads, adam, lr);
        if (result.has_ann) {
          ann_adam_step(result.ann, ann_grads, ann_adam, lr);
        }
      }
      ++it;

      if (opts.record_steps &&
          static_cast<std::size_t>(it - 1) % opts.log_stride == 0) {
        StepRecord rec;
        rec.step = it;
        rec.lr = lr;
        rec.snn_loss = batch_loss * inv_n;
        rec.ann_loss = result.has_ann ? ann_grads.loss : 0.0;
        if (result.has_ann) {
          rec.cosines = weight_cosine_similarity(latent, result.ann);
        }
        rec.delta_tmax = deltas;
        rec.saturated_low = batch_saturated;
        result.steps.push_back(std::move(rec));
      }
      if (opts.max_steps > 0 &&
          static_cast<std::size_t>(it) >= opts.max_steps) {
        stop = true;
      }
    }

    EpochRecord record;
    record.epoch = epoch;
    record.steps_done = it;
    record.train_loss = seen > 0 ? loss_sum / static_cast<double>(seen) : 0.0;
    record.train_accuracy =
        seen > 0 ? static_cast<double>(correct) / static_cast<double>(seen)
                 : 0.0;
    if (opts.eval_each_epoch && test_data.size() > 0) {
      record.test_accuracy = eval_snn(epoch);
      if (result.has_ann) {
        record.ann_test_accuracy = evaluate_ann_accuracy(result.ann, test_data);
      }
    }
    record.delta_tmax_sum = delta_sums;
    record.saturated_low = epoch_saturated;
    record.seconds = seconds_since(epoch_start);
    result.total_saturated_low += epoch_saturated;
    result.epochs.push_back(std::move(record));
  }
  result.iterations = it;
  return result;
}

OptimizerKind ExperimentConfig::resolved_optimizer() const {
  if (optimizer == "sgd") return OptimizerKind::kSgd;
  if (optimizer == "adam") return OptimizerKind::kAdam;
  if (!optimizer.empty()) {
    throw ConfigError("unknown optimizer: " + optimizer);
  }
  // Accuracy runs default to Adam; trajectory-equivalence runs to plain SGD.
  return dual_track ? OptimizerKind::kSgd : OptimizerKind::kAdam;
}

void ExperimentConfig::validate() const {
  if (mode != "train" && mode != "finetune" && mode != "convert" &&
      mode != "diagnose") {
    throw ConfigError("unknown mode: " + mode);
  }
  if (!(tau_c > 0.0)) throw ConfigError("tau_c must be positive");
  if (batch_size == 0) throw ConfigError("batch_size must be positive");
  if (dataset != "mnist" && dataset != "synthetic") {
    throw ConfigError("unknown dataset: " + dataset);
  }
  if (trials == 0) throw ConfigError("trials must be positive");
  resolved_optimizer();
  scheduler.validate();
  constraints.validate();
}

namespace {

bool parse_bool(const std::string& value, const std::string& key) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ConfigError("expected boolean for " + key + ", got '" + value + "'");
}

std::vector<std::size_t> parse_widths(const std::string& value) {
  std::vector<std::size_t> widths;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    widths.push_back(static_cast<std::size_t>(std::stoul(item)));
  }
  if (widths.empty()) throw ConfigError("arch must list at least one width");
  return widths;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

void apply_config_value(ExperimentConfig& config, const std::string& section,
                        const std::string& key, const std::string& value) {
  try {
    if (section == "experiment" || section.empty()) {
      if (key == "mode") config.mode = value;
      else if (key == "arch") config.hidden_widths = parse_widths(value);
      else if (key == "alpha_policy") {
        if (value == "linear") {
          config.policy = AlphaPolicy::kLinearlyMappable;
        } else if (value.rfind("constant", 0) == 0) {
          config.policy = AlphaPolicy::kConstantAlpha;
          const auto colon = value.find(':');
          config.alpha_value =
              colon == std::string::npos ? 1.0 : std::stod(value.substr(colon + 1));
        } else {
          throw ConfigError("alpha_policy must be 'linear' or 'constant[:V]'");
        }
      }
      else if (key == "tau_c") config.tau_c = std::stod(value);
      else if (key == "dataset") config.dataset = value;
      else if (key == "data_dir") config.data_dir = value;
      else if (key == "train_limit") config.train_limit = std::stoul(value);
      else if (key == "test_limit") config.test_limit = std::stoul(value);
      else if (key == "synthetic_features") config.synthetic_features = std::stoul(value);
      else if (key == "synthetic_classes") config.synthetic_classes = std::stoi(value);
      else if (key == "synthetic_samples") config.synthetic_samples = std::stoul(value);
      else if (key == "optimizer") config.optimizer = value;
      else if (key == "lr0") config.lr0 = std::stod(value);
      else if (key == "exponential_lr") config.exponential_lr = parse_bool(value, key);
      else if (key == "epochs") config.epochs = std::stoul(value);
      else if (key == "batch_size") config.batch_size = std::stoul(value);
      else if (key == "seed") config.seed = std::stoull(value);
      else if (key == "trials") config.trials = std::stoul(value);
      else if (key == "dual_track") config.dual_track = parse_bool(value, key);
      else if (key == "calibration_samples") config.calibration_samples = std::stoul(value);
      else if (key == "log_stride") config.log_stride = std::stoul(value);
      else if (key == "record_steps") config.record_steps = parse_bool(value, key);
      else if (key == "checkpoint_in") config.checkpoint_in = value;
      else if (key == "out_dir") config.out_dir = value;
      else if (key == "tighten") config.tighten = parse_bool(value, key);
      else throw ConfigError("unknown key: " + section + "." + key);
    } else if (section == "scheduler") {
      if (key == "zeta") config.scheduler.zeta = std::stod(value);
      else if (key == "gamma") config.scheduler.gamma = std::stod(value);
      else if (key == "min_width") config.scheduler.min_width = std::stod(value);
      else if (key == "adaptive") config.adaptive_tmax = parse_bool(value, key);
      else throw ConfigError("unknown key: " + section + "." + key);
    } else if (section == "constraints") {
      if (key == "jitter_sd") config.constraints.jitter_sd = std::stod(value);
      else if (key == "time_steps") config.constraints.time_steps = std::stoi(value);
      else if (key == "weight_bits") config.constraints.weight_bits = std::stoi(value);
      else if (key == "percentile_low") config.constraints.percentile_low = std::stod(value);
      else if (key == "percentile_high") config.constraints.percentile_high = std::stod(value);
      else if (key == "latency_percentile") config.constraints.latency_percentile = std::stod(value);
      else throw ConfigError("unknown key: " + section + "." + key);
    } else {
      throw ConfigError("unknown config section: " + section);
    }
  } catch (const std::invalid_argument&) {
    throw ConfigError("bad value for " + section + "." + key + ": '" + value + "'");
  } catch (const std::out_of_range&) {
    throw ConfigError("value out of range for " + section + "." + key);
  }
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  ExperimentConfig config;
  std::string line;
  std::string section = "experiment";
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string text = trim(line);
    if (text.empty() || text[0] == '#') continue;
    if (text.front() == '[' && text.back() == ']') {
      section = trim(text.substr(1, text.size() - 2));
      continue;
    }
    const auto eq = text.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path + ":" + std::to_string(line_no) +
                        ": expected key = value");
    }
    apply_config_value(config, section, trim(text.substr(0, eq)),
                       trim(text.substr(eq + 1)));
  }
  return config;
}

namespace {

Dataset load_train_split(const ExperimentConfig& config) {
  if (config.dataset == "mnist") {
    Dataset data = load_idx_dataset(config.data_dir + "/train-images-idx3-ubyte",
                                    config.data_dir + "/train-labels-idx1-ubyte");
    data.split = "train";
    return data.head(config.train_limit);
  }
  Dataset all = make_synthetic(config.synthetic_samples,
                               config.synthetic_features,
                               config.synthetic_classes, config.seed);
  Dataset train = all.head(all.size() * 4 / 5);
  train.split = "train";
  return train.head(config.train_limit);
}

Dataset load_test_split(const ExperimentConfig& config) {
  if (config.dataset == "mnist") {
    Dataset data = load_idx_dataset(config.data_dir + "/t10k-images-idx3-ubyte",
                                    config.data_dir + "/t10k-labels-idx1-ubyte");
    data.split = "test";
    return data.head(config.test_limit);
  }
  Dataset all = make_synthetic(config.synthetic_samples,
                               config.synthetic_features,
                               config.synthetic_classes, config.seed);
  Dataset test;
  const std::size_t split = all.size() * 4 / 5;
  test.images.assign(all.images.begin() + split, all.images.end());
  test.labels.assign(all.labels.begin() + split, all.labels.end());
  test.num_classes = all.num_classes;
  test.split = "test";
  return test.head(config.test_limit);
}

std::vector<Vector> calibration_batch(const Dataset& data, std::size_t count) {
  const std::size_t n = std::min(count, data.size());
  return std::vector<Vector>(data.images.begin(), data.images.begin() + n);
}

void write_metrics_csv(const std::string& path, const TrainResult& result) {
  std::ofstream os(path);
  if (!os) throw FormatError("cannot write " + path);
  const std::size_t depth =
      result.epochs.empty() ? 0 : result.epochs.front().delta_tmax_sum.size();
  os << "epoch,step,train_loss,train_acc,test_acc,ann_test_acc,saturated_low";
  for (std::size_t n = 0; n < depth; ++n) os << ",delta_tmax_" << n;
  os << ",seconds\n";
  os.precision(17);
  for (const EpochRecord& e : result.epochs) {
    os << e.epoch << ',' << e.steps_done << ',' << e.train_loss << ','
       << e.train_accuracy << ',' << e.test_accuracy << ','
       << e.ann_test_accuracy << ',' << e.saturated_low;
    for (double d : e.delta_tmax_sum) os << ',' << d;
    os << ',' << e.seconds << '\n';
  }
}

void write_steps_csv(const std::string& path, const TrainResult& result) {
  std::ofstream os(path);
  if (!os) throw FormatError("cannot write " + path);
  const std::size_t layers =
      result.steps.empty() ? 0 : result.steps.front().cosines.size();
  os << "step,lr,snn_loss,ann_loss,cosine_mean,saturated_low";
  for (std::size_t n = 0; n < layers; ++n) os << ",cosine_" << n;
  os << '\n';
  os.precision(17);
  for (const StepRecord& s : result.steps) {
    double mean = 1.0;
    if (!s.cosines.empty()) {
      mean = std::accumulate(s.cosines.begin(), s.cosines.end(), 0.0) /
             static_cast<double>(s.cosines.size());
    }
    os << s.step << ',' << s.lr << ',' << s.snn_loss << ',' << s.ann_loss
       << ',' << mean << ',' << s.saturated_low;
    for (double c : s.cosines) os << ',' << c;
    os << '\n';
  }
}

TrainOptions options_from_config(const ExperimentConfig& config,
                                 std::uint64_t seed) {
  TrainOptions opts;
  opts.optimizer = config.resolved_optimizer();
  opts.lr0 = config.lr0;
  opts.exponential_lr = config.exponential_lr;
  opts.epochs = config.epochs;
  opts.batch_size = config.batch_size;
  opts.seed = seed;
  opts.dual_track = config.dual_track;
  opts.adaptive_tmax = config.adaptive_tmax;
  opts.scheduler = config.scheduler;
  opts.constraints = config.constraints;
  opts.record_steps = config.record_steps;
  opts.log_stride = config.log_stride;
  return opts;
}

}  // namespace

RunSummary run_experiment(const ExperimentConfig& config) {
  config.validate();
  const auto start = Clock::now();
  std::filesystem::create_directories(config.out_dir);
  RunSummary summary;
  summary.mode = config.mode;

  nlohmann::json summary_json;
  summary_json["mode"] = config.mode;
  summary_json["seed"] = config.seed;
  summary_json["trials"] = nlohmann::json::array();

  if (config.mode == "convert") {
    const Dataset train_set = load_train_split(config);
    const AnnNetwork ann = load_ann_checkpoint(config.checkpoint_in);
    const std::vector<Vector> calib =
        calibration_batch(train_set, config.calibration_samples);
    const std::vector<WindowSpec> windows = windows_from_relu_stats(
        ann, calib, config.scheduler.zeta, config.tau_c,
        config.scheduler.min_width);
    std::vector<Vector> alphas;
    if (config.policy == AlphaPolicy::kConstantAlpha) {
      for (const AnnLayer& layer : ann.hidden) {
        alphas.emplace_back(layer.out_size(), config.alpha_value);
      }
    }
    const Network net =
        ann_to_snn(ann, config.policy, alphas, windows, config.tau_c);
    const EquivalenceReport report = check_equivalence(net, ann, calib);
    summary.equivalence_pass = report.pass;
    const std::string ckpt = config.out_dir + "/converted.ttfsckpt";
    save_checkpoint(net, ckpt);
    summary.checkpoint_path = ckpt;

    nlohmann::json eq;
    eq["pass"] = report.pass;
    eq["tolerance"] = report.tolerance;
    eq["logit_max_diff"] = report.logit_max_diff;
    eq["loss_max_diff"] = report.loss_max_diff;
    eq["per_layer_max_residual"] = report.per_layer_max_residual;
    std::ofstream eq_os(config.out_dir + "/equivalence.json");
    eq_os << eq.dump(2) << '\n';
    summary_json["equivalence"] = eq;
  } else if (config.mode == "diagnose") {
    const Network net = load_checkpoint(config.checkpoint_in);
    const Dataset train_set = load_train_split(config);
    const SpectrumReport spectrum = jacobian_spectrum_report(net);
    {
      std::ofstream os(config.out_dir + "/spectrum.csv");
      write_spectrum_csv(spectrum, os);
    }
    {
      std::ofstream os(config.out_dir + "/spectrum.json");
      write_spectrum_json(spectrum, os);
    }
    // Mean gradient-flow profile over a small batch.
    const std::size_t n =
        std::min<std::size_t>(config.batch_size, train_set.size());
    std::vector<double> mean_norms(net.depth(), 0.0);
    for (std::size_t s = 0; s < n; ++s) {
      const ForwardTrace trace = network_forward(train_set.images[s], net);
      const BackwardResult bw = backward(
          trace, net, static_cast<std::size_t>(train_set.labels[s]));
      const GradientNormProfile profile =
          gradient_norm_profile(bw.spike_time_grads);
      for (std::size_t l = 0; l < profile.norms.size(); ++l) {
        mean_norms[l] += profile.norms[l] / static_cast<double>(n);
      }
    }
    const GradientNormProfile mean_profile = [&] {
      GradientNormProfile p;
      p.norms = mean_norms;
      if (p.norms.size() >= 2 && p.norms.back() > 0.0 && p.norms.front() > 0.0) {
        p.growth_rate = std::pow(
            p.norms.front() / p.norms.back(),
            1.0 / static_cast<double>(p.norms.size() - 1));
      }
      return p;
    }();
    nlohmann::json diag;
    diag["gradient_norms"] = mean_profile.norms;
    diag["growth_rate"] = mean_profile.growth_rate;
    diag["spectral_radii"] = spectrum.spectral_radii;
    diag["fraction_outside_unit_circle"] =
        spectrum.fraction_outside_unit_circle;
    std::ofstream os(config.out_dir + "/diagnose.json");
    os << diag.dump(2) << '\n';
    summary_json["diagnose"] = diag;
  } else {
    // train | finetune
    const Dataset train_set = load_train_split(config);
    const Dataset test_set = load_test_split(config);
    double acc_sum = 0.0, ann_acc_sum = 0.0;
    for (std::size_t trial = 0; trial < config.trials; ++trial) {
      const std::uint64_t seed = config.seed + trial;
      Network net;
      if (config.mode == "finetune") {
        if (config.checkpoint_in.empty()) {
          throw ConfigError("finetune requires checkpoint_in");
        }
        if (peek_checkpoint_kind(config.checkpoint_in) == CheckpointKind::kAnn) {
          const AnnNetwork ann = load_ann_checkpoint(config.checkpoint_in);
          const std::vector<Vector> calib =
              calibration_batch(train_set, config.calibration_samples);
          const std::vector<WindowSpec> windows = windows_from_relu_stats(
              ann, calib, config.scheduler.zeta, config.tau_c,
              config.scheduler.min_width);
          std::vector<Vector> alphas;
          if (config.policy == AlphaPolicy::kConstantAlpha) {
            for (const AnnLayer& layer : ann.hidden) {
              alphas.emplace_back(layer.out_size(), config.alpha_value);
            }
          }
          net = ann_to_snn(ann, config.policy, alphas, windows, config.tau_c);
        } else {
          net = load_checkpoint(config.checkpoint_in);
        }
      } else {
        net = make_mlp(train_set.feature_count(), config.hidden_widths,
                       static_cast<std::size_t>(train_set.num_classes),
                       config.policy, config.alpha_value, seed, config.tau_c);
        const std::vector<Vector> calib =
            calibration_batch(train_set, config.calibration_samples);
        init_windows_and_thresholds(net, calib, config.scheduler);
      }

      TrainResult result = train(std::move(net), train_set, test_set,
                                 options_from_config(config, seed));

      if (config.tighten) {
        const std::vector<Vector> calib =
            calibration_batch(train_set, config.calibration_samples);
        const TightenReport tightened = tighten_for_inference(
            result.net, calib, 0.0, config.scheduler.min_width);
        nlohmann::json t;
        t["latency_before"] = tightened.latency_before;
        t["latency_after"] = tightened.latency_after;
        summary_json["tighten"] = t;
      }

      const std::string tag =
          config.trials > 1 ? "_trial" + std::to_string(trial) : "";
      write_metrics_csv(config.out_dir + "/metrics" + tag + ".csv", result);
      if (config.record_steps) {
        write_steps_csv(config.out_dir + "/steps" + tag + ".csv", result);
      }
      const std::string ckpt =
          config.out_dir + "/checkpoint" + tag + ".ttfsckpt";
      CheckpointExtras extras;
      extras.iteration = result.iterations;
      save_checkpoint(result.net, ckpt, &extras);
      summary.checkpoint_path = ckpt;

      nlohmann::json trial_json;
      trial_json["seed"] = seed;
      trial_json["test_accuracy"] = result.final_test_accuracy();
      trial_json["ann_test_accuracy"] = result.final_ann_test_accuracy();
      trial_json["iterations"] = result.iterations;
      trial_json["saturated_low_total"] = result.total_saturated_low;
      summary_json["trials"].push_back(trial_json);
      acc_sum += result.final_test_accuracy();
      ann_acc_sum += result.final_ann_test_accuracy();
    }
    summary.test_accuracy = acc_sum / static_cast<double>(config.trials);
    summary.ann_test_accuracy = ann_acc_sum / static_cast<double>(config.trials);
  }

  summary.wall_seconds = seconds_since(start);
  summary_json["test_accuracy"] = summary.test_accuracy;
  summary_json["ann_test_accuracy"] = summary.ann_test_accuracy;
  summary_json["wall_seconds"] = summary.wall_seconds;
  summary_json["checkpoint"] = summary.checkpoint_path;
  std::ofstream os(config.out_dir + "/summary.json");
  os << summary_json.dump(2) << '\n';
  return summary;
}

}  // namespace ttfs
