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

#ifndef TTFS_EXPERIMENT_H_
#define TTFS_EXPERIMENT_H_

#include <string>

#include "ttfs/constraints.hpp"
#include "ttfs/dataset.hpp"
#include "ttfs/forward.hpp"
#include "ttfs/grad.hpp"
#include "ttfs/network.hpp"
#include "ttfs/scheduler.hpp"

namespace ttfs {

// Fully-connected spiking network with N(0,1)/sqrt(fan_in) weights, zero
// threshold shifts and provisional unit-width windows (run the scheduler
// initialization before training). Under kConstantAlpha, weight rows are
// resampled until the slope-at-threshold clears a small positive floor.
Network make_mlp(std::size_t input_size,
                 const std::vector<std::size_t>& hidden_widths,
                 std::size_t num_classes, AlphaPolicy policy,
                 double alpha_value, std::uint64_t seed, double tau_c = 1.0);

// ReLU twin builder with the same weight initialization and zero biases.
// When max_row_sum > 0, rows are resampled until their sum stays below it
// (keeps the constant-alpha inverse mapping feasible).
AnnNetwork make_ann_mlp(std::size_t input_size,
                        const std::vector<std::size_t>& hidden_widths,
                        std::size_t num_classes, std::uint64_t seed,
                        double max_row_sum = 0.0);

struct TrainOptions {
  OptimizerKind optimizer = OptimizerKind::kAdam;
  double lr0 = 5e-4;
  bool exponential_lr = true;  // lr0 * 0.9^(it/5000)
  std::size_t epochs = 1;
  std::size_t batch_size = 8;
  std::uint64_t seed = 1;
  // Trains an interleaved reference ReLU network (same data order, same
  // optimizer) initialized from the mapped SNN parameters.
  bool dual_track = false;
  bool adaptive_tmax = true;
  SchedulerConfig scheduler;
  QuantSpec constraints;
  bool record_steps = false;
  std::size_t log_stride = 1;
  std::size_t max_steps = 0;  // 0 = run all epochs
  bool eval_each_epoch = true;
  std::size_t stats_samples = 2048;  // cap for percentile window sizing
};

struct StepRecord {
  long step = 0;
  double lr = 0.0;
  double snn_loss = 0.0;
  double ann_loss = 0.0;
  std::vector<double> cosines;  // per layer, dual-track only
  std::vector<double> delta_tmax;
  std::size_t saturated_low = 0;
};

struct EpochRecord {
  std::size_t epoch = 0;
  long steps_done = 0;
  double train_loss = 0.0;
  double train_accuracy = 0.0;
  double test_accuracy = 0.0;
  double ann_test_accuracy = 0.0;
  std::vector<double> delta_tmax_sum;
  std::size_t saturated_low = 0;
  double seconds = 0.0;
};

struct TrainResult {
  Network net;
  AnnNetwork ann;
  bool has_ann = false;
  std::vector<StepRecord> steps;
  std::vector<EpochRecord> epochs;
  long iterations = 0;
  std::size_t total_saturated_low = 0;

  double final_test_accuracy() const {
    return epochs.empty() ? 0.0 : epochs.back().test_accuracy;
  }
  double final_ann_test_accuracy() const {
    return epochs.empty() ? 0.0 : epochs.back().ann_test_accuracy;
  }
};

// The training loop: per batch, forward traces, exact gradients (mean over
// the batch, sequential reduction), adaptive window updates before the
// optimizer step, then SGD or Adam on W and D. Constraint handling: spike
// jitter and time quantization run as forward hooks at train and eval time;
// weight quantization keeps full-precision latent weights and quantizes
// them onto a fixed grid for every forward/backward (straight-through);
// percentile-reduced windows are installed once at entry and the adaptive
// rule is disabled while they are in force.
TrainResult train(Network net, const Dataset& train_data,
                  const Dataset& test_data, const TrainOptions& options);

double evaluate_accuracy(const Network& net, const Dataset& data,
                         const PerturbationHook& hook = PerturbationHook());
double evaluate_ann_accuracy(const AnnNetwork& ann, const Dataset& data);

struct ExperimentConfig {
  std::string mode = "train";  // train | finetune | convert | diagnose
  std::vector<std::size_t> hidden_widths = {340};
  AlphaPolicy policy = AlphaPolicy::kLinearlyMappable;
  double alpha_value = 1.0;
  double tau_c = 1.0;
  std::string dataset = "mnist";  // mnist | synthetic
  std::string data_dir = "data/mnist";
  std::size_t train_limit = 0;
  std::size_t test_limit = 0;
  std::size_t synthetic_features = 64;
  int synthetic_classes = 10;
  std::size_t synthetic_samples = 2048;
  std::string optimizer;  // "", "sgd", "adam"; empty = mode-dependent default
  double lr0 = 5e-4;
  bool exponential_lr = true;
  std::size_t epochs = 50;
  std::size_t batch_size = 8;
  std::uint64_t seed = 1;
  std::size_t trials = 1;
  bool dual_track = false;
  bool adaptive_tmax = true;
  SchedulerConfig scheduler;
  QuantSpec constraints;
  std::size_t calibration_samples = 256;
  std::size_t log_stride = 1;
  bool record_steps = false;
  std::string checkpoint_in;
  std::string out_dir = "out";
  bool tighten = false;  // tighten windows for inference after training

  OptimizerKind resolved_optimizer() const;
  void validate() const;
};

// Flat key = value file with [sections]; unknown keys are errors. Lines
// starting with # are comments.
ExperimentConfig parse_config_file(const std::string& path);
// Applies one "section.key=value" assignment (the CLI override path).
void apply_config_value(ExperimentConfig& config, const std::string& section,
                        const std::string& key, const std::string& value);

struct RunSummary {
  std::string mode;
  double test_accuracy = 0.0;
  double ann_test_accuracy = 0.0;
  double wall_seconds = 0.0;
  std::string checkpoint_path;
  bool equivalence_pass = false;
};

// Executes one experiment end to end and writes metrics CSV, a JSON summary
// and (for training modes) a checkpoint into out_dir.
RunSummary run_experiment(const ExperimentConfig& config);

}  // namespace ttfs

#endif  // TTFS_EXPERIMENT_H_
