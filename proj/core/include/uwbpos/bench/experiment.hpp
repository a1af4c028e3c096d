// Copyright 2026 The uwbpos Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "uwbpos/bench/config.hpp"
#include "uwbpos/bench/dataset.hpp"
#include "uwbpos/nn/model.hpp"
#include "uwbpos/size_select.hpp"

namespace uwbpos::bench {

struct Prediction {
  std::uint64_t id = 0;
  int zone = 0;       // rho
  int predicted = 0;  // rho-hat (zone of the predicted location for regression)
  std::optional<Vec3> location_hat;
  Vec3 location;
};

struct RunMetrics {
  double classification_rate = 0;
  std::optional<double> rmse;  // regression head only
  std::vector<std::vector<int>> confusion;  // [true zone][predicted zone]
};

RunMetrics compute_metrics(std::span<const Prediction> predictions, int num_zones);

// Wall-clock seconds per named stage; kept apart from metrics so that metrics
// files are reproducible byte for byte.
struct Timings {
  std::vector<std::pair<std::string, double>> entries;
  void add(const std::string& name, double seconds) { entries.emplace_back(name, seconds); }
  void write(std::ostream& out) const;
};

// KL_F over the zone partition of the training split, for F in [f_min, f_max].
std::vector<double> kl_row(const ExperimentConfig& config, const Dataset& train);

// Averaged sorted PDP of the training split, KL row and the full per-F report.
SelectionReport run_size_selection(const ExperimentConfig& config, const Dataset& train);

// Inputs of the worked example: averaged sorted PDP and term (b) given
// directly instead of being estimated from data.
struct ReplayInput {
  std::vector<double> mean_sorted;
  double dof = 2;
  int f_min = 3;
  int f_max = 8;
  double weight = 0.5;
  std::vector<double> kl_normalized;
};

ReplayInput load_replay_input(const std::string& path);
// The worked example with its published averaged PDP and term (b); the same
// numbers as configs/example1.json.
ReplayInput example1_input();
SelectionReport run_replay(const ReplayInput& input);

// "snr<dB>_r<repeat>", the tag used in file names and timing keys.
std::string run_label(double snr_db, int repeat);
// Learner seed of a repeat; every learner and variant of that repeat shares it.
std::uint64_t learner_seed_for(const ExperimentConfig& config, int repeat);

nn::ModelSpec model_spec(const ExperimentConfig& config, int feature_size, std::uint64_t learner_seed);

nn::TrainedModel train_learner(const ExperimentConfig& config, const Dataset& train, int feature_size,
                               std::uint64_t learner_seed);

std::vector<Prediction> evaluate_learner(nn::TrainedModel& model, const ExperimentConfig& config,
                                         const Dataset& test);

struct RunResult {
  double snr_db = 0;
  int repeat = 0;
  int feature_size = 0;
  std::optional<SelectionReport> selection;  // when F was chosen by the criterion
  std::vector<Prediction> predictions;
  RunMetrics metrics;
  std::vector<double> loss_trace;
};

// Features, training and evaluation for one (train, test) pair.
RunResult run_single(const ExperimentConfig& config, const Dataset& train, const Dataset& test,
                     int repeat, Timings* timings = nullptr);

struct CellSummary {
  double snr_db = 0;
  std::vector<RunResult> runs;
  double mean_rate() const;
  double std_rate() const;
  std::optional<double> mean_rmse() const;
};

struct ExperimentReport {
  std::vector<CellSummary> cells;
};

// Every SNR cell and repeat: generate the splits, select F if asked, train,
// evaluate. Writes predictions.csv, metrics.json, timings.json and one
// criterion table per selection run into out_dir (skipped when empty).
ExperimentReport run_experiment(const ExperimentConfig& config, const std::string& out_dir);

struct AblationReport {
  std::vector<std::string> variants;
  std::vector<double> snr_db;
  // accuracy[variant][cell][repeat]
  std::vector<std::vector<std::vector<double>>> accuracy;
  double mean(std::size_t variant) const;  // over every cell and repeat
};

// P-NN variants trained on shared splits with a shared learner seed per
// repeat. Writes ablation.tsv, ablation.json and timings.json into out_dir.
AblationReport run_ablation(const ExperimentConfig& config, const std::string& out_dir);

void write_predictions(std::ostream& out, std::span<const RunResult> runs);
std::string metrics_json(const ExperimentConfig& config, const ExperimentReport& report);

}  // namespace uwbpos::bench
