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

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "uwbpos/bench/config.hpp"
#include "uwbpos/bench/dataset.hpp"
#include "uwbpos/bench/experiment.hpp"
#include "uwbpos/error.hpp"
#include "uwbpos/frontend.hpp"
#include "uwbpos/nn/model.hpp"

namespace {

using namespace uwbpos;
using namespace uwbpos::bench;
using json = nlohmann::json;

// Command-line overrides applied on top of the config file.
struct Overrides {
  std::string config_path;
  std::string out = "out";
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> learner_seed;
  std::vector<double> snr_db;
  std::optional<std::string> condition;
  std::optional<std::string> scenario;
  std::optional<std::string> learner;
  std::optional<std::string> scheme;
  std::optional<std::string> head;
  std::optional<int> feature_size;
  std::optional<int> d_train;
  std::optional<int> d_test;
  std::optional<int> repeats;
  std::optional<int> zones;
  std::optional<int> epochs;
  std::optional<int> batch_size;
  std::optional<double> learning_rate;
  std::vector<std::string> variants;
};

void add_common(CLI::App* app, Overrides& o) {
  app->add_option("--config", o.config_path, "JSON config file (defaults apply when omitted)")
      ->check(CLI::ExistingFile);
  app->add_option("--out", o.out, "Output directory")->capture_default_str();
  app->add_option("--seed", o.seed, "Master data seed");
  app->add_option("--learner-seed", o.learner_seed, "Learner seed");
  app->add_option("--snr", o.snr_db, "SNR values in dB");
  app->add_option("--condition", o.condition, "LOS or NLOS");
  app->add_option("--scenario", o.scenario, "Scenario preset, RES or OUT");
  app->add_option("--learner", o.learner, "pnn, fcl or knn");
  app->add_option("--scheme", o.scheme, "proposed, first-f or random-f");
  app->add_option("--head", o.head, "classification or regression");
  app->add_option("--feature-size", o.feature_size, "F; 0 selects it with the criterion");
  app->add_option("--d-train", o.d_train, "Training samples per split");
  app->add_option("--d-test", o.d_test, "Test samples per split");
  app->add_option("--repeats", o.repeats, "Independent repeats per SNR");
  app->add_option("--zones", o.zones, "Zone count, 8 or 32")->check(CLI::IsMember({8, 32}));
  app->add_option("--epochs", o.epochs, "Training epochs");
  app->add_option("--batch-size", o.batch_size, "Mini-batch size");
  app->add_option("--lr", o.learning_rate, "Adam learning rate");
  app->add_option("--variants", o.variants, "Ablation variants, e.g. DP DP+SI+SA");
}

// The overrides go through the JSON parser so they get the same validation
// as values given in a file.
ExperimentConfig resolve_config(const Overrides& o) {
  json j = json::object();
  if (!o.config_path.empty()) {
    std::ifstream in(o.config_path);
    std::stringstream ss;
    ss << in.rdbuf();
    try {
      j = json::parse(ss.str());
    } catch (const json::exception& e) {
      throw ConfigError(o.config_path + ": " + e.what());
    }
  }
  auto& e = j["experiment"];
  if (o.seed) e["seed"] = *o.seed;
  if (o.learner_seed) e["learner_seed"] = *o.learner_seed;
  if (!o.snr_db.empty()) e["snr_db"] = o.snr_db;
  if (o.condition) e["condition"] = *o.condition;
  if (o.learner) e["learner"] = *o.learner;
  if (o.scheme) e["scheme"] = *o.scheme;
  if (o.head) e["head"] = *o.head;
  if (o.feature_size) e["feature_size"] = *o.feature_size;
  if (o.d_train) e["d_train"] = *o.d_train;
  if (o.d_test) e["d_test"] = *o.d_test;
  if (o.repeats) e["repeats"] = *o.repeats;
  if (o.zones) e["zones"] = *o.zones;
  if (e.empty()) j.erase("experiment");
  if (o.scenario) j["scenario"]["preset"] = *o.scenario;
  if (o.epochs) j["training"]["epochs"] = *o.epochs;
  if (o.batch_size) j["training"]["batch_size"] = *o.batch_size;
  if (o.learning_rate) j["training"]["lr"] = *o.learning_rate;
  if (!o.variants.empty()) j["ablation"]["variants"] = o.variants;
  return parse_config(j.dump());
}

std::filesystem::path prepare_out(const std::string& dir) {
  std::filesystem::create_directories(dir);
  return dir;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  out << text;
}

json selection_json(const SelectionReport& rep) {
  json rows = json::array();
  for (const PerFQuantities& q : rep.rows) {
    rows.push_back({{"F", q.f},
                    {"psi2", q.psi2},
                    {"lambda", q.lambda},
                    {"threshold", q.threshold},
                    {"ll_normalized", q.ll_gain_normalized},
                    {"detection", q.detection},
                    {"acquisition", q.acquisition},
                    {"a", q.information},
                    {"kl", q.kl},
                    {"b", q.kl_normalized},
                    {"criterion", q.criterion}});
  }
  return {{"weight", rep.weight}, {"f_star", rep.f_star}, {"rows", rows}};
}

void write_selection(const std::filesystem::path& dir, const SelectionReport& rep) {
  std::ostringstream table;
  write_criterion_table(table, rep);
  write_text(dir / "criterion.tsv", table.str());
  write_text(dir / "selection.json", selection_json(rep).dump(2) + "\n");
  std::cout << table.str() << "F* = " << rep.f_star << "\n";
}

// Loads a dataset file or, when no path is given, generates repeat 0 of the
// split at the first configured SNR.
Dataset obtain_split(const ExperimentConfig& config, const std::string& path, const std::string& split) {
  if (!path.empty()) return load_dataset(path, config.zones);
  return generate_dataset(config, split, config.snr_db.front(),
                          split == "train" ? config.d_train : config.d_test,
                          split_seed(config, split, 0));
}

int cmd_simulate(const Overrides& o, int pdp_rows) {
  const ExperimentConfig config = resolve_config(o);
  const auto dir = prepare_out(o.out);
  for (double snr : config.snr_db) {
    for (int r = 0; r < config.repeats; ++r) {
      const std::string tag = run_label(snr, r);
      for (const std::string split : {"train", "test"}) {
        const int size = split == "train" ? config.d_train : config.d_test;
        const Dataset d = generate_dataset(config, split, snr, size, split_seed(config, split, r));
        save_dataset((dir / (split + "_" + tag + ".uwbds")).string(), d);
        if (split == "train" && pdp_rows > 0) {
          std::vector<PdpVector> rows;
          for (const Sample& s : d.samples) {
            if (static_cast<int>(rows.size()) >= pdp_rows) break;
            rows.insert(rows.end(), s.pdps.begin(), s.pdps.end());
          }
          std::ostringstream t;
          write_pdp_table(t, config.signal, rows);
          write_text(dir / ("pdp_" + tag + ".tsv"), t.str());
        }
        std::cout << split << ' ' << tag << ": " << d.samples.size() << " samples\n";
      }
    }
  }
  write_text(dir / "config.json", config_to_json(config));
  return 0;
}

int cmd_select(const Overrides& o, const std::string& train_path) {
  const ExperimentConfig config = resolve_config(o);
  const auto dir = prepare_out(o.out);
  write_selection(dir, run_size_selection(config, obtain_split(config, train_path, "train")));
  return 0;
}

int cmd_train(const Overrides& o, const std::string& train_path) {
  const ExperimentConfig config = resolve_config(o);
  const auto dir = prepare_out(o.out);
  const Dataset train = obtain_split(config, train_path, "train");
  int f = config.feature_size;
  if (f == 0) {
    const SelectionReport rep = run_size_selection(config, train);
    write_selection(dir, rep);
    f = rep.f_star;
  }
  nn::TrainedModel model = train_learner(config, train, f, learner_seed_for(config, 0));
  {
    std::ofstream out(dir / "model.uwbm", std::ios::binary);
    if (!out) throw ConfigError("cannot write model.uwbm");
    nn::save_model(out, model);
  }
  const json summary = {{"feature_size", f},
                        {"initial_loss", model.initial_loss},
                        {"loss_trace", model.loss_trace},
                        {"parameter_checksum", nn::parameter_checksum(model)}};
  write_text(dir / "train.json", summary.dump(2) + "\n");
  std::cout << "trained F=" << f << ", final loss "
            << (model.loss_trace.empty() ? model.initial_loss : model.loss_trace.back()) << "\n";
  return 0;
}

int cmd_evaluate(const Overrides& o, const std::string& model_path, const std::string& test_path) {
  const ExperimentConfig config = resolve_config(o);
  const auto dir = prepare_out(o.out);
  std::ifstream in(model_path, std::ios::binary);
  if (!in) throw ConfigError("cannot open model '" + model_path + "'");
  nn::TrainedModel model = nn::load_model(in);
  const Dataset test = obtain_split(config, test_path, "test");

  RunResult run;
  run.snr_db = test.header.snr_db;
  run.feature_size = model.spec.shape.feature_size;
  run.predictions = evaluate_learner(model, config, test);
  run.metrics = compute_metrics(run.predictions, config.zones.num_zones());
  run.loss_trace = model.loss_trace;
  ExperimentReport report;
  report.cells.push_back({run.snr_db, {run}});

  std::ostringstream csv;
  write_predictions(csv, report.cells.front().runs);
  write_text(dir / "predictions.csv", csv.str());
  write_text(dir / "metrics.json", metrics_json(config, report));
  std::cout << "classification rate " << run.metrics.classification_rate;
  if (run.metrics.rmse) std::cout << ", RMSE " << *run.metrics.rmse << " m";
  std::cout << "\n";
  return 0;
}

int cmd_run(const Overrides& o) {
  const ExperimentConfig config = resolve_config(o);
  const auto dir = prepare_out(o.out);
  const ExperimentReport report = run_experiment(config, dir.string());
  for (const CellSummary& c : report.cells) {
    std::cout << "SNR " << c.snr_db << " dB: rate " << c.mean_rate() << " +- " << c.std_rate();
    if (auto rmse = c.mean_rmse()) std::cout << ", RMSE " << *rmse << " m";
    std::cout << "\n";
  }
  return 0;
}

int cmd_ablate(const Overrides& o) {
  ExperimentConfig config = resolve_config(o);
  config.learner = nn::LearnerKind::kPnn;
  const auto dir = prepare_out(o.out);
  const AblationReport report = run_ablation(config, dir.string());
  for (std::size_t v = 0; v < report.variants.size(); ++v) {
    std::cout << report.variants[v] << '\t' << report.mean(v) << "\n";
  }
  return 0;
}

int cmd_example1(const std::string& input, const std::string& out) {
  const ReplayInput in = input.empty() ? example1_input() : load_replay_input(input);
  write_selection(prepare_out(out), run_replay(in));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"UWB zone positioning testbed"};
  app.require_subcommand(1);

  Overrides o;
  int pdp_rows = 0;
  std::string train_path, test_path, model_path, replay_path;

  auto* simulate = app.add_subcommand("simulate", "Generate train and test datasets");
  add_common(simulate, o);
  simulate->add_option("--pdp-rows", pdp_rows, "Write PDPs of the first N training samples per split");

  auto* select = app.add_subcommand("select-size", "Per-F criterion table and F*");
  add_common(select, o);
  select->add_option("--train", train_path, "Training dataset file")->check(CLI::ExistingFile);

  auto* train = app.add_subcommand("train", "Train a learner and write a checkpoint");
  add_common(train, o);
  train->add_option("--train", train_path, "Training dataset file")->check(CLI::ExistingFile);

  auto* evaluate = app.add_subcommand("evaluate", "Evaluate a checkpoint on a test split");
  add_common(evaluate, o);
  evaluate->add_option("--model", model_path, "Checkpoint from train")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--test", test_path, "Test dataset file")->check(CLI::ExistingFile);

  auto* run = app.add_subcommand("run", "Generate, select, train and evaluate over the SNR grid");
  add_common(run, o);

  auto* ablate = app.add_subcommand("ablate", "P-NN architecture ablation");
  add_common(ablate, o);

  auto* example1 = app.add_subcommand("example1", "Replay the worked feature-size example");
  example1->add_option("--input", replay_path, "Replay JSON (built-in example when omitted)")
      ->check(CLI::ExistingFile);
  example1->add_option("--out", o.out, "Output directory")->capture_default_str();

  CLI11_PARSE(app, argc, argv);
  try {
    if (*simulate) return cmd_simulate(o, pdp_rows);
    if (*select) return cmd_select(o, train_path);
    if (*train) return cmd_train(o, train_path);
    if (*evaluate) return cmd_evaluate(o, model_path, test_path);
    if (*run) return cmd_run(o);
    if (*ablate) return cmd_ablate(o);
    if (*example1) return cmd_example1(replay_path, o.out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
