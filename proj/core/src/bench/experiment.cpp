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

#include "uwbpos/bench/experiment.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "uwbpos/error.hpp"
#include "uwbpos/knn_kl.hpp"
#include "uwbpos/rng.hpp"

namespace uwbpos::bench {
namespace {

using json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Zone of a regressed location; points beyond d_r are pulled back onto the
// outer ring along their bearing.
int zone_of_estimate(Vec3 p, const ZoneLayout& layout) {
  const double r = std::hypot(p.x, p.y);
  if (r > layout.d_r) {
    const double s = layout.d_r / r;
    p.x *= s;
    p.y *= s;
  }
  return zone_of(p, layout);
}

void write_file(const std::string& dir, const std::string& name, const std::string& text) {
  std::ofstream out(std::filesystem::path(dir) / name, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + name + " in '" + dir + "'");
  out << text;
}

int resolve_feature_size(const ExperimentConfig& config, const Dataset& train,
                         std::optional<SelectionReport>& selection) {
  if (config.feature_size > 0) return config.feature_size;
  selection = run_size_selection(config, train);
  return selection->f_star;
}

}  // namespace

std::string run_label(double snr_db, int repeat) {
  std::ostringstream ss;
  ss << "snr" << snr_db << "_r" << repeat;
  return ss.str();
}

std::uint64_t learner_seed_for(const ExperimentConfig& config, int repeat) {
  return derive_seed(config.learner_seed, "learner", static_cast<std::uint64_t>(repeat));
}

RunMetrics compute_metrics(std::span<const Prediction> predictions, int num_zones) {
  if (predictions.empty()) throw InputError("compute_metrics: no predictions");
  RunMetrics m;
  m.confusion.assign(num_zones, std::vector<int>(num_zones, 0));
  int hits = 0;
  double sq = 0;
  bool regression = false;
  for (const Prediction& p : predictions) {
    if (p.zone < 0 || p.zone >= num_zones || p.predicted < 0 || p.predicted >= num_zones) {
      throw InputError("compute_metrics: zone index out of range");
    }
    ++m.confusion[p.zone][p.predicted];
    hits += p.zone == p.predicted;
    if (p.location_hat) {
      regression = true;
      const Vec3 d = *p.location_hat - p.location;
      sq += d.x * d.x + d.y * d.y + d.z * d.z;
    }
  }
  m.classification_rate = static_cast<double>(hits) / predictions.size();
  if (regression) m.rmse = std::sqrt(sq / predictions.size());
  return m;
}

void Timings::write(std::ostream& out) const {
  json j = json::object();
  for (const auto& [name, s] : entries) j[name] = s;
  out << j.dump(2) << '\n';
}

std::vector<double> kl_row(const ExperimentConfig& config, const Dataset& train) {
  const int nz = train.header.num_zones;
  std::vector<double> row;
  for (int f = config.selection.f_min; f <= config.selection.f_max; ++f) {
    const std::vector<FeatureSet> features = scheme_features(train, FeatureScheme::kProposed, f);
    const NormalizationStats stats = compute_normalization(features);
    std::vector<std::vector<double>> flat(nz);
    std::vector<std::size_t> counts(nz, 0);
    const std::size_t dim = 2 * static_cast<std::size_t>(f) * train.header.num_sensors;
    for (std::size_t i = 0; i < features.size(); ++i) {
      const auto v = flatten_features(features[i], stats);
      const int z = train.samples[i].zone;
      flat[z].insert(flat[z].end(), v.begin(), v.end());
      ++counts[z];
    }
    std::vector<Matrix> zones;
    for (int z = 0; z < nz; ++z) {
      Matrix m(counts[z], dim);
      std::copy(flat[z].begin(), flat[z].end(), m.data());
      zones.push_back(std::move(m));
    }
    row.push_back(kl_score(zones, config.selection.neighbors, f));
  }
  return row;
}

SelectionReport run_size_selection(const ExperimentConfig& config, const Dataset& train) {
  std::vector<PdpVector> pdps;
  for (const Sample& s : train.samples) pdps.insert(pdps.end(), s.pdps.begin(), s.pdps.end());
  const SelectionStats stats = average_sorted_pdp(pdps, config.signal.samples_per_bin());
  const std::vector<double> kl = kl_row(config, train);
  return evaluate_selection(stats, config.selection.f_min, config.selection.f_max,
                            config.selection_weight(), kl);
}

ReplayInput load_replay_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open replay input '" + path + "'");
  ReplayInput r;
  try {
    const json j = json::parse(in);
    const double scale = j.value("scale", 1.0);
    for (double v : j.at("mean_sorted").get<std::vector<double>>()) r.mean_sorted.push_back(v * scale);
    r.dof = j.value("dof", r.dof);
    r.f_min = j.value("f_min", r.f_min);
    r.f_max = j.value("f_max", r.f_max);
    r.weight = j.value("weight", r.weight);
    r.kl_normalized = j.at("kl_normalized").get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw ConfigError("replay input: " + std::string(e.what()));
  }
  if (static_cast<int>(r.kl_normalized.size()) != r.f_max - r.f_min + 1) {
    throw ConfigError("replay input: kl_normalized needs one value per F in [f_min, f_max]");
  }
  return r;
}

ReplayInput example1_input() {
  ReplayInput r;
  for (double v : {53.9, 26.8, 17.4, 12.5, 9.46, 5.35, 4.72, 3.36, 2.96, 2.55}) r.mean_sorted.push_back(v * 1e-7);
  r.kl_normalized = {0.921, 0.990, 1.0, 0.979, 0.952, 0.926};
  return r;
}

SelectionReport run_replay(const ReplayInput& input) {
  const SelectionStats stats{input.mean_sorted, input.dof};
  return evaluate_selection(stats, input.f_min, input.f_max, input.weight, input.kl_normalized);
}

nn::ModelSpec model_spec(const ExperimentConfig& config, int feature_size, std::uint64_t learner_seed) {
  nn::ModelSpec spec;
  spec.kind = config.learner;
  spec.shape.num_sensors = static_cast<int>(config.geometry.num_sensors());
  spec.shape.num_bins = config.signal.num_bins();
  spec.shape.feature_size = feature_size;
  spec.shape.head = config.head;
  spec.shape.outputs = config.head == nn::Head::kRegression ? 3 : config.zones.num_zones();
  spec.pnn = config.pnn;
  spec.fcl = config.fcl;
  spec.knn_k = config.knn_k;
  spec.seed = learner_seed;
  return spec;
}

nn::TrainedModel train_learner(const ExperimentConfig& config, const Dataset& train, int feature_size,
                               std::uint64_t learner_seed) {
  nn::TrainingSet set;
  set.features = scheme_features(train, config.scheme, feature_size);
  set.zones = train.zones();
  set.locations = train.locations();
  return nn::train(model_spec(config, feature_size, learner_seed), config.train, set);
}

std::vector<Prediction> evaluate_learner(nn::TrainedModel& model, const ExperimentConfig& config,
                                         const Dataset& test) {
  const std::vector<FeatureSet> features =
      scheme_features(test, config.scheme, model.spec.shape.feature_size);
  std::vector<Prediction> out(test.samples.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i].id = test.samples[i].id;
    out[i].zone = test.samples[i].zone;
    out[i].location = test.samples[i].location;
  }
  if (model.spec.shape.head == nn::Head::kRegression) {
    const nn::Mat y = nn::predict(model, features);
    for (std::size_t i = 0; i < out.size(); ++i) {
      const Eigen::Index r = static_cast<Eigen::Index>(i);
      out[i].location_hat = Vec3{y(r, 0), y(r, 1), y(r, 2)};
      out[i].predicted = zone_of_estimate(*out[i].location_hat, config.zones);
    }
  } else {
    const std::vector<int> zones = nn::predict_zones(model, features);
    for (std::size_t i = 0; i < out.size(); ++i) out[i].predicted = zones[i];
  }
  return out;
}

RunResult run_single(const ExperimentConfig& config, const Dataset& train, const Dataset& test,
                     int repeat, Timings* timings) {
  RunResult r;
  r.snr_db = train.header.snr_db;
  r.repeat = repeat;
  const std::string tag = run_label(r.snr_db, repeat);

  auto t0 = Clock::now();
  r.feature_size = resolve_feature_size(config, train, r.selection);
  if (timings && r.selection) timings->add(tag + ".select", seconds_since(t0));

  t0 = Clock::now();
  nn::TrainedModel model = train_learner(config, train, r.feature_size, learner_seed_for(config, repeat));
  if (timings) timings->add(tag + ".train", seconds_since(t0));
  r.loss_trace = model.loss_trace;

  t0 = Clock::now();
  r.predictions = evaluate_learner(model, config, test);
  if (timings) timings->add(tag + ".evaluate", seconds_since(t0));
  r.metrics = compute_metrics(r.predictions, config.zones.num_zones());
  return r;
}

double CellSummary::mean_rate() const {
  double s = 0;
  for (const RunResult& r : runs) s += r.metrics.classification_rate;
  return runs.empty() ? 0.0 : s / runs.size();
}

double CellSummary::std_rate() const {
  if (runs.size() < 2) return 0.0;
  const double mu = mean_rate();
  double s = 0;
  for (const RunResult& r : runs) s += (r.metrics.classification_rate - mu) * (r.metrics.classification_rate - mu);
  return std::sqrt(s / (runs.size() - 1));
}

std::optional<double> CellSummary::mean_rmse() const {
  if (runs.empty() || !runs.front().metrics.rmse) return std::nullopt;
  double s = 0;
  for (const RunResult& r : runs) s += *r.metrics.rmse;
  return s / runs.size();
}

void write_predictions(std::ostream& out, std::span<const RunResult> runs) {
  const bool regression = !runs.empty() && !runs.front().predictions.empty() &&
                          runs.front().predictions.front().location_hat.has_value();
  out << "snr_db,repeat,id,rho,rho_hat";
  if (regression) out << ",x_hat,y_hat,z_hat";
  out << '\n' << std::setprecision(12);
  for (const RunResult& r : runs) {
    for (const Prediction& p : r.predictions) {
      out << r.snr_db << ',' << r.repeat << ',' << p.id << ',' << p.zone << ',' << p.predicted;
      if (p.location_hat) out << ',' << p.location_hat->x << ',' << p.location_hat->y << ',' << p.location_hat->z;
      out << '\n';
    }
  }
}

std::string metrics_json(const ExperimentConfig& config, const ExperimentReport& report) {
  json j;
  j["config"] = json::parse(config_to_json(config));
  json cells = json::array();
  for (const CellSummary& c : report.cells) {
    json cell;
    cell["snr_db"] = c.snr_db;
    cell["classification_rate_mean"] = c.mean_rate();
    cell["classification_rate_std"] = c.std_rate();
    if (auto rmse = c.mean_rmse()) cell["rmse_mean"] = *rmse;
    json runs = json::array();
    for (const RunResult& r : c.runs) {
      json run;
      run["repeat"] = r.repeat;
      run["feature_size"] = r.feature_size;
      run["classification_rate"] = r.metrics.classification_rate;
      if (r.metrics.rmse) run["rmse"] = *r.metrics.rmse;
      run["num_test"] = r.predictions.size();
      run["confusion"] = r.metrics.confusion;
      if (!r.loss_trace.empty()) run["final_train_loss"] = r.loss_trace.back();
      runs.push_back(run);
    }
    cell["runs"] = runs;
    cells.push_back(cell);
  }
  j["cells"] = cells;
  return j.dump(2) + "\n";
}

ExperimentReport run_experiment(const ExperimentConfig& config, const std::string& out_dir) {
  config.validate();
  if (!out_dir.empty()) std::filesystem::create_directories(out_dir);
  ExperimentReport report;
  Timings timings;
  for (double snr : config.snr_db) {
    CellSummary cell;
    cell.snr_db = snr;
    for (int r = 0; r < config.repeats; ++r) {
      auto t0 = Clock::now();
      const Dataset train = generate_dataset(config, "train", snr, config.d_train, split_seed(config, "train", r));
      const Dataset test = generate_dataset(config, "test", snr, config.d_test, split_seed(config, "test", r));
      timings.add(run_label(snr, r) + ".generate", seconds_since(t0));
      RunResult run = run_single(config, train, test, r, &timings);
      if (run.selection && !out_dir.empty()) {
        std::ostringstream table;
        write_criterion_table(table, *run.selection);
        write_file(out_dir, "criterion_" + run_label(snr, r) + ".tsv", table.str());
      }
      cell.runs.push_back(std::move(run));
    }
    report.cells.push_back(std::move(cell));
  }
  if (!out_dir.empty()) {
    std::vector<RunResult> all;
    for (const CellSummary& c : report.cells) all.insert(all.end(), c.runs.begin(), c.runs.end());
    std::ostringstream preds;
    write_predictions(preds, all);
    write_file(out_dir, "predictions.csv", preds.str());
    write_file(out_dir, "metrics.json", metrics_json(config, report));
    std::ostringstream t;
    timings.write(t);
    write_file(out_dir, "timings.json", t.str());
  }
  return report;
}

double AblationReport::mean(std::size_t variant) const {
  double s = 0;
  int n = 0;
  for (const auto& cell : accuracy.at(variant)) {
    for (double a : cell) {
      s += a;
      ++n;
    }
  }
  return n ? s / n : 0.0;
}

AblationReport run_ablation(const ExperimentConfig& config, const std::string& out_dir) {
  config.validate();
  if (!out_dir.empty()) std::filesystem::create_directories(out_dir);
  AblationReport report;
  report.snr_db = config.snr_db;
  for (const Variant& v : config.variants) report.variants.push_back(v.name);
  report.accuracy.assign(config.variants.size(),
                         std::vector<std::vector<double>>(config.snr_db.size()));
  Timings timings;

  ExperimentConfig base = config;
  base.learner = nn::LearnerKind::kPnn;
  for (std::size_t c = 0; c < config.snr_db.size(); ++c) {
    const double snr = config.snr_db[c];
    for (int r = 0; r < config.repeats; ++r) {
      auto t0 = Clock::now();
      const Dataset train = generate_dataset(base, "train", snr, base.d_train, split_seed(base, "train", r));
      const Dataset test = generate_dataset(base, "test", snr, base.d_test, split_seed(base, "test", r));
      timings.add(run_label(snr, r) + ".generate", seconds_since(t0));
      std::optional<SelectionReport> selection;
      const int f = resolve_feature_size(base, train, selection);
      for (std::size_t v = 0; v < config.variants.size(); ++v) {
        ExperimentConfig variant = base;
        variant.pnn.use_dp = config.variants[v].dp;
        variant.pnn.use_si = config.variants[v].si;
        variant.pnn.use_sa = config.variants[v].sa;
        t0 = Clock::now();
        nn::TrainedModel model = train_learner(variant, train, f, learner_seed_for(base, r));
        const auto preds = evaluate_learner(model, variant, test);
        timings.add(run_label(snr, r) + "." + config.variants[v].name, seconds_since(t0));
        report.accuracy[v][c].push_back(compute_metrics(preds, base.zones.num_zones()).classification_rate);
      }
    }
  }

  if (!out_dir.empty()) {
    std::ostringstream tsv;
    tsv << std::setprecision(6) << "variant\tmean";
    for (double snr : report.snr_db)
      for (int r = 0; r < config.repeats; ++r) tsv << '\t' << run_label(snr, r);
    tsv << '\n';
    json j;
    j["config"] = json::parse(config_to_json(config));
    json rows = json::array();
    for (std::size_t v = 0; v < report.variants.size(); ++v) {
      tsv << report.variants[v] << '\t' << report.mean(v);
      for (const auto& cell : report.accuracy[v])
        for (double a : cell) tsv << '\t' << a;
      tsv << '\n';
      rows.push_back({{"variant", report.variants[v]},
                      {"classification_rate_mean", report.mean(v)},
                      {"classification_rate", report.accuracy[v]}});
    }
    j["variants"] = rows;
    write_file(out_dir, "ablation.tsv", tsv.str());
    write_file(out_dir, "ablation.json", j.dump(2) + "\n");
    std::ostringstream t;
    timings.write(t);
    write_file(out_dir, "timings.json", t.str());
  }
  return report;
}

}  // namespace uwbpos::bench
