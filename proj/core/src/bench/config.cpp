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

#include "uwbpos/bench/config.hpp"

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include <nlohmann/json.hpp>

#include "uwbpos/error.hpp"

namespace uwbpos::bench {
namespace {

using json = nlohmann::ordered_json;

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, value] : j.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
      throw ConfigError(where + ": unknown key '" + key + "'");
    }
  }
}

template <class T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

json vec3_list(const std::vector<Vec3>& v) {
  json out = json::array();
  for (const Vec3& p : v) out.push_back({p.x, p.y, p.z});
  return out;
}

std::vector<Vec3> parse_vec3_list(const json& j) {
  std::vector<Vec3> out;
  for (const auto& p : j) {
    if (!p.is_array() || p.size() != 3) throw ConfigError("geometry.sensors: expected [x, y, z] triples");
    out.push_back({p[0].get<double>(), p[1].get<double>(), p[2].get<double>()});
  }
  return out;
}

void parse_into(const json& root, ExperimentConfig& c) {
  check_keys(root,
             {"geometry", "scenario", "signal", "selection", "experiment", "training", "pnn", "fcl",
              "ablation"},
             "config");
  if (root.contains("geometry")) {
    const json& g = root["geometry"];
    check_keys(g, {"d_x", "d_y", "d_z", "d_r", "d_h", "sensors"}, "geometry");
    read(g, "d_x", c.geometry.d_x);
    read(g, "d_y", c.geometry.d_y);
    read(g, "d_z", c.geometry.d_z);
    read(g, "d_r", c.geometry.d_r);
    read(g, "d_h", c.geometry.d_h);
    c.geometry.sensor_locations = g.contains("sensors")
                                      ? parse_vec3_list(g["sensors"])
                                      : GeometryConfig::vehicle_sensors(c.geometry.d_x, c.geometry.d_y,
                                                                        c.geometry.d_z);
  }
  if (root.contains("scenario")) {
    const json& s = root["scenario"];
    check_keys(s,
               {"preset", "mean_clusters", "shadow_var_db", "cluster_shadow_var_db", "nakagami_mean",
                "nakagami_var", "ray_interarrival_ns", "cluster_decay_ns", "ray_decay_ns",
                "pathloss_exp", "ref_power_dbm", "ref_dist_m", "rays_per_cluster"},
               "scenario");
    if (s.contains("preset")) c.scenario = ScenarioConfig::preset(s["preset"].get<std::string>());
    read(s, "mean_clusters", c.scenario.mean_clusters);
    read(s, "shadow_var_db", c.scenario.shadow_var_db);
    read(s, "cluster_shadow_var_db", c.scenario.cluster_shadow_var_db);
    read(s, "nakagami_mean", c.scenario.nakagami_mean);
    read(s, "nakagami_var", c.scenario.nakagami_var);
    read(s, "ray_interarrival_ns", c.scenario.ray_interarrival_ns);
    read(s, "cluster_decay_ns", c.scenario.cluster_decay_ns);
    read(s, "ray_decay_ns", c.scenario.ray_decay_ns);
    read(s, "pathloss_exp", c.scenario.pathloss_exp);
    read(s, "ref_power_dbm", c.scenario.ref_power_dbm);
    read(s, "ref_dist_m", c.scenario.ref_dist_m);
    read(s, "rays_per_cluster", c.scenario.rays_per_cluster);
  }
  if (root.contains("signal")) {
    const json& s = root["signal"];
    check_keys(s, {"bandwidth_hz", "frame_s", "integration_s"}, "signal");
    read(s, "bandwidth_hz", c.signal.bandwidth_hz);
    read(s, "frame_s", c.signal.frame_s);
    read(s, "integration_s", c.signal.integration_s);
  }
  if (root.contains("selection")) {
    const json& s = root["selection"];
    check_keys(s, {"f_min", "f_max", "weight", "neighbors"}, "selection");
    read(s, "f_min", c.selection.f_min);
    read(s, "f_max", c.selection.f_max);
    read(s, "neighbors", c.selection.neighbors);
    if (s.contains("weight") && !s["weight"].is_null()) {
      c.selection.weight = s["weight"].get<double>();
      c.weight_given = true;
    }
  }
  if (root.contains("experiment")) {
    const json& e = root["experiment"];
    check_keys(e,
               {"snr_db", "condition", "scheme", "learner", "head", "feature_size", "d_train",
                "d_test", "repeats", "seed", "learner_seed", "zones", "n_angular", "n_radial",
                "noise_mc"},
               "experiment");
    if (e.contains("snr_db")) {
      c.snr_db = e["snr_db"].is_array() ? e["snr_db"].get<std::vector<double>>()
                                        : std::vector<double>{e["snr_db"].get<double>()};
    }
    if (e.contains("condition")) c.condition = parse_condition(e["condition"].get<std::string>());
    if (e.contains("scheme")) c.scheme = parse_feature_scheme(e["scheme"].get<std::string>());
    if (e.contains("learner")) c.learner = nn::parse_learner(e["learner"].get<std::string>());
    if (e.contains("head")) c.head = nn::parse_head(e["head"].get<std::string>());
    read(e, "feature_size", c.feature_size);
    read(e, "d_train", c.d_train);
    read(e, "d_test", c.d_test);
    read(e, "repeats", c.repeats);
    read(e, "seed", c.seed);
    read(e, "learner_seed", c.learner_seed);
    read(e, "noise_mc", c.noise_mc);
    if (e.contains("zones")) c.zones = ZoneLayout::for_zones(e["zones"].get<int>(), c.geometry.d_r);
    read(e, "n_angular", c.zones.n_angular);
    read(e, "n_radial", c.zones.n_radial);
  }
  c.zones.d_r = c.geometry.d_r;
  if (root.contains("training")) {
    const json& t = root["training"];
    check_keys(t, {"epochs", "batch_size", "lr", "beta1", "beta2", "eps", "knn_k"}, "training");
    read(t, "epochs", c.train.epochs);
    read(t, "batch_size", c.train.batch_size);
    read(t, "lr", c.train.adam.lr);
    read(t, "beta1", c.train.adam.beta1);
    read(t, "beta2", c.train.adam.beta2);
    read(t, "eps", c.train.adam.eps);
    read(t, "knn_k", c.knn_k);
  }
  if (root.contains("pnn")) {
    const json& p = root["pnn"];
    check_keys(p, {"si_channels", "dp_channels", "kernel", "key_dim", "fc", "use_dp", "use_si", "use_sa"},
               "pnn");
    read(p, "si_channels", c.pnn.si_channels);
    read(p, "dp_channels", c.pnn.dp_channels);
    read(p, "kernel", c.pnn.kernel);
    read(p, "key_dim", c.pnn.key_dim);
    read(p, "fc", c.pnn.fc);
    read(p, "use_dp", c.pnn.use_dp);
    read(p, "use_si", c.pnn.use_si);
    read(p, "use_sa", c.pnn.use_sa);
  }
  if (root.contains("fcl")) {
    const json& f = root["fcl"];
    check_keys(f, {"hidden"}, "fcl");
    read(f, "hidden", c.fcl.hidden);
  }
  if (root.contains("ablation")) {
    const json& a = root["ablation"];
    check_keys(a, {"variants"}, "ablation");
    if (a.contains("variants")) {
      c.variants.clear();
      for (const auto& v : a["variants"]) c.variants.push_back(parse_variant(v.get<std::string>()));
    }
  }
}

}  // namespace

std::string to_string(Condition c) { return c == Condition::kLos ? "LOS" : "NLOS"; }

Condition parse_condition(const std::string& name) {
  if (name == "LOS") return Condition::kLos;
  if (name == "NLOS") return Condition::kNlos;
  throw ConfigError("unknown channel condition '" + name + "' (LOS | NLOS)");
}

Variant parse_variant(const std::string& name) {
  Variant v{name};
  std::stringstream ss(name);
  std::string part;
  while (std::getline(ss, part, '+')) {
    bool* flag = part == "DP" ? &v.dp : part == "SI" ? &v.si : part == "SA" ? &v.sa : nullptr;
    if (!flag || *flag) throw ConfigError("ablation variant '" + name + "': bad component '" + part + "'");
    *flag = true;
  }
  if (v.sa && !v.si) throw ConfigError("ablation variant '" + name + "': SA needs SI");
  if (!v.dp && !v.si) throw ConfigError("ablation variant '" + name + "': needs DP or SI");
  return v;
}

std::vector<Variant> default_variants() {
  std::vector<Variant> out;
  for (const char* n : {"DP", "SI", "DP+SI", "SI+SA", "DP+SI+SA"}) out.push_back(parse_variant(n));
  return out;
}

double ExperimentConfig::selection_weight() const {
  if (weight_given) return selection.weight;
  return condition == Condition::kLos ? 0.8 : 0.6;
}

ScenarioConfig ExperimentConfig::effective_scenario() const {
  ScenarioConfig s = scenario;
  s.los_enabled = condition == Condition::kLos;
  return s;
}

std::vector<int> ExperimentConfig::stored_feature_sizes() const {
  std::vector<int> out;
  for (int f = selection.f_min; f <= selection.f_max; ++f) out.push_back(f);
  if (feature_size > 0 && std::find(out.begin(), out.end(), feature_size) == out.end()) {
    out.push_back(feature_size);
    std::sort(out.begin(), out.end());
  }
  return out;
}

void ExperimentConfig::validate() const {
  geometry.validate();
  scenario.validate();
  signal.validate();
  zones.validate();
  const int nb = signal.num_bins();
  selection.validate(nb);
  if (weight_given && !(selection.weight >= 0 && selection.weight <= 1)) {
    throw ConfigError("selection.weight must lie in [0, 1]");
  }
  if (snr_db.empty()) throw ConfigError("experiment.snr_db: at least one SNR required");
  if (feature_size < 0 || feature_size > nb) {
    throw ConfigError("experiment.feature_size must be in [0, N_b] (0 selects F automatically)");
  }
  const int nz = zones.num_zones();
  if (d_train < nz || d_test < nz) throw ConfigError("experiment: d_train and d_test must be >= N_z");
  if (repeats < 1) throw ConfigError("experiment.repeats must be >= 1");
  if (noise_mc < 1) throw ConfigError("experiment.noise_mc must be >= 1");
  if (train.epochs < 0 || train.batch_size < 1 || !(train.adam.lr > 0)) {
    throw ConfigError("training: epochs >= 0, batch_size >= 1 and lr > 0 required");
  }
  if (knn_k < 1 || knn_k > d_train) throw ConfigError("training.knn_k must be in [1, d_train]");
  try {
    pnn.validate();
  } catch (const InputError& e) {
    throw ConfigError(e.what());
  }
  if (variants.empty()) throw ConfigError("ablation.variants: at least one variant required");
}

ExperimentConfig parse_config(const std::string& json_text) {
  ExperimentConfig c;
  try {
    parse_into(json::parse(json_text), c);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

namespace {

json scenario_json(const ScenarioConfig& s) {
  return {{"preset", s.name},
          {"mean_clusters", s.mean_clusters},
          {"shadow_var_db", s.shadow_var_db},
          {"cluster_shadow_var_db", s.cluster_shadow_var_db},
          {"nakagami_mean", s.nakagami_mean},
          {"nakagami_var", s.nakagami_var},
          {"ray_interarrival_ns", s.ray_interarrival_ns},
          {"cluster_decay_ns", s.cluster_decay_ns},
          {"ray_decay_ns", s.ray_decay_ns},
          {"pathloss_exp", s.pathloss_exp},
          {"ref_power_dbm", s.ref_power_dbm},
          {"ref_dist_m", s.ref_dist_m},
          {"rays_per_cluster", s.rays_per_cluster}};
}

json geometry_json(const GeometryConfig& g) {
  return {{"d_x", g.d_x}, {"d_y", g.d_y}, {"d_z", g.d_z}, {"d_r", g.d_r}, {"d_h", g.d_h},
          {"sensors", vec3_list(g.sensor_locations)}};
}

json signal_json(const SignalConfig& s) {
  return {{"bandwidth_hz", s.bandwidth_hz}, {"frame_s", s.frame_s}, {"integration_s", s.integration_s}};
}

}  // namespace

std::string data_config_json(const ExperimentConfig& c) {
  json j;
  j["geometry"] = geometry_json(c.geometry);
  j["scenario"] = scenario_json(c.scenario);
  j["signal"] = signal_json(c.signal);
  j["condition"] = to_string(c.condition);
  j["n_angular"] = c.zones.n_angular;
  j["n_radial"] = c.zones.n_radial;
  j["feature_sizes"] = c.stored_feature_sizes();
  j["seed"] = c.seed;
  j["noise_mc"] = c.noise_mc;
  return j.dump(2);
}

std::string config_to_json(const ExperimentConfig& c) {
  json j;
  j["geometry"] = geometry_json(c.geometry);
  j["scenario"] = scenario_json(c.scenario);
  j["signal"] = signal_json(c.signal);
  j["selection"] = {{"f_min", c.selection.f_min},
                    {"f_max", c.selection.f_max},
                    {"weight", c.selection_weight()},
                    {"neighbors", c.selection.neighbors}};
  j["experiment"] = {{"snr_db", c.snr_db},
                     {"condition", to_string(c.condition)},
                     {"scheme", to_string(c.scheme)},
                     {"learner", nn::to_string(c.learner)},
                     {"head", nn::to_string(c.head)},
                     {"feature_size", c.feature_size},
                     {"d_train", c.d_train},
                     {"d_test", c.d_test},
                     {"repeats", c.repeats},
                     {"seed", c.seed},
                     {"learner_seed", c.learner_seed},
                     {"n_angular", c.zones.n_angular},
                     {"n_radial", c.zones.n_radial},
                     {"noise_mc", c.noise_mc}};
  j["training"] = {{"epochs", c.train.epochs},       {"batch_size", c.train.batch_size},
                   {"lr", c.train.adam.lr},          {"beta1", c.train.adam.beta1},
                   {"beta2", c.train.adam.beta2},    {"eps", c.train.adam.eps},
                   {"knn_k", c.knn_k}};
  j["pnn"] = {{"si_channels", c.pnn.si_channels}, {"dp_channels", c.pnn.dp_channels},
              {"kernel", c.pnn.kernel},           {"key_dim", c.pnn.key_dim},
              {"fc", c.pnn.fc},                   {"use_dp", c.pnn.use_dp},
              {"use_si", c.pnn.use_si},           {"use_sa", c.pnn.use_sa}};
  j["fcl"] = {{"hidden", c.fcl.hidden}};
  json variants = json::array();
  for (const Variant& v : c.variants) variants.push_back(v.name);
  j["ablation"] = {{"variants", variants}};
  return j.dump(2);
}

}  // namespace uwbpos::bench
