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

#include "uwbpos/bench/dataset.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include <nlohmann/json.hpp>

#include "uwbpos/error.hpp"
#include "uwbpos/rng.hpp"

namespace uwbpos::bench {
namespace {

using json = nlohmann::ordered_json;

constexpr char kMagic[8] = {'U', 'W', 'B', 'P', 'D', 'S', '0', '1'};

template <class T>
void put(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
void put_span(std::ostream& out, std::span<const T> v) {
  out.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size_bytes()));
}

template <class T>
T get(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!in) throw InputError("dataset file truncated");
  return v;
}

template <class T>
void get_span(std::istream& in, std::span<T> v) {
  in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(v.size_bytes()));
  if (!in) throw InputError("dataset file truncated");
}

}  // namespace

int Dataset::feature_index(int feature_size) const {
  const auto& fs = header.feature_sizes;
  const auto it = std::find(fs.begin(), fs.end(), feature_size);
  return it == fs.end() ? -1 : static_cast<int>(it - fs.begin());
}

std::vector<int> Dataset::zones() const {
  std::vector<int> out;
  out.reserve(samples.size());
  for (const Sample& s : samples) out.push_back(s.zone);
  return out;
}

std::vector<Vec3> Dataset::locations() const {
  std::vector<Vec3> out;
  out.reserve(samples.size());
  for (const Sample& s : samples) out.push_back(s.location);
  return out;
}

std::uint64_t split_seed(const ExperimentConfig& config, const std::string& split, int repeat) {
  return derive_seed(derive_seed(config.seed, "data", static_cast<std::uint64_t>(repeat)), split);
}

double noise_variance(const ExperimentConfig& config, double snr_db) {
  ScenarioConfig reference = config.scenario;
  reference.los_enabled = true;
  return calibrate_noise(snr_db, config.geometry, reference, config.noise_mc,
                         derive_seed(config.seed, "noise-calibration"));
}

Dataset generate_dataset(const ExperimentConfig& config, const std::string& split, double snr_db,
                         int size, std::uint64_t seed) {
  config.validate();
  const int nz = config.zones.num_zones();
  if (size < nz) throw InputError("generate_dataset: size must be at least N_z");
  const ScenarioConfig scenario = config.effective_scenario();

  Dataset data;
  DatasetHeader& h = data.header;
  h.split = split;
  h.seed = seed;
  h.snr_db = snr_db;
  h.noise_var = noise_variance(config, snr_db);
  h.num_sensors = static_cast<int>(config.geometry.num_sensors());
  h.num_bins = config.signal.num_bins();
  h.num_zones = nz;
  h.feature_sizes = config.stored_feature_sizes();
  h.config_json = data_config_json(config);

  std::vector<int> quota(nz, size / nz);
  for (int z = 0; z < size % nz; ++z) ++quota[z];

  data.samples.reserve(size);
  for (std::uint64_t attempt = 0; static_cast<int>(data.samples.size()) < size; ++attempt) {
    const Vec3 target = sample_target(derive_seed(seed, "target", attempt), config.geometry);
    const int zone = zone_of(target, config.zones);
    if (quota[zone] == 0) continue;
    --quota[zone];

    Sample s;
    s.id = data.samples.size();
    s.zone = zone;
    s.location = target;
    const ChannelRealization channel =
        draw_channel(derive_seed(seed, "channel", attempt), target, config.geometry, scenario);
    s.pdps.reserve(channel.sensors.size());
    for (std::size_t m = 0; m < channel.sensors.size(); ++m) {
      const Waveform r = synthesize_received(channel.sensors[m], config.signal, h.noise_var,
                                             derive_seed(derive_seed(seed, "noise", attempt), "sensor", m));
      s.pdps.push_back(energy_detect(r, config.signal));
    }
    for (int f : h.feature_sizes) s.features.push_back(extract_features(s.pdps, f));
    data.samples.push_back(std::move(s));
  }
  return data;
}

std::vector<FeatureSet> scheme_features(const Dataset& data, FeatureScheme scheme, int feature_size) {
  const int idx = data.feature_index(feature_size);
  std::vector<FeatureSet> out;
  out.reserve(data.samples.size());
  for (const Sample& s : data.samples) {
    if (scheme == FeatureScheme::kProposed && idx >= 0) {
      out.push_back(s.features[idx]);
    } else {
      out.push_back(make_features(scheme, s.pdps, feature_size,
                                  derive_seed(data.header.seed, "random-f", s.id)));
    }
  }
  return out;
}

void write_dataset(std::ostream& out, const Dataset& data) {
  const DatasetHeader& h = data.header;
  json j;
  j["format"] = "uwbpos-dataset";
  j["version"] = 1;
  j["split"] = h.split;
  j["seed"] = h.seed;
  j["snr_db"] = h.snr_db;
  j["noise_var"] = h.noise_var;
  j["num_samples"] = data.samples.size();
  j["num_sensors"] = h.num_sensors;
  j["num_bins"] = h.num_bins;
  j["num_zones"] = h.num_zones;
  j["feature_sizes"] = h.feature_sizes;
  j["record"] = "u64 id, i32 zone, f64 x y z, f64 pdp[M][N_b], then per F: f64 power[M][F], i32 bin[M][F]";
  j["config"] = json::parse(h.config_json);
  const std::string header = j.dump();

  out.write(kMagic, sizeof kMagic);
  put<std::uint64_t>(out, header.size());
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  for (const Sample& s : data.samples) {
    if (static_cast<int>(s.pdps.size()) != h.num_sensors ||
        s.features.size() != h.feature_sizes.size()) {
      throw InputError("write_dataset: sample " + std::to_string(s.id) + " does not match the header");
    }
    put<std::uint64_t>(out, s.id);
    put<std::int32_t>(out, s.zone);
    put(out, s.location.x);
    put(out, s.location.y);
    put(out, s.location.z);
    for (const PdpVector& p : s.pdps) {
      if (static_cast<int>(p.size()) != h.num_bins) throw InputError("write_dataset: PDP length mismatch");
      put_span<double>(out, p);
    }
    for (const FeatureSet& fs : s.features) {
      for (const SensorFeatures& sf : fs.sensors) put_span<double>(out, sf.powers);
      for (const SensorFeatures& sf : fs.sensors) {
        for (int b : sf.bins) put<std::int32_t>(out, b);
      }
    }
  }
  if (!out) throw ConfigError("write_dataset: write failed");
}

Dataset read_dataset(std::istream& in, const ZoneLayout& layout) {
  char magic[sizeof kMagic];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kMagic, sizeof kMagic) != 0) throw InputError("not a uwbpos dataset file");
  const auto len = get<std::uint64_t>(in);
  if (len > (1u << 30)) throw InputError("dataset header is corrupt");
  std::string header(len, '\0');
  in.read(header.data(), static_cast<std::streamsize>(len));
  if (!in) throw InputError("dataset file truncated");

  Dataset data;
  DatasetHeader& h = data.header;
  std::size_t count = 0;
  try {
    const json j = json::parse(header);
    h.split = j.at("split");
    h.seed = j.at("seed");
    h.snr_db = j.at("snr_db");
    h.noise_var = j.at("noise_var");
    h.num_sensors = j.at("num_sensors");
    h.num_bins = j.at("num_bins");
    h.num_zones = j.at("num_zones");
    h.feature_sizes = j.at("feature_sizes").get<std::vector<int>>();
    h.config_json = j.at("config").dump(2);
    count = j.at("num_samples");
  } catch (const json::exception& e) {
    throw InputError(std::string("dataset header: ") + e.what());
  }
  if (h.num_sensors < 1 || h.num_bins < 1) throw InputError("dataset header: bad dimensions");
  for (int f : h.feature_sizes) {
    if (f < 1 || f > h.num_bins) throw InputError("dataset header: bad feature size");
  }
  if (h.num_zones != layout.num_zones()) {
    throw InputError("dataset has " + std::to_string(h.num_zones) + " zones, layout has " +
                     std::to_string(layout.num_zones()));
  }

  data.samples.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    Sample& s = data.samples[i];
    s.id = get<std::uint64_t>(in);
    s.zone = get<std::int32_t>(in);
    s.location.x = get<double>(in);
    s.location.y = get<double>(in);
    s.location.z = get<double>(in);
    s.pdps.assign(h.num_sensors, PdpVector(h.num_bins));
    for (PdpVector& p : s.pdps) get_span<double>(in, p);
    for (int f : h.feature_sizes) {
      FeatureSet fs;
      fs.feature_size = f;
      fs.num_bins = h.num_bins;
      fs.sensors.resize(h.num_sensors);
      for (SensorFeatures& sf : fs.sensors) {
        sf.powers.resize(f);
        get_span<double>(in, sf.powers);
      }
      for (SensorFeatures& sf : fs.sensors) {
        sf.bins.resize(f);
        for (int& b : sf.bins) {
          b = get<std::int32_t>(in);
          if (b < 0 || b >= h.num_bins) throw InputError("dataset: bin index out of range");
        }
      }
      s.features.push_back(std::move(fs));
    }
    if (zone_of(s.location, layout) != s.zone) {
      throw InputError("dataset: sample " + std::to_string(s.id) + " zone does not match its location");
    }
  }
  if (in.peek() != std::char_traits<char>::eof()) throw InputError("dataset: trailing bytes after records");
  return data;
}

void save_dataset(const std::string& path, const Dataset& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write dataset '" + path + "'");
  write_dataset(out, data);
}

Dataset load_dataset(const std::string& path, const ZoneLayout& layout) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open dataset '" + path + "'");
  return read_dataset(in, layout);
}

}  // namespace uwbpos::bench
