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

#include "uwbpos/frontend.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "uwbpos/error.hpp"

namespace uwbpos {
namespace {

void check_length(std::size_t got, const SignalConfig& signal) {
  if (got != signal.frame_samples()) {
    throw InputError("waveform has " + std::to_string(got) + " samples, expected 2W*T_f = " +
                     std::to_string(signal.frame_samples()));
  }
}

PdpVector bin_energies(std::span<const std::complex<double>> x, const SignalConfig& signal) {
  const int nb = signal.num_bins();
  const int per_bin = signal.samples_per_bin();
  const double scale = 1.0 / signal.sample_rate();
  PdpVector out(nb, 0.0);
  for (int n = 0; n < nb; ++n) {
    double acc = 0.0;
    for (int i = 0; i < per_bin; ++i) acc += std::norm(x[static_cast<std::size_t>(n) * per_bin + i]);
    out[n] = scale * acc;
  }
  return out;
}

}  // namespace

PdpVector energy_detect(std::span<const std::complex<double>> waveform,
                        const SignalConfig& signal) {
  signal.validate();
  check_length(waveform.size(), signal);
  return bin_energies(waveform, signal);
}

PdpVector matched_filter_detect(std::span<const std::complex<double>> waveform,
                                std::span<const std::complex<double>> pulse,
                                const SignalConfig& signal) {
  signal.validate();
  check_length(waveform.size(), signal);
  if (pulse.empty()) throw InputError("matched_filter_detect: empty pulse template");
  // y[n] = sum_k r[n + k] * conj(s[k]), i.e. convolution with the
  // time-reversed conjugate template, aligned to the pulse start.
  const std::size_t n = waveform.size();
  std::vector<std::complex<double>> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::complex<double> acc{0.0, 0.0};
    for (std::size_t k = 0; k < pulse.size() && i + k < n; ++k) {
      acc += waveform[i + k] * std::conj(pulse[k]);
    }
    y[i] = acc;
  }
  return bin_energies(y, signal);
}

double mean_los_power(const GeometryConfig& geometry, const ScenarioConfig& scenario, int n_mc,
                      std::uint64_t seed) {
  if (n_mc < 1) throw InputError("mean_los_power: n_mc must be >= 1");
  geometry.validate();
  Rng rng(seed);
  double sum = 0.0;
  for (int i = 0; i < n_mc; ++i) {
    const Vec3 t = sample_target(rng, geometry);
    double per_target = 0.0;
    for (const Vec3& s : geometry.sensor_locations) {
      per_target += los_pathloss(distance(s, t), scenario, 1.0);
    }
    sum += per_target / static_cast<double>(geometry.num_sensors());
  }
  return sum / n_mc;
}

double calibrate_noise(double snr_db, const GeometryConfig& geometry,
                       const ScenarioConfig& scenario, int n_mc, std::uint64_t seed) {
  return mean_los_power(geometry, scenario, n_mc, seed) / std::pow(10.0, snr_db / 10.0);
}

void write_pdp_table(std::ostream& out, const SignalConfig& signal,
                     std::span<const PdpVector> rows) {
  const int nb = signal.num_bins();
  out << std::setprecision(17);
  out << "# W=" << signal.bandwidth_hz << " T_g=" << signal.integration_s << " N_b=" << nb << '\n';
  for (int n = 0; n < nb; ++n) out << (n ? "," : "") << "e" << n;
  out << '\n';
  for (const auto& row : rows) {
    if (static_cast<int>(row.size()) != nb) {
      throw InputError("write_pdp_table: row length " + std::to_string(row.size()) +
                       " != N_b " + std::to_string(nb));
    }
    for (int n = 0; n < nb; ++n) out << (n ? "," : "") << row[n];
    out << '\n';
  }
}

PdpTable read_pdp_table(std::istream& in) {
  PdpTable t;
  std::string line;
  if (!std::getline(in, line) || line.rfind("# ", 0) != 0) {
    throw ConfigError("pdp table: missing '# W=... T_g=... N_b=...' header");
  }
  {
    std::istringstream hs(line.substr(2));
    std::string kv;
    while (hs >> kv) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = kv.substr(0, eq);
      const std::string val = kv.substr(eq + 1);
      if (key == "W") t.bandwidth_hz = std::stod(val);
      else if (key == "T_g") t.integration_s = std::stod(val);
      else if (key == "N_b") t.num_bins = std::stoi(val);
    }
  }
  if (t.num_bins < 1) throw ConfigError("pdp table: header lacks N_b");
  std::getline(in, line);  // column names
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    PdpVector row;
    row.reserve(t.num_bins);
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
    if (static_cast<int>(row.size()) != t.num_bins) {
      throw ConfigError("pdp table: row with " + std::to_string(row.size()) + " columns");
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace uwbpos
