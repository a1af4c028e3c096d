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

#include "uwbpos/size_select.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <ostream>
#include <sstream>

#include "uwbpos/error.hpp"
#include "uwbpos/marcum.hpp"

namespace uwbpos {
namespace {

void check_f(const SelectionStats& stats, int f, int lo, const char* what) {
  if (f < lo || f >= stats.num_bins()) {
    throw InputError(std::string(what) + ": F = " + std::to_string(f) + " outside [" +
                     std::to_string(lo) + ", " + std::to_string(stats.num_bins() - 1) + "]");
  }
}

void check_range(const SelectionStats& stats, int f_min, int f_max) {
  if (f_min < 1 || f_max < f_min || f_max >= stats.num_bins()) {
    throw InputError("feature size range [" + std::to_string(f_min) + ", " +
                     std::to_string(f_max) + "] invalid for N_b = " +
                     std::to_string(stats.num_bins()));
  }
}

// Per-bin log density of a scaled central chi-square, with or without the
// terms that do not depend on the scale.
double bin_log_density(double e, double scale, double dof, bool full) {
  double v = -0.5 * dof * std::log(2.0 * scale) - e / (2.0 * scale);
  if (full) v += 0.5 * (dof - 2.0) * std::log(e) - std::lgamma(0.5 * dof);
  return v;
}

double likelihood(const SelectionStats& stats, int f, bool full) {
  stats.validate();
  check_f(stats, f, 0, "log_likelihood");
  const double psi2 = noise_power(stats, f);
  double ll = 0.0;
  for (int n = 0; n < stats.num_bins(); ++n) {
    const double e = stats.mean_sorted[n];
    const double scale = n < f ? eta_squared(psi2, e - psi2, stats.dof) : psi2;
    ll += bin_log_density(e, scale, stats.dof, full);
  }
  return ll;
}

}  // namespace

void SelectionStats::validate() const {
  if (mean_sorted.empty()) throw InputError("selection stats: empty averaged PDP");
  if (!(dof > 0.0)) throw InputError("selection stats: degrees of freedom must be positive");
  for (std::size_t n = 0; n < mean_sorted.size(); ++n) {
    if (!(mean_sorted[n] > 0.0)) {
      throw InputError("selection stats: entry " + std::to_string(n) + " is not positive");
    }
    if (n > 0 && mean_sorted[n] > mean_sorted[n - 1]) {
      throw InputError("selection stats: averaged PDP is not non-increasing at " +
                       std::to_string(n));
    }
  }
}

SelectionStats average_sorted_pdp(std::span<const PdpVector> pdps, double dof) {
  if (pdps.empty()) throw InputError("average_sorted_pdp: no PDPs");
  const std::size_t nb = pdps.front().size();
  SelectionStats s;
  s.dof = dof;
  s.mean_sorted.assign(nb, 0.0);
  std::vector<double> sorted;
  for (const auto& p : pdps) {
    if (p.size() != nb) throw InputError("average_sorted_pdp: PDP lengths differ");
    sorted.assign(p.begin(), p.end());
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    for (std::size_t n = 0; n < nb; ++n) s.mean_sorted[n] += sorted[n];
  }
  for (auto& v : s.mean_sorted) v /= static_cast<double>(pdps.size());
  return s;
}

void SelectionConfig::validate(int num_bins) const {
  if (f_min < 1 || f_max < f_min || f_max >= num_bins) {
    throw ConfigError("selection: need 1 <= f_min <= f_max < N_b (" + std::to_string(num_bins) +
                      ")");
  }
  if (!(weight >= 0.0 && weight <= 1.0)) throw ConfigError("selection: weight must be in [0, 1]");
  if (neighbors < 1) throw ConfigError("selection: neighbour count must be >= 1");
}

double noise_power(const SelectionStats& stats, int f) {
  check_f(stats, f, 0, "noise_power");
  double sum = 0.0;
  for (int n = f; n < stats.num_bins(); ++n) sum += stats.mean_sorted[n];
  return sum / (stats.num_bins() - f);
}

std::vector<double> signal_powers(const SelectionStats& stats, int f) {
  const double psi2 = noise_power(stats, f);
  std::vector<double> lambda(f);
  for (int n = 0; n < f; ++n) lambda[n] = stats.mean_sorted[n] - psi2;
  return lambda;
}

double eta_squared(double psi2, double lambda, double dof) {
  if (!(dof > 0.0)) throw InputError("eta_squared: degrees of freedom must be positive");
  const double l = std::max(lambda, 0.0);
  const double mean = dof * psi2 + l;
  return std::sqrt((2.0 * dof * psi2 * psi2 + 4.0 * psi2 * l + mean * mean) /
                   (dof * (2.0 + dof)));
}

double log_likelihood(const SelectionStats& stats, int f) { return likelihood(stats, f, true); }

double ll_hat(const SelectionStats& stats, int f) { return likelihood(stats, f, false); }

double power_threshold(const SelectionStats& stats, int f) {
  check_f(stats, f, 1, "power_threshold");
  return 0.5 * (stats.mean_sorted[f - 1] + stats.mean_sorted[f]);
}

double detection_prob(const SelectionStats& stats, int f, int n) {
  check_f(stats, f, 1, "detection_prob");
  if (n < 0 || n >= f) throw InputError("detection_prob: bin index outside [0, F)");
  const double psi2 = noise_power(stats, f);
  const double ratio = std::max(stats.mean_sorted[n] - psi2, 0.0) / psi2;
  const double pth = power_threshold(stats, f);
  return marcum_q(0.5 * stats.dof, std::sqrt(2.0 * ratio * ratio), std::sqrt(2.0 * pth / psi2));
}

std::vector<double> acquisition_prob(std::span<const double> p) {
  std::vector<double> dist(p.size() + 1, 0.0);
  dist[0] = 1.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!(p[i] >= 0.0 && p[i] <= 1.0)) {
      throw InputError("acquisition_prob: p[" + std::to_string(i) + "] outside [0, 1]");
    }
    for (std::size_t k = i + 1; k > 0; --k) dist[k] = dist[k] * (1.0 - p[i]) + dist[k - 1] * p[i];
    dist[0] *= 1.0 - p[i];
  }
  return dist;
}

std::vector<double> normalize_by_max(std::span<const double> values) {
  std::vector<double> out(values.begin(), values.end());
  if (out.empty()) return out;
  double scale = *std::max_element(out.begin(), out.end());
  if (!(scale > 0.0)) {
    scale = 0.0;
    for (double v : out) scale = std::max(scale, std::abs(v));
  }
  if (scale > 0.0)
    for (double& v : out) v /= scale;
  return out;
}

std::vector<double> information_terms(const SelectionStats& stats, int f_min, int f_max) {
  stats.validate();
  check_range(stats, f_min, f_max);
  const double ll0 = log_likelihood(stats, 0);
  std::vector<double> gains;
  for (int f = f_min; f <= f_max; ++f) gains.push_back(log_likelihood(stats, f) - ll0);
  const auto norm = normalize_by_max(gains);

  std::vector<double> a;
  for (int f = f_min; f <= f_max; ++f) {
    std::vector<double> p(f);
    for (int n = 0; n < f; ++n) p[n] = detection_prob(stats, f, n);
    const auto dist = acquisition_prob(p);
    double expected_fraction = 0.0;
    for (int k = 0; k <= f; ++k) expected_fraction += dist[k] * k / f;
    a.push_back(expected_fraction * norm[f - f_min]);
  }
  return a;
}

int select_feature_size(std::span<const double> a, std::span<const double> b, double weight,
                        int f_min) {
  if (a.empty()) throw InputError("select_feature_size: empty search range");
  if (a.size() != b.size()) throw InputError("select_feature_size: a and b lengths differ");
  std::size_t best = 0;
  double best_value = weight * a[0] + (1.0 - weight) * b[0];
  for (std::size_t i = 1; i < a.size(); ++i) {
    const double v = weight * a[i] + (1.0 - weight) * b[i];
    if (v > best_value) {
      best = i;
      best_value = v;
    }
  }
  return f_min + static_cast<int>(best);
}

SelectionReport evaluate_selection(const SelectionStats& stats, int f_min, int f_max,
                                   double weight, std::span<const double> kl) {
  stats.validate();
  check_range(stats, f_min, f_max);
  const std::size_t count = static_cast<std::size_t>(f_max - f_min + 1);
  if (kl.size() != count) throw InputError("evaluate_selection: one KL value per F required");

  const double ll0 = log_likelihood(stats, 0);
  SelectionReport report;
  report.weight = weight;
  std::vector<double> gains;
  for (int f = f_min; f <= f_max; ++f) {
    PerFQuantities q;
    q.f = f;
    q.psi2 = noise_power(stats, f);
    q.lambda = signal_powers(stats, f);
    for (double l : q.lambda) q.eta2.push_back(eta_squared(q.psi2, l, stats.dof));
    q.threshold = power_threshold(stats, f);
    for (int n = 0; n < f; ++n) q.detection.push_back(detection_prob(stats, f, n));
    q.acquisition = acquisition_prob(q.detection);
    q.ll = log_likelihood(stats, f);
    gains.push_back(q.ll - ll0);
    report.rows.push_back(std::move(q));
  }

  const auto gain_norm = normalize_by_max(gains);
  const auto kl_norm = normalize_by_max(kl);
  std::vector<double> a, b;
  for (std::size_t i = 0; i < count; ++i) {
    auto& q = report.rows[i];
    q.ll_gain_normalized = gain_norm[i];
    double expected_fraction = 0.0;
    for (int k = 0; k <= q.f; ++k) expected_fraction += q.acquisition[k] * k / q.f;
    q.information = expected_fraction * gain_norm[i];
    q.kl = kl[i];
    q.kl_normalized = kl_norm[i];
    q.criterion = weight * q.information + (1.0 - weight) * q.kl_normalized;
    a.push_back(q.information);
    b.push_back(q.kl_normalized);
  }
  report.f_star = select_feature_size(a, b, weight, f_min);
  return report;
}

void write_criterion_table(std::ostream& out, const SelectionReport& report) {
  auto list = [](const std::vector<double>& v) {
    std::ostringstream s;
    s.precision(6);
    for (std::size_t i = 0; i < v.size(); ++i) s << (i ? " " : "") << v[i];
    return s.str();
  };
  out << "# weight=" << report.weight << " f_star=" << report.f_star << '\n';
  out << "F\tpsi2\tlambda\tthreshold\tll_gain_norm\tdetection\tacquisition\ta\tkl\tb\tcriterion\n";
  out.precision(6);
  for (const auto& q : report.rows) {
    out << q.f << '\t' << q.psi2 << '\t' << list(q.lambda) << '\t' << q.threshold << '\t'
        << q.ll_gain_normalized << '\t' << list(q.detection) << '\t' << list(q.acquisition)
        << '\t' << q.information << '\t' << q.kl << '\t' << q.kl_normalized << '\t'
        << q.criterion << '\n';
  }
}

MonotonicityReport likelihood_monotonicity_check(const SelectionStats& stats, int signal_bins,
                                                 double rel_tol, double dominance) {
  stats.validate();
  const int nb = stats.num_bins();
  if (signal_bins < 1 || signal_bins >= nb) {
    throw InputError("likelihood_monotonicity_check: signal bin count must be in [1, N_b - 1]");
  }
  const auto& e = stats.mean_sorted;
  if (e[signal_bins - 1] < dominance * e[signal_bins]) {
    throw InputError("likelihood_monotonicity_check: signal bins do not dominate the noise bins");
  }

  MonotonicityReport r;
  r.signal_bins = signal_bins;
  r.equal_noise = std::all_of(e.begin() + signal_bins, e.end(),
                              [&](double v) { return v == e[signal_bins]; });

  // (i) psi^2 never grows while F stays within the signal bins.
  r.psi_nonincreasing.slack = INFINITY;
  for (int f = 1; f <= signal_bins; ++f) {
    const double prev = noise_power(stats, f - 1);
    const double slack = (prev - noise_power(stats, f)) / prev;
    r.psi_nonincreasing.slack = std::min(r.psi_nonincreasing.slack, slack + rel_tol);
  }
  r.psi_nonincreasing.passed = r.psi_nonincreasing.slack >= 0.0;

  // (ii) LL-hat never decreases over the same range.
  r.ll_nondecreasing.slack = INFINITY;
  for (int f = 1; f <= signal_bins; ++f) {
    const double prev = ll_hat(stats, f - 1);
    const double slack = (ll_hat(stats, f) - prev) / std::max(std::abs(prev), 1e-300);
    r.ll_nondecreasing.slack = std::min(r.ll_nondecreasing.slack, slack + rel_tol);
  }
  r.ll_nondecreasing.passed = r.ll_nondecreasing.slack >= 0.0;

  // (iii) LL-hat is flat past the signal bins.
  const double ref = ll_hat(stats, signal_bins);
  double worst = 0.0;
  for (int f = signal_bins + 1; f < nb; ++f) {
    worst = std::max(worst, std::abs(ll_hat(stats, f) - ref) / std::max(std::abs(ref), 1e-300));
  }
  r.ll_constant.slack = rel_tol - worst;
  r.ll_constant.passed = worst <= rel_tol;

  auto describe = [](ClauseResult& c, const char* name) {
    std::ostringstream s;
    s << name << (c.passed ? " holds" : " violated") << " (slack " << c.slack << ")";
    c.detail = s.str();
  };
  describe(r.psi_nonincreasing, "psi^2 non-increasing up to the signal bin count");
  describe(r.ll_nondecreasing, "LL-hat non-decreasing up to the signal bin count");
  describe(r.ll_constant, "LL-hat constant beyond the signal bin count");
  return r;
}

}  // namespace uwbpos
