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

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "uwbpos/frontend.hpp"

namespace uwbpos {

// Averaged sorted PDP and the chi-square degrees of freedom of each bin.
struct SelectionStats {
  std::vector<double> mean_sorted;  // non-increasing, strictly positive
  double dof = 2.0;

  int num_bins() const { return static_cast<int>(mean_sorted.size()); }
  // Throws InputError on empty/non-positive/increasing entries or dof <= 0.
  void validate() const;
};

// Sorts every PDP in descending order and averages element-wise.
SelectionStats average_sorted_pdp(std::span<const PdpVector> pdps, double dof);

struct SelectionConfig {
  int f_min = 4;
  int f_max = 10;
  double weight = 0.8;  // epsilon in the criterion
  int neighbors = 30;   // u
  void validate(int num_bins) const;  // ConfigError
};

// Mean of the entries F..N_b-1 (requires 0 <= F < N_b).
double noise_power(const SelectionStats& stats, int f);
// mean_sorted[n] - noise_power(F) for n < F; may be negative.
std::vector<double> signal_powers(const SelectionStats& stats, int f);
// Central chi-square scale matching the second moment of a noncentral one.
// Negative lambda is clipped to zero.
double eta_squared(double psi2, double lambda, double dof);
// Full log-likelihood with the estimates plugged in (0 <= F < N_b).
double log_likelihood(const SelectionStats& stats, int f);
// The same with F-independent terms removed.
double ll_hat(const SelectionStats& stats, int f);
// Midpoint between the (F-1)-th and F-th averaged powers (1 <= F < N_b).
double power_threshold(const SelectionStats& stats, int f);
// Probability that the n-th strongest bin exceeds the power threshold.
double detection_prob(const SelectionStats& stats, int f, int n);
// Distribution of the number of successes among independent Bernoulli(p_i).
std::vector<double> acquisition_prob(std::span<const double> p);

struct PerFQuantities {
  int f = 0;
  double psi2 = 0;
  std::vector<double> lambda;
  std::vector<double> eta2;
  double threshold = 0;
  std::vector<double> detection;    // p_n, n < F
  std::vector<double> acquisition;  // P_f, f = 0..F
  double ll = 0;
  double ll_gain_normalized = 0;  // (LL_F - LL_0) / max over the range
  double information = 0;         // term (a)
  double kl = 0;                  // raw KL_F
  double kl_normalized = 0;       // term (b)
  double criterion = 0;
};

// Divides by the maximum; if the maximum is not positive, by the largest
// magnitude instead. An all-zero vector is returned unchanged.
std::vector<double> normalize_by_max(std::span<const double> values);

// Term (a) for every F in [f_min, f_max].
std::vector<double> information_terms(const SelectionStats& stats, int f_min, int f_max);

// Index-offset argmax of weight*a + (1-weight)*b; ties go to the smaller F.
int select_feature_size(std::span<const double> a, std::span<const double> b, double weight,
                        int f_min);

struct SelectionReport {
  double weight = 0;
  int f_star = 0;
  std::vector<PerFQuantities> rows;
};

// Evaluates every per-F quantity over [f_min, f_max]. `kl` holds raw KL_F
// values for the same range; they are normalized by their maximum.
SelectionReport evaluate_selection(const SelectionStats& stats, int f_min, int f_max,
                                   double weight, std::span<const double> kl);

// Text table with one row per F. Lists are space-separated inside a field.
void write_criterion_table(std::ostream& out, const SelectionReport& report);

struct ClauseResult {
  bool passed = false;
  double slack = 0;  // worst margin; negative when the clause fails
  std::string detail;
};

struct MonotonicityReport {
  int signal_bins = 0;
  bool equal_noise = false;  // whether the noise bins are all equal
  ClauseResult psi_nonincreasing;
  ClauseResult ll_nondecreasing;
  ClauseResult ll_constant;
};

// Checks the monotonicity properties of psi^2 and LL-hat on a fixture whose
// first `signal_bins` entries dominate the rest. Throws InputError when the
// fixture is not non-increasing, signal_bins is outside [1, N_b - 1], or the
// weakest signal bin is not at least `dominance` times the strongest noise
// bin. Unequal noise bins are reported through `equal_noise`, not rejected.
MonotonicityReport likelihood_monotonicity_check(const SelectionStats& stats, int signal_bins,
                                                 double rel_tol = 1e-9, double dominance = 1e3);

}  // namespace uwbpos
