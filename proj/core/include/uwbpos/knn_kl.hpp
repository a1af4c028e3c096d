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

#include <span>

#include "uwbpos/matrix.hpp"

namespace uwbpos {

// Nearest-neighbour KL divergence estimate D_u(P || Q) from samples (one
// point per row):
//   (dim_factor / n_p) * sum_{x in P} log(r_{u,Q}(x) / r_{u,P}(x))
//     + log(n_q / (n_p - 1)),
// where r_{u,S}(x) is the Euclidean distance from x to its u-th nearest
// neighbour in S, never counting x itself. When Q equals P (same contents) the
// self-exclusion applies to both radii. Zero radii from duplicate points are
// floored at 1e-12 times the largest coordinate magnitude.
// Throws InputError unless n_p > u and n_q >= u (n_q > u when Q == P).
double knn_kl(const Matrix& p, const Matrix& q, int neighbors, double dim_factor);

// Zone-averaged divergence (1 / (N_z^2 sqrt(F))) * sum_i sum_j D_u(P_i || P_j),
// i = j terms included. Throws InputError naming any zone with <= u samples.
double kl_score(std::span<const Matrix> zones, int neighbors, int feature_size);

}  // namespace uwbpos
