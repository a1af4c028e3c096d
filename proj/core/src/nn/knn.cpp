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

#include "uwbpos/nn/knn.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <vector>

#include "uwbpos/error.hpp"

namespace uwbpos::nn {

int knn_classify(const Matrix& train, std::span<const int> labels, std::span<const double> query,
                 int k) {
  if (labels.size() != train.rows()) throw InputError("knn: one label per training row required");
  if (query.size() != train.cols()) throw InputError("knn: query dimension mismatch");
  if (k < 1 || static_cast<std::size_t>(k) > train.rows()) {
    throw InputError("knn: k = " + std::to_string(k) + " outside [1, " +
                     std::to_string(train.rows()) + "]");
  }
  std::vector<std::pair<double, std::size_t>> dist(train.rows());
  for (std::size_t r = 0; r < train.rows(); ++r) {
    const auto row = train.row(r);
    double d = 0;
    for (std::size_t c = 0; c < row.size(); ++c) {
      const double t = row[c] - query[c];
      d += t * t;
    }
    dist[r] = {d, r};
  }
  std::partial_sort(dist.begin(), dist.begin() + k, dist.end());
  std::map<int, int> votes;
  for (int i = 0; i < k; ++i) ++votes[labels[dist[i].second]];
  int best = votes.begin()->first, best_count = 0;
  for (const auto& [label, count] : votes) {
    if (count > best_count) {
      best = label;
      best_count = count;
    }
  }
  return best;
}

}  // namespace uwbpos::nn
