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

namespace uwbpos::nn {

// Majority vote among the k nearest training rows (Euclidean). Equal
// distances are ordered by training index; vote ties go to the smaller label.
// Throws InputError if k is outside [1, rows] or shapes disagree.
int knn_classify(const Matrix& train, std::span<const int> labels, std::span<const double> query,
                 int k);

}  // namespace uwbpos::nn
