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

namespace uwbpos {

// Generalized Marcum Q-function Q_m(a, b) = P(X > b^2) for X noncentral
// chi-square with 2m degrees of freedom and noncentrality a^2. Evaluated as a
// Poisson mixture of regularized upper incomplete gamma functions, summed
// outward from the Poisson mode. Throws InputError for m < 0.5 or negative a, b.
double marcum_q(double m, double a, double b);

}  // namespace uwbpos
