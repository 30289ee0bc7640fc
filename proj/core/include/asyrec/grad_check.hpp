/*
 * Copyright 2026 The asyrec Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <functional>
#include <span>
#include <vector>

#include "asyrec/tensor.hpp"

namespace asyrec {

// Builds a scalar on `tape` from parameter leaves bound in the same order as
// the tensors handed to grad_check.
using ScalarFn = std::function<Var(Tape& tape, std::span<const Var> params)>;

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::size_t worst_param = 0;
  std::size_t worst_index = 0;
  double analytic = 0.0;
  double numeric = 0.0;
};

// Compares reverse-mode gradients with central differences
// (f(p + e) - f(p - e)) / 2e, coordinate by coordinate. The error of a
// coordinate is |ad - fd| / max(1, |ad|, |fd|). `step` must lie in
// [1e-7, 1e-3].
GradCheckResult grad_check_detailed(const ScalarFn& f, const std::vector<Tensor>& params,
                                    double step = 1e-5);

double grad_check(const ScalarFn& f, const std::vector<Tensor>& params, double step = 1e-5);

}  // namespace asyrec
