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

#include "asyrec/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace asyrec {

namespace {

double evaluate(const ScalarFn& f, const std::vector<Tensor>& params) {
  Tape tape;
  std::vector<Var> vars;
  vars.reserve(params.size());
  for (const Tensor& p : params) vars.push_back(tape.constant(p));
  return f(tape, vars).value().item();
}

}  // namespace

GradCheckResult grad_check_detailed(const ScalarFn& f, const std::vector<Tensor>& params, double step) {
  if (!(step >= 1e-7 && step <= 1e-3)) {
    throw std::invalid_argument("grad_check step must lie in [1e-7, 1e-3]");
  }

  Tape tape;
  std::vector<Var> vars;
  vars.reserve(params.size());
  for (const Tensor& p : params) vars.push_back(tape.leaf(p, true));
  Var out = f(tape, vars);
  tape.backward(out);

  GradCheckResult result;
  std::vector<Tensor> probe = params;
  for (std::size_t p = 0; p < params.size(); ++p) {
    const Tensor& analytic = vars[p].grad();
    for (std::size_t i = 0; i < params[p].size(); ++i) {
      const double saved = probe[p][i];
      probe[p][i] = saved + step;
      const double up = evaluate(f, probe);
      probe[p][i] = saved - step;
      const double down = evaluate(f, probe);
      probe[p][i] = saved;

      const double fd = (up - down) / (2.0 * step);
      const double ad = analytic[i];
      const double err = std::abs(ad - fd) / std::max({1.0, std::abs(ad), std::abs(fd)});
      if (err > result.max_rel_error) {
        result = {err, p, i, ad, fd};
      }
    }
  }
  return result;
}

double grad_check(const ScalarFn& f, const std::vector<Tensor>& params, double step) {
  return grad_check_detailed(f, params, step).max_rel_error;
}

}  // namespace asyrec
