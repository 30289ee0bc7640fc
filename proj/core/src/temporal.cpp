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

#include "asyrec/temporal.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "asyrec/ops.hpp"

namespace asyrec {

TemporalEncoderParams TemporalEncoderParams::init(std::size_t dim, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(0.0, 1.0 / std::sqrt(static_cast<double>(dim)));
  TemporalEncoderParams p;
  p.weight = Tensor({dim, 1});
  for (double& v : p.weight.values()) v = dist(rng);
  p.bias = Tensor({dim}, 0.0);
  return p;
}

Var upsample_time(double t, const TemporalVars& params) {
  if (t < 0.0) throw std::invalid_argument("clip index must be non-negative");
  const std::size_t d = params.bias.value().size();
  if (params.weight.shape() != Shape{d, 1}) {
    throw std::invalid_argument("temporal weight shape " + shape_to_string(params.weight.shape()) +
                                " does not match bias of length " + std::to_string(d));
  }
  return add(reshape(scale(params.weight, t), {d}), params.bias);
}

Var periodic_encode(std::size_t t, std::size_t max_index, const TemporalVars& params) {
  if (!(params.epsilon > 0.0)) throw std::invalid_argument("temporal epsilon must be positive");
  Var t_up = upsample_time(static_cast<double>(t), params);
  Var max_up = upsample_time(static_cast<double>(max_index), params);
  Var angle = div(scale(t_up, 2.0 * std::numbers::pi), clamp_min(max_up, params.epsilon));
  return t % 2 == 0 ? sin(angle) : cos(angle);
}

}  // namespace asyrec
