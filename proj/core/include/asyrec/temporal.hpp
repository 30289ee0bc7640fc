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

#include <cstddef>
#include <random>

#include "asyrec/tensor.hpp"

namespace asyrec {

struct TemporalEncoderParams {
  Tensor weight;  // [d x 1]
  Tensor bias;    // [d]
  double epsilon = 1e-8;

  std::size_t dim() const { return bias.size(); }

  // weight entries drawn from U(0, 1/sqrt(d)), bias zero.
  static TemporalEncoderParams init(std::size_t dim, std::mt19937_64& rng);
};

struct TemporalVars {
  Var weight;
  Var bias;
  double epsilon = 1e-8;
};

// t' = weight * t + bias.
Var upsample_time(double t, const TemporalVars& params);

// sin(2 pi t' / max(T', eps)) for even t and cos(...) for odd t, with
// T' = upsample_time(max_index) and the max taken per component.
Var periodic_encode(std::size_t t, std::size_t max_index, const TemporalVars& params);

}  // namespace asyrec
