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

// Differentiable primitives. Every op records its output on the tape of its
// inputs and rejects shape mismatches with std::invalid_argument naming both
// shapes.

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "asyrec/tensor.hpp"

namespace asyrec {

enum class UnaryKind { kRelu, kLeakyRelu, kSin, kCos };

struct UnaryOp {
  UnaryKind kind = UnaryKind::kRelu;
  double alpha = 0.01;  // leaky_relu slope, in (0, 1)

  static UnaryOp relu() { return {UnaryKind::kRelu, 0.0}; }
  static UnaryOp leaky_relu(double alpha = 0.01) { return {UnaryKind::kLeakyRelu, alpha}; }
  static UnaryOp sin() { return {UnaryKind::kSin, 0.0}; }
  static UnaryOp cos() { return {UnaryKind::kCos, 0.0}; }
};

// Elementwise map. The ReLU family uses subgradient 0 at x == 0.
Var unary_map(const UnaryOp& op, const Var& x);
inline Var relu(const Var& x) { return unary_map(UnaryOp::relu(), x); }
inline Var leaky_relu(const Var& x, double alpha = 0.01) {
  return unary_map(UnaryOp::leaky_relu(alpha), x);
}
inline Var sin(const Var& x) { return unary_map(UnaryOp::sin(), x); }
inline Var cos(const Var& x) { return unary_map(UnaryOp::cos(), x); }

Var matmul(const Var& a, const Var& b);
Var transpose(const Var& a);
Var reshape(const Var& a, Shape shape);

Var add(const Var& a, const Var& b);
Var sub(const Var& a, const Var& b);
Var mul(const Var& a, const Var& b);
Var div(const Var& a, const Var& b);
Var scale(const Var& a, double factor);
Var add_scalar(const Var& a, double offset);
// max(x, floor) elementwise; the gradient passes only where x > floor.
Var clamp_min(const Var& a, double floor);

// Row r of a [rows x cols] matrix multiplied by w[r].
Var scale_rows(const Var& a, const Var& w);

Var sum(const Var& a);
Var reduce_sum(const Var& a, std::size_t axis);
Var reduce_mean(const Var& a, std::size_t axis);

Var concat(std::span<const Var> xs, std::size_t axis);
Var concat(std::initializer_list<Var> xs, std::size_t axis);
Var slice(const Var& a, std::size_t axis, std::size_t begin, std::size_t end);
// out[k, :] = a[rows[k], :] for a rank-2 input.
Var gather_rows(const Var& a, std::span<const std::size_t> rows);
// Places a flat vector into a zero tensor of `shape` at flat `positions`.
Var scatter(const Var& a, Shape shape, std::span<const std::size_t> positions);

// Max-subtracted softmax along `axis`.
Var softmax(const Var& x, std::size_t axis);
// Softmax over entries where mask != 0; masked entries are exactly zero and
// receive no gradient. A slice with no admissible entry is all zeros.
Var masked_softmax(const Var& x, const Tensor& mask, std::size_t axis);

// -log softmax(logits)[label] for a logits vector.
Var cross_entropy(const Var& logits, std::size_t label);

// Plain-value helpers shared by the model code and its tests.
Tensor softmax_values(std::span<const double> logits);

}  // namespace asyrec
