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

#include "asyrec/ne_agn.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "asyrec/ops.hpp"

namespace asyrec {

namespace {

Tensor uniform_tensor(Shape shape, double bound, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-bound, bound);
  Tensor t(std::move(shape));
  for (double& v : t.values()) v = dist(rng);
  return t;
}

}  // namespace

NeAgnParams NeAgnParams::init(std::size_t dim, std::mt19937_64& rng, std::size_t modalities) {
  if (modalities < 2) throw std::invalid_argument("graph layer needs at least two modalities");
  const double node_bound = 1.0 / std::sqrt(static_cast<double>(dim));
  NeAgnParams p;
  p.node_att_i = uniform_tensor({modalities, dim}, node_bound, rng);
  p.node_att_j = uniform_tensor({modalities, dim}, node_bound, rng);
  p.projection = uniform_tensor({dim, dim}, node_bound, rng);
  p.edge_score = uniform_tensor({modalities * (modalities - 1), 2 * dim},
                                1.0 / std::sqrt(2.0 * static_cast<double>(dim)), rng);
  return p;
}

std::size_t edge_slot(std::size_t u, std::size_t v, std::size_t modalities) {
  if (u == v || u >= modalities || v >= modalities) {
    throw std::invalid_argument("no edge slot for pair (" + std::to_string(u) + ", " + std::to_string(v) + ")");
  }
  return u * (modalities - 1) + (v < u ? v : v - 1);
}

std::vector<std::pair<std::size_t, std::size_t>> edge_pairs(std::size_t modalities) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t u = 0; u < modalities; ++u)
    for (std::size_t v = 0; v < modalities; ++v)
      if (u != v) out.emplace_back(u, v);
  return out;
}

Tensor build_adjacency(std::size_t modalities) {
  if (modalities < 2) throw std::invalid_argument("adjacency needs at least two modalities");
  Tensor a({modalities, modalities}, 1.0);
  for (std::size_t k = 0; k < modalities; ++k) a.at(k, k) = 0.0;
  return a;
}

Var node_attention(const Var& h, const Var& omega, double leaky_slope) {
  if (h.shape() != omega.shape() || h.shape().size() != 2) {
    throw std::invalid_argument("node_attention: node shape " + shape_to_string(h.shape()) +
                                " does not match attention shape " + shape_to_string(omega.shape()));
  }
  Var logits = reduce_sum(mul(h, omega), 1);
  return softmax(leaky_relu(logits, leaky_slope), 0);
}

Var node_residual_update(const Var& h, const Var& w) { return add(h, scale_rows(h, w)); }

Var edge_attention(const Var& h_src, const Var& h_tgt, const NeAgnVars& params, const Tensor& admissible) {
  const std::size_t r = h_src.shape().at(0);
  if (admissible.shape() != Shape{r, r}) {
    throw std::invalid_argument("edge_attention: mask shape " + shape_to_string(admissible.shape()) +
                                " does not match " + std::to_string(r) + " nodes");
  }
  const auto pairs = edge_pairs(r);
  std::vector<std::size_t> src_rows, tgt_rows, positions;
  for (const auto& [u, v] : pairs) {
    src_rows.push_back(u);
    tgt_rows.push_back(v);
    positions.push_back(u * r + v);
  }
  Var omega_t = transpose(params.projection);
  Var proj_src = matmul(h_src, omega_t);
  Var proj_tgt = matmul(h_tgt, omega_t);
  Var joined = concat({gather_rows(proj_src, src_rows), gather_rows(proj_tgt, tgt_rows)}, 1);
  Var scores = reduce_sum(mul(params.edge_score, joined), 1);
  Var logits = scatter(scores, Shape{r, r}, positions);
  return masked_softmax(logits, admissible, 0);
}

Tensor uniform_edge_weights(const Tensor& admissible) {
  const std::size_t r = admissible.extent(0);
  Tensor beta(admissible.shape(), 0.0);
  for (std::size_t v = 0; v < r; ++v) {
    double count = 0.0;
    for (std::size_t u = 0; u < r; ++u) count += admissible.at(u, v) != 0.0 ? 1.0 : 0.0;
    if (count == 0.0) continue;
    for (std::size_t u = 0; u < r; ++u)
      if (admissible.at(u, v) != 0.0) beta.at(u, v) = 1.0 / count;
  }
  return beta;
}

Var message_update(const Var& h_src, const Var& beta, const Tensor& adjacency) {
  Tape* tape = beta.tape();
  Var weighted = mul(beta, tape->constant(adjacency));
  return relu(matmul(transpose(weighted), h_src));
}

Var pool_graph(const Var& h_hat) { return reduce_mean(h_hat, 0); }

NeAgnOutputs ne_agn_forward(const Var& h_i, const Var& h_j, const NeAgnVars& params, const NeAgnOptions& options) {
  Tape* tape = h_i.tape();
  const std::size_t r = h_i.shape().at(0);
  const Tensor adjacency = build_adjacency(r);
  Tensor admissible = adjacency;
  if (options.edge_mask) {
    if (options.edge_mask->shape() != adjacency.shape()) {
      throw std::invalid_argument("edge mask must be " + shape_to_string(adjacency.shape()));
    }
    for (std::size_t k = 0; k < admissible.size(); ++k) admissible[k] *= (*options.edge_mask)[k] != 0.0 ? 1.0 : 0.0;
  }

  NeAgnOutputs out;
  if (options.node_attention) {
    out.weights_i = node_attention(h_i, params.node_att_i, params.leaky_slope);
    out.weights_j = node_attention(h_j, params.node_att_j, params.leaky_slope);
    out.h_bar_i = node_residual_update(h_i, out.weights_i);
    out.h_bar_j = node_residual_update(h_j, out.weights_j);
  } else {
    out.h_bar_i = h_i;
    out.h_bar_j = h_j;
  }

  auto directional = [&](const Var& src, const Var& tgt) -> Var {
    if (!options.edge_attention) return tape->constant(uniform_edge_weights(admissible));
    if (options.renormalize) return edge_attention(src, tgt, params, admissible);
    Var full = edge_attention(src, tgt, params, adjacency);
    return mul(full, tape->constant(admissible));
  };
  out.beta_i_to_j = directional(out.h_bar_i, out.h_bar_j);
  out.beta_j_to_i = directional(out.h_bar_j, out.h_bar_i);

  const Var& into_i = options.same_person_messages ? out.h_bar_i : out.h_bar_j;
  const Var& into_j = options.same_person_messages ? out.h_bar_j : out.h_bar_i;
  out.h_hat_i = message_update(into_i, out.beta_j_to_i, adjacency);
  out.h_hat_j = message_update(into_j, out.beta_i_to_j, adjacency);
  out.pooled_i = pool_graph(out.h_hat_i);
  out.pooled_j = pool_graph(out.h_hat_j);
  return out;
}

}  // namespace asyrec
