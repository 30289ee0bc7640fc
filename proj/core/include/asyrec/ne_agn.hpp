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
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "asyrec/tensor.hpp"

namespace asyrec {

// Learnable tensors of the node-edge attention graph layer for r modality
// nodes of dimension d per person.
struct NeAgnParams {
  Tensor node_att_i;  // [r x d], one attention vector per modality of person i
  Tensor node_att_j;  // [r x d]
  Tensor projection;  // [d' x d], shared by both persons
  Tensor edge_score;  // [r(r-1) x 2d'], one scoring vector per ordered pair u != v
  double leaky_slope = 0.01;

  std::size_t modalities() const { return node_att_i.extent(0); }
  std::size_t dim() const { return node_att_i.extent(1); }

  static NeAgnParams init(std::size_t dim, std::mt19937_64& rng, std::size_t modalities = 4);
};

// Row of edge_score holding the scoring vector of ordered pair (u, v).
std::size_t edge_slot(std::size_t u, std::size_t v, std::size_t modalities);
std::vector<std::pair<std::size_t, std::size_t>> edge_pairs(std::size_t modalities);

// Cross-person modality adjacency: 1 off the diagonal, 0 on it.
Tensor build_adjacency(std::size_t modalities);

struct NeAgnVars {
  Var node_att_i;
  Var node_att_j;
  Var projection;
  Var edge_score;
  double leaky_slope = 0.01;
};

// softmax over modalities of LeakyReLU(<h^r, omega^r>); returns [r].
Var node_attention(const Var& h, const Var& omega, double leaky_slope);
// h^r + h^r * w_r; returns [r x d].
Var node_residual_update(const Var& h, const Var& w);

// beta[u][v] for source nodes h_src^u and target nodes h_tgt^v:
// softmax over admissible u of <phi_uv, [P h_src^u ; P h_tgt^v]>.
// `admissible` is an [r x r] 0/1 mask (the adjacency, possibly with extra
// edges removed).
Var edge_attention(const Var& h_src, const Var& h_tgt, const NeAgnVars& params, const Tensor& admissible);
// The uniform distribution over admissible sources of each target.
Tensor uniform_edge_weights(const Tensor& admissible);

// hhat^v = ReLU(sum_u beta[u][v] a[u][v] h_src^u); returns [r x d].
Var message_update(const Var& h_src, const Var& beta, const Tensor& adjacency);
// Mean over the r rows; returns [d].
Var pool_graph(const Var& h_hat);

struct NeAgnOptions {
  bool node_attention = true;
  bool edge_attention = true;
  // Extra edge mask applied on top of the adjacency (ablation); 1 keeps.
  std::optional<Tensor> edge_mask;
  // After masking, renormalize over the remaining sources; otherwise zero
  // the masked weights and leave the rest as computed.
  bool renormalize = true;
  // Aggregate the person's own nodes instead of the counterpart's.
  bool same_person_messages = false;
};

struct NeAgnOutputs {
  Var weights_i;       // node attention [r]
  Var weights_j;
  Var h_bar_i;         // after residual update [r x d]
  Var h_bar_j;
  Var beta_i_to_j;     // sources from i, targets in j [r x r]
  Var beta_j_to_i;     // sources from j, targets in i
  Var h_hat_i;         // messages into i [r x d]
  Var h_hat_j;
  Var pooled_i;        // [d]
  Var pooled_j;
};

// Full layer: node attention, residual update, edge attention in both
// person-flow directions, message passing and pooling.
NeAgnOutputs ne_agn_forward(const Var& h_i, const Var& h_j, const NeAgnVars& params,
                            const NeAgnOptions& options = {});

}  // namespace asyrec
