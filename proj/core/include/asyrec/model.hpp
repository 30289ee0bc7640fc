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

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "asyrec/dataset.hpp"
#include "asyrec/ne_agn.hpp"
#include "asyrec/temporal.hpp"
#include "asyrec/tensor.hpp"

namespace asyrec {

// Per-feature z-scoring fitted on a training split, shared by both persons.
struct Standardizer {
  std::vector<double> mean;   // [r * d], modality-major
  std::vector<double> scale;  // [r * d], standard deviation (1 where constant)

  static Standardizer identity(std::size_t dim);
  static Standardizer fit(const Dataset& train);
  // Node matrix [r x d] of standardized features.
  Tensor apply(const ModalityBundle& bundle) const;

  friend bool operator==(const Standardizer&, const Standardizer&) = default;
};

struct ClassifierHead {
  Tensor weight;  // [C x 6d]
  Tensor bias;    // [C]
};

struct AsyrecParams {
  LabelSchema schema;
  std::size_t dim = 0;
  Standardizer standardizer;
  NeAgnParams graph;
  TemporalEncoderParams temporal;
  ClassifierHead head_i_to_j;
  std::optional<ClassifierHead> head_j_to_i;  // bidirectional schemas only

  std::size_t classes() const { return schema.size(); }
  std::size_t fused_dim() const { return 6 * dim; }

  // Random graph and temporal tensors, zero heads, identity standardizer.
  static AsyrecParams init(std::size_t dim, const LabelSchema& schema, std::uint64_t seed);

  // Learnable tensors in a fixed order.
  std::vector<std::pair<std::string, Tensor*>> named_parameters();
  std::vector<std::pair<std::string, const Tensor*>> named_parameters() const;
};

struct AsyrecVars {
  NeAgnVars graph;
  TemporalVars temporal;
  Var head_i_to_j_weight;
  Var head_i_to_j_bias;
  std::optional<Var> head_j_to_i_weight;
  std::optional<Var> head_j_to_i_bias;
};

// Places every learnable tensor on `tape` as a leaf.
AsyrecVars bind(Tape& tape, const AsyrecParams& params, bool requires_grad);
// Rebuilds the variable struct from leaves bound in named_parameters() order.
AsyrecVars bind_from(const AsyrecParams& params, std::span<const Var> leaves);

// Evaluation-time switches for the ablation variants.
struct ForwardOptions {
  NeAgnOptions graph;
  bool zero_temporal = false;  // replace phi(t) by the zero vector
};

struct ClipLogits {
  Var fused_i;
  Var fused_j;
  Var logits_i_to_j;
  std::optional<Var> logits_j_to_i;
  Var temporal;
  NeAgnOutputs graph;
};

ClipLogits forward_on_tape(Tape& tape, const AsyrecParams& params, const AsyrecVars& vars,
                           const ClipRecord& clip, const ForwardOptions& options = {});

// Sum of the per-direction cross-entropies of one clip.
Var clip_loss(const ClipLogits& logits, const ClipRecord& clip);

struct ClipPrediction {
  std::size_t clip_index = 0;
  std::vector<double> p_i_to_j;
  std::optional<std::vector<double>> p_j_to_i;
};

ClipPrediction forward(const ClipRecord& clip, const AsyrecParams& params, const ForwardOptions& options = {});

double loss(const ClipPrediction& pred, const ClipRecord& clip);

struct VideoPrediction {
  std::vector<double> p_i_to_j;
  std::optional<std::vector<double>> p_j_to_i;
};

// Mean of the clip distributions per direction; rejects an empty sequence.
VideoPrediction predict_video(std::span<const ClipPrediction> clips);

// Lowest index among the maxima.
std::size_t argmax(std::span<const double> values);

}  // namespace asyrec
