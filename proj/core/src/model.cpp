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

#include "asyrec/model.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "asyrec/ops.hpp"

namespace asyrec {

Standardizer Standardizer::identity(std::size_t dim) {
  return {std::vector<double>(kModalityCount * dim, 0.0), std::vector<double>(kModalityCount * dim, 1.0)};
}

Standardizer Standardizer::fit(const Dataset& train) {
  const std::size_t d = train.feature_dim;
  Standardizer s = identity(d);
  std::vector<double> sum(kModalityCount * d, 0.0), sq(kModalityCount * d, 0.0);
  double count = 0.0;
  for (const ClipRecord* c : train.clips()) {
    for (const ModalityBundle* b : {&c->person_i, &c->person_j}) {
      for (std::size_t m = 0; m < kModalityCount; ++m)
        for (std::size_t k = 0; k < d; ++k) {
          const double x = b->features[m][k];
          sum[m * d + k] += x;
          sq[m * d + k] += x * x;
        }
      count += 1.0;
    }
  }
  if (count == 0.0) return s;
  for (std::size_t k = 0; k < sum.size(); ++k) {
    const double mean = sum[k] / count;
    const double var = std::max(0.0, sq[k] / count - mean * mean);
    s.mean[k] = mean;
    s.scale[k] = var > 1e-24 ? std::sqrt(var) : 1.0;
  }
  return s;
}

Tensor Standardizer::apply(const ModalityBundle& bundle) const {
  const std::size_t d = bundle.dim();
  if (mean.size() != kModalityCount * d || !bundle.consistent()) {
    throw std::invalid_argument("feature dimension " + std::to_string(d) + " does not match the model (" +
                                std::to_string(mean.size() / kModalityCount) + ")");
  }
  Tensor out({kModalityCount, d});
  for (std::size_t m = 0; m < kModalityCount; ++m)
    for (std::size_t k = 0; k < d; ++k) out.at(m, k) = (bundle.features[m][k] - mean[m * d + k]) / scale[m * d + k];
  return out;
}

AsyrecParams AsyrecParams::init(std::size_t dim, const LabelSchema& schema, std::uint64_t seed) {
  if (dim == 0) throw std::invalid_argument("model dimension must be positive");
  if (schema.size() < 2) throw std::invalid_argument("model needs at least two classes");
  std::mt19937_64 rng(seed);
  AsyrecParams p;
  p.schema = schema;
  p.dim = dim;
  p.standardizer = Standardizer::identity(dim);
  p.graph = NeAgnParams::init(dim, rng, kModalityCount);
  p.temporal = TemporalEncoderParams::init(dim, rng);
  p.head_i_to_j = {Tensor({schema.size(), 6 * dim}, 0.0), Tensor({schema.size()}, 0.0)};
  if (schema.bidirectional) p.head_j_to_i = ClassifierHead{p.head_i_to_j.weight, p.head_i_to_j.bias};
  return p;
}

std::vector<std::pair<std::string, Tensor*>> AsyrecParams::named_parameters() {
  std::vector<std::pair<std::string, Tensor*>> out = {
      {"graph.node_att_i", &graph.node_att_i},
      {"graph.node_att_j", &graph.node_att_j},
      {"graph.projection", &graph.projection},
      {"graph.edge_score", &graph.edge_score},
      {"temporal.weight", &temporal.weight},
      {"temporal.bias", &temporal.bias},
      {"head_i_to_j.weight", &head_i_to_j.weight},
      {"head_i_to_j.bias", &head_i_to_j.bias},
  };
  if (head_j_to_i) {
    out.emplace_back("head_j_to_i.weight", &head_j_to_i->weight);
    out.emplace_back("head_j_to_i.bias", &head_j_to_i->bias);
  }
  return out;
}

std::vector<std::pair<std::string, const Tensor*>> AsyrecParams::named_parameters() const {
  std::vector<std::pair<std::string, const Tensor*>> out;
  for (auto& [name, t] : const_cast<AsyrecParams*>(this)->named_parameters()) out.emplace_back(name, t);
  return out;
}

AsyrecVars bind(Tape& tape, const AsyrecParams& params, bool requires_grad) {
  std::vector<Var> leaves;
  for (const auto& [name, t] : params.named_parameters()) leaves.push_back(tape.leaf(*t, requires_grad));
  return bind_from(params, leaves);
}

AsyrecVars bind_from(const AsyrecParams& params, std::span<const Var> leaves) {
  const std::size_t expected = params.head_j_to_i ? 10 : 8;
  if (leaves.size() != expected) {
    throw std::invalid_argument("expected " + std::to_string(expected) + " parameter leaves, got " +
                                std::to_string(leaves.size()));
  }
  AsyrecVars v;
  v.graph = {leaves[0], leaves[1], leaves[2], leaves[3], params.graph.leaky_slope};
  v.temporal = {leaves[4], leaves[5], params.temporal.epsilon};
  v.head_i_to_j_weight = leaves[6];
  v.head_i_to_j_bias = leaves[7];
  if (params.head_j_to_i) {
    v.head_j_to_i_weight = leaves[8];
    v.head_j_to_i_bias = leaves[9];
  }
  return v;
}

namespace {

Var apply_head(const Var& weight, const Var& bias, const Var& fused) {
  const std::size_t n = fused.value().size();
  const std::size_t classes = bias.value().size();
  Var column = reshape(fused, {n, 1});
  return add(reshape(matmul(weight, column), {classes}), bias);
}

}  // namespace

ClipLogits forward_on_tape(Tape& tape, const AsyrecParams& params, const AsyrecVars& vars, const ClipRecord& clip,
                           const ForwardOptions& options) {
  if (clip.person_i.dim() != params.dim || clip.person_j.dim() != params.dim) {
    throw std::invalid_argument("clip feature dimension " + std::to_string(clip.person_i.dim()) +
                                " does not match model dimension " + std::to_string(params.dim));
  }
  const std::size_t d = params.dim;
  Var h_i = tape.constant(params.standardizer.apply(clip.person_i));
  Var h_j = tape.constant(params.standardizer.apply(clip.person_j));

  ClipLogits out;
  out.graph = ne_agn_forward(h_i, h_j, vars.graph, options.graph);

  // Videos of a single clip have no span to normalize by.
  const std::size_t max_index = clip.clip_count > 1 ? clip.clip_count - 1 : 1;
  out.temporal = options.zero_temporal ? tape.constant(Tensor({d}, 0.0))
                                       : periodic_encode(clip.clip_index, max_index, vars.temporal);

  out.fused_i = concat({reshape(h_i, {kModalityCount * d}), out.graph.pooled_i, out.temporal}, 0);
  out.fused_j = concat({reshape(h_j, {kModalityCount * d}), out.graph.pooled_j, out.temporal}, 0);
  out.logits_i_to_j = apply_head(vars.head_i_to_j_weight, vars.head_i_to_j_bias, out.fused_i);
  if (vars.head_j_to_i_weight) {
    out.logits_j_to_i = apply_head(*vars.head_j_to_i_weight, *vars.head_j_to_i_bias, out.fused_j);
  }
  return out;
}

Var clip_loss(const ClipLogits& logits, const ClipRecord& clip) {
  Var total = cross_entropy(logits.logits_i_to_j, clip.label_i_to_j);
  if (logits.logits_j_to_i) {
    if (!clip.label_j_to_i) throw std::invalid_argument("clip of dyad '" + clip.dyad_id + "' lacks a j->i label");
    total = add(total, cross_entropy(*logits.logits_j_to_i, *clip.label_j_to_i));
  }
  return total;
}

ClipPrediction forward(const ClipRecord& clip, const AsyrecParams& params, const ForwardOptions& options) {
  Tape tape;
  const AsyrecVars vars = bind(tape, params, false);
  const ClipLogits logits = forward_on_tape(tape, params, vars, clip, options);
  ClipPrediction pred;
  pred.clip_index = clip.clip_index;
  pred.p_i_to_j = softmax_values(logits.logits_i_to_j.value().data()).values();
  if (logits.logits_j_to_i) pred.p_j_to_i = softmax_values(logits.logits_j_to_i->value().data()).values();
  return pred;
}

double loss(const ClipPrediction& pred, const ClipRecord& clip) {
  auto term = [](const std::vector<double>& p, std::size_t label) {
    if (label >= p.size()) throw std::invalid_argument("label out of range");
    return -std::log(p[label]);
  };
  double total = term(pred.p_i_to_j, clip.label_i_to_j);
  if (pred.p_j_to_i) {
    if (!clip.label_j_to_i) throw std::invalid_argument("clip of dyad '" + clip.dyad_id + "' lacks a j->i label");
    total += term(*pred.p_j_to_i, *clip.label_j_to_i);
  }
  return total;
}

VideoPrediction predict_video(std::span<const ClipPrediction> clips) {
  if (clips.empty()) throw std::invalid_argument("predict_video needs at least one clip");
  VideoPrediction out;
  out.p_i_to_j.assign(clips.front().p_i_to_j.size(), 0.0);
  if (clips.front().p_j_to_i) out.p_j_to_i = std::vector<double>(clips.front().p_j_to_i->size(), 0.0);
  const double w = 1.0 / static_cast<double>(clips.size());
  for (const ClipPrediction& c : clips) {
    if (c.p_i_to_j.size() != out.p_i_to_j.size() || c.p_j_to_i.has_value() != out.p_j_to_i.has_value()) {
      throw std::invalid_argument("predict_video: clip predictions disagree in shape");
    }
    for (std::size_t k = 0; k < c.p_i_to_j.size(); ++k) out.p_i_to_j[k] += w * c.p_i_to_j[k];
    if (c.p_j_to_i) {
      for (std::size_t k = 0; k < c.p_j_to_i->size(); ++k) (*out.p_j_to_i)[k] += w * (*c.p_j_to_i)[k];
    }
  }
  return out;
}

std::size_t argmax(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("argmax of an empty vector");
  std::size_t best = 0;
  for (std::size_t k = 1; k < values.size(); ++k)
    if (values[k] > values[best]) best = k;
  return best;
}

}  // namespace asyrec
