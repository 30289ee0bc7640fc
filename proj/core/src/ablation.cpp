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

#include "asyrec/ablation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include "asyrec/io.hpp"
#include "asyrec/metrics.hpp"
#include "asyrec/trainer.hpp"

namespace asyrec {

namespace {

bool on_grid(double ratio, int max_tenths) {
  if (ratio == 0.0) return true;
  for (int k = 1; k <= max_tenths; ++k)
    if (std::abs(ratio - k / 10.0) < 1e-9) return true;
  return false;
}

// Mean over label directions of the L1 distance, so a single observation
// stays within [0, 2] for bidirectional schemas too.
double paired_mean_l1(const std::vector<std::vector<ClipPrediction>>& a,
                      const std::vector<std::vector<ClipPrediction>>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("fidelity: dyad count mismatch");
  std::vector<std::vector<double>> fa, fb;
  const bool both = !a.empty() && !a.front().empty() && a.front().front().p_j_to_i.has_value();
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a[k].size() != b[k].size()) throw std::invalid_argument("fidelity: clip count mismatch");
    for (std::size_t t = 0; t < a[k].size(); ++t) {
      fa.push_back(a[k][t].p_i_to_j);
      fb.push_back(b[k][t].p_i_to_j);
      if (both) {
        fa.push_back(*a[k][t].p_j_to_i);
        fb.push_back(*b[k][t].p_j_to_i);
      }
    }
  }
  return mean_l1(fa, fb);
}

FidelityReport finish(MaskSpec spec, std::vector<double> deltas, std::vector<double> uars) {
  FidelityReport r;
  r.spec = std::move(spec);
  r.delta_f = fidelity(deltas);
  r.uar = fidelity(uars);
  r.fold_delta = std::move(deltas);
  r.fold_uar = std::move(uars);
  return r;
}

void require_folds(std::span<const AblationFold> folds) {
  if (folds.empty()) throw std::invalid_argument("ablation needs at least one fold");
}

}  // namespace

std::string_view mask_kind_name(MaskKind kind) {
  switch (kind) {
    case MaskKind::kNoNodeAttention: return "no_node_att";
    case MaskKind::kNoEdgeAttention: return "no_edge_att";
    case MaskKind::kTemporalParity: return "temporal_parity";
    case MaskKind::kModalityEdge: return "modality_edge";
    case MaskKind::kSegment: return "segment";
  }
  throw std::invalid_argument("unknown mask kind");
}

MaskKind parse_mask_kind(std::string_view text) {
  for (MaskKind k : {MaskKind::kNoNodeAttention, MaskKind::kNoEdgeAttention, MaskKind::kTemporalParity,
                     MaskKind::kModalityEdge, MaskKind::kSegment}) {
    if (mask_kind_name(k) == text) return k;
  }
  throw std::invalid_argument("unknown mask kind '" + std::string(text) +
                              "' (valid: no_node_att, no_edge_att, temporal_parity, modality_edge, segment)");
}

std::string_view parity_name(Parity parity) { return parity == Parity::kOdd ? "odd" : "even"; }

Parity parse_parity(std::string_view text) {
  if (text == "odd") return Parity::kOdd;
  if (text == "even") return Parity::kEven;
  throw std::invalid_argument("unknown parity '" + std::string(text) + "' (valid: odd, even)");
}

std::string_view region_name(Region region) {
  switch (region) {
    case Region::kBeginning: return "beginning";
    case Region::kMiddle: return "middle";
    case Region::kEnd: return "end";
  }
  throw std::invalid_argument("unknown region");
}

Region parse_region(std::string_view text) {
  for (Region r : {Region::kBeginning, Region::kMiddle, Region::kEnd})
    if (region_name(r) == text) return r;
  throw std::invalid_argument("unknown region '" + std::string(text) + "' (valid: beginning, middle, end)");
}

const std::vector<ModalityPair>& modality_pairs() {
  using M = Modality;
  static const std::vector<ModalityPair> pairs = {
      {M::kAudio, M::kText}, {M::kBody, M::kText}, {M::kBody, M::kAudio},
      {M::kFace, M::kText},  {M::kFace, M::kAudio}, {M::kFace, M::kBody},
  };
  return pairs;
}

std::string pair_name(const ModalityPair& pair) {
  return std::string(modality_letter(pair.first)) + "-" + modality_letter(pair.second);
}

ModalityPair parse_pair(std::string_view text) {
  for (const auto& p : modality_pairs()) {
    const std::string fwd = pair_name(p);
    const std::string rev = std::string(modality_letter(p.second)) + "-" + modality_letter(p.first);
    if (text == fwd || text == rev) return p;
  }
  throw std::invalid_argument("unknown modality pair '" + std::string(text) +
                              "' (valid: A-T, B-T, B-A, F-T, F-A, F-B)");
}

void MaskSpec::validate() const {
  const bool parity_kind = kind == MaskKind::kTemporalParity;
  const bool segment_kind = kind == MaskKind::kSegment;
  if (parity.has_value() != parity_kind) throw std::invalid_argument("parity is set iff kind is temporal_parity");
  if (region.has_value() != segment_kind) throw std::invalid_argument("region is set iff kind is segment");
  if (pair && kind != MaskKind::kModalityEdge) throw std::invalid_argument("pair is only valid for modality_edge");
  if (parity_kind && !on_grid(ratio, 9)) throw std::invalid_argument("temporal_parity ratio must be 0 or 0.1..0.9");
  if (segment_kind && !on_grid(ratio, 3)) throw std::invalid_argument("segment ratio must be 0, 0.1, 0.2 or 0.3");
  if (!parity_kind && !segment_kind && ratio != 0.0)
    throw std::invalid_argument("ratio is only valid for temporal_parity and segment");
}

MaskSpec MaskSpec::no_node_attention() { return {}; }

MaskSpec MaskSpec::no_edge_attention() {
  MaskSpec s;
  s.kind = MaskKind::kNoEdgeAttention;
  return s;
}

MaskSpec MaskSpec::temporal_parity(Parity p, double r, std::uint64_t seed) {
  MaskSpec s;
  s.kind = MaskKind::kTemporalParity;
  s.parity = p;
  s.ratio = r;
  s.seed = seed;
  s.validate();
  return s;
}

MaskSpec MaskSpec::modality_edge(ModalityPair p) {
  MaskSpec s;
  s.kind = MaskKind::kModalityEdge;
  s.pair = p;
  return s;
}

MaskSpec MaskSpec::segment(Region r, double ratio) {
  MaskSpec s;
  s.kind = MaskKind::kSegment;
  s.region = r;
  s.ratio = ratio;
  s.validate();
  return s;
}

bool MaskSpec::empty() const {
  switch (kind) {
    case MaskKind::kTemporalParity:
    case MaskKind::kSegment: return ratio == 0.0;
    case MaskKind::kModalityEdge: return !pair.has_value();
    default: return false;
  }
}

ForwardOptions variant_no_node_attention() {
  ForwardOptions o;
  o.graph.node_attention = false;
  return o;
}

ForwardOptions variant_no_edge_attention() {
  ForwardOptions o;
  o.graph.edge_attention = false;
  return o;
}

Tensor edge_mask_for_pairs(std::span<const ModalityPair> pairs, std::size_t modalities) {
  Tensor keep({modalities, modalities}, 1.0);
  for (const auto& [a, b] : pairs) {
    const auto u = static_cast<std::size_t>(a), v = static_cast<std::size_t>(b);
    if (u >= modalities || v >= modalities || u == v) throw std::invalid_argument("invalid modality pair");
    keep.at(u, v) = 0.0;
    keep.at(v, u) = 0.0;
  }
  return keep;
}

std::vector<std::vector<bool>> temporal_parity_selection(const Dataset& dataset, Parity parity, double ratio,
                                                         std::uint64_t seed) {
  if (!(ratio >= 0.0 && ratio <= 1.0)) throw std::invalid_argument("masking ratio must lie in [0, 1]");
  std::vector<std::vector<bool>> selected;
  std::vector<std::pair<std::size_t, std::size_t>> candidates;
  const std::size_t want = parity == Parity::kOdd ? 1 : 0;
  std::size_t k = 0;
  for (const auto& [id, dyad] : dataset.dyads) {
    selected.emplace_back(dyad.clips.size(), false);
    for (std::size_t t = 0; t < dyad.clips.size(); ++t)
      if (dyad.clips[t].clip_index % 2 == want) candidates.emplace_back(k, t);
    ++k;
  }
  std::mt19937_64 rng(seed ^ 0x7e3bd0a5ULL);
  std::shuffle(candidates.begin(), candidates.end(), rng);
  const auto count = static_cast<std::size_t>(std::lround(ratio * static_cast<double>(candidates.size())));
  for (std::size_t c = 0; c < count; ++c) selected[candidates[c].first][candidates[c].second] = true;
  return selected;
}

std::pair<std::size_t, std::size_t> segment_range(std::size_t clip_count, Region region, double ratio) {
  if (!(ratio >= 0.0 && ratio <= 1.0)) throw std::invalid_argument("masking ratio must lie in [0, 1]");
  const auto count = static_cast<std::size_t>(std::lround(ratio * static_cast<double>(clip_count)));
  if (count >= clip_count) {
    throw std::invalid_argument("segment mask would remove all " + std::to_string(clip_count) + " clips of a dyad");
  }
  switch (region) {
    case Region::kBeginning: return {0, count};
    case Region::kEnd: return {clip_count - count, count};
    case Region::kMiddle: {
      const std::size_t first = std::min(clip_count / 2 - std::min(count / 2, clip_count / 2), clip_count - count);
      return {first, count};
    }
  }
  throw std::invalid_argument("unknown region");
}

double mean_l1(const std::vector<std::vector<double>>& original, const std::vector<std::vector<double>>& masked) {
  if (original.size() != masked.size()) {
    throw std::invalid_argument("fidelity: " + std::to_string(original.size()) + " original outputs vs " +
                                std::to_string(masked.size()) + " masked");
  }
  if (original.empty()) throw std::invalid_argument("fidelity: no observations");
  double total = 0.0;
  for (std::size_t n = 0; n < original.size(); ++n) {
    if (original[n].size() != masked[n].size()) throw std::invalid_argument("fidelity: output width mismatch");
    for (std::size_t c = 0; c < original[n].size(); ++c) total += std::abs(original[n][c] - masked[n][c]);
  }
  return total / static_cast<double>(original.size());
}

double fidelity(std::span<const double> fold_values) {
  if (fold_values.empty()) throw std::invalid_argument("fidelity: no folds");
  return std::accumulate(fold_values.begin(), fold_values.end(), 0.0) / static_cast<double>(fold_values.size());
}

FidelityReport mask_temporal_parity(std::span<const AblationFold> folds, const MaskSpec& spec) {
  spec.validate();
  if (spec.kind != MaskKind::kTemporalParity) throw std::invalid_argument("expected a temporal_parity spec");
  require_folds(folds);
  std::vector<double> deltas, uars;
  ForwardOptions zeroed;
  zeroed.zero_temporal = true;
  for (const AblationFold& fold : folds) {
    const auto original = predict_dataset(fold.params, fold.test);
    const auto selection = temporal_parity_selection(fold.test, *spec.parity, spec.ratio, spec.seed);
    auto masked = original;
    std::size_t k = 0;
    for (const auto& [id, dyad] : fold.test.dyads) {
      for (std::size_t t = 0; t < dyad.clips.size(); ++t)
        if (selection[k][t]) masked[k][t] = forward(dyad.clips[t], fold.params, zeroed);
      ++k;
    }
    deltas.push_back(paired_mean_l1(original, masked));
    uars.push_back(metrics_from_predictions(fold.test, masked).uar);
  }
  return finish(spec, std::move(deltas), std::move(uars));
}

FidelityReport mask_modality_edges(std::span<const AblationFold> folds, std::span<const ModalityPair> pairs,
                                   bool renormalize) {
  require_folds(folds);
  ForwardOptions options;
  options.graph.edge_mask = edge_mask_for_pairs(pairs);
  options.graph.renormalize = renormalize;
  std::vector<double> deltas, uars;
  for (const AblationFold& fold : folds) {
    const auto original = predict_dataset(fold.params, fold.test);
    const auto masked = pairs.empty() ? original : predict_dataset(fold.params, fold.test, options);
    deltas.push_back(paired_mean_l1(original, masked));
    uars.push_back(metrics_from_predictions(fold.test, masked).uar);
  }
  MaskSpec spec;
  spec.kind = MaskKind::kModalityEdge;
  if (pairs.size() == 1) spec.pair = pairs.front();
  return finish(spec, std::move(deltas), std::move(uars));
}

FidelityReport mask_modality_edge(std::span<const AblationFold> folds, const MaskSpec& spec) {
  spec.validate();
  if (spec.kind != MaskKind::kModalityEdge) throw std::invalid_argument("expected a modality_edge spec");
  std::vector<ModalityPair> pairs;
  if (spec.pair) pairs.push_back(*spec.pair);
  FidelityReport r = mask_modality_edges(folds, pairs);
  r.spec = spec;
  return r;
}

FidelityReport mask_segment(std::span<const AblationFold> folds, const MaskSpec& spec) {
  spec.validate();
  if (spec.kind != MaskKind::kSegment) throw std::invalid_argument("expected a segment spec");
  require_folds(folds);
  std::vector<double> deltas, uars;
  for (const AblationFold& fold : folds) {
    const auto preds = predict_dataset(fold.params, fold.test);
    const LabelSchema& schema = fold.test.schema;
    const bool both = schema.bidirectional;
    ConfusionMatrix cm_i(schema.size()), cm_j(schema.size());
    std::vector<std::vector<double>> original, masked;
    std::size_t k = 0;
    for (const auto& [id, dyad] : fold.test.dyads) {
      const auto& clips = preds[k++];
      const auto [first, count] = segment_range(clips.size(), *spec.region, spec.ratio);
      std::vector<ClipPrediction> kept;
      for (std::size_t t = 0; t < clips.size(); ++t)
        if (t < first || t >= first + count) kept.push_back(clips[t]);
      const VideoPrediction full = predict_video(clips);
      const VideoPrediction part = predict_video(kept);
      original.push_back(full.p_i_to_j);
      masked.push_back(part.p_i_to_j);
      cm_i.add(dyad.label_i_to_j(), argmax(part.p_i_to_j));
      if (both) {
        original.push_back(*full.p_j_to_i);
        masked.push_back(*part.p_j_to_i);
        cm_j.add(*dyad.label_j_to_i(), argmax(*part.p_j_to_i));
      }
    }
    deltas.push_back(mean_l1(original, masked));
    double u = DirectionMetrics::from_confusion("I", cm_i, schema).uar;
    if (both) u = 0.5 * (u + DirectionMetrics::from_confusion("J", cm_j, schema).uar);
    uars.push_back(u);
  }
  return finish(spec, std::move(deltas), std::move(uars));
}

FidelityReport attention_variant(std::span<const AblationFold> folds, const MaskSpec& spec) {
  spec.validate();
  ForwardOptions options;
  if (spec.kind == MaskKind::kNoNodeAttention) {
    options = variant_no_node_attention();
  } else if (spec.kind == MaskKind::kNoEdgeAttention) {
    options = variant_no_edge_attention();
  } else {
    throw std::invalid_argument("expected an attention-removal spec");
  }
  require_folds(folds);
  std::vector<double> deltas, uars;
  for (const AblationFold& fold : folds) {
    const auto original = predict_dataset(fold.params, fold.test);
    const auto variant = predict_dataset(fold.params, fold.test, options);
    deltas.push_back(paired_mean_l1(original, variant));
    uars.push_back(metrics_from_predictions(fold.test, variant).uar);
  }
  return finish(spec, std::move(deltas), std::move(uars));
}

FidelityReport run_mask(std::span<const AblationFold> folds, const MaskSpec& spec) {
  switch (spec.kind) {
    case MaskKind::kNoNodeAttention:
    case MaskKind::kNoEdgeAttention: return attention_variant(folds, spec);
    case MaskKind::kTemporalParity: return mask_temporal_parity(folds, spec);
    case MaskKind::kModalityEdge: return mask_modality_edge(folds, spec);
    case MaskKind::kSegment: return mask_segment(folds, spec);
  }
  throw std::invalid_argument("unknown mask kind");
}

std::vector<MaskSpec> mask_grid(MaskKind kind, std::uint64_t seed) {
  std::vector<MaskSpec> grid;
  switch (kind) {
    case MaskKind::kNoNodeAttention: grid.push_back(MaskSpec::no_node_attention()); break;
    case MaskKind::kNoEdgeAttention: grid.push_back(MaskSpec::no_edge_attention()); break;
    case MaskKind::kTemporalParity:
      grid.push_back(MaskSpec::temporal_parity(Parity::kOdd, 0.0, seed));
      for (Parity p : {Parity::kOdd, Parity::kEven})
        for (int k = 1; k <= 9; ++k) grid.push_back(MaskSpec::temporal_parity(p, k / 10.0, seed));
      break;
    case MaskKind::kModalityEdge: {
      MaskSpec none;
      none.kind = MaskKind::kModalityEdge;
      grid.push_back(none);
      for (const auto& p : modality_pairs()) grid.push_back(MaskSpec::modality_edge(p));
      break;
    }
    case MaskKind::kSegment:
      grid.push_back(MaskSpec::segment(Region::kBeginning, 0.0));
      for (Region r : {Region::kBeginning, Region::kMiddle, Region::kEnd})
        for (int k = 1; k <= 3; ++k) grid.push_back(MaskSpec::segment(r, k / 10.0));
      break;
  }
  for (auto& s : grid) s.seed = seed;
  return grid;
}

std::string ablation_csv(std::span<const FidelityReport> reports) {
  std::ostringstream out;
  out << "kind,parity,ratio,pair,region,seed,fold,dF,uar\n";
  for (const FidelityReport& r : reports) {
    const MaskSpec& s = r.spec;
    const bool ratio_kind = s.kind == MaskKind::kTemporalParity || s.kind == MaskKind::kSegment;
    std::string prefix = std::string(mask_kind_name(s.kind)) + ",";
    prefix += s.parity ? std::string(parity_name(*s.parity)) : "";
    prefix += ",";
    prefix += ratio_kind ? io::format_significant(s.ratio, 6) : "";
    prefix += ",";
    prefix += s.pair ? pair_name(*s.pair) : (s.kind == MaskKind::kModalityEdge ? "none" : "");
    prefix += ",";
    prefix += s.region ? std::string(region_name(*s.region)) : "";
    prefix += "," + std::to_string(s.seed) + ",";
    if (!s.empty()) {
      for (std::size_t f = 0; f < r.fold_delta.size(); ++f) {
        out << prefix << f << ',' << io::format_significant(r.fold_delta[f], 10) << ','
            << io::format_significant(r.fold_uar[f], 10) << '\n';
      }
    }
    out << prefix << "mean," << io::format_significant(r.delta_f, 10) << ',' << io::format_significant(r.uar, 10)
        << '\n';
  }
  return out.str();
}

}  // namespace asyrec
