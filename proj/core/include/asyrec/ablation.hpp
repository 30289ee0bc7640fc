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
#include <string_view>
#include <utility>
#include <vector>

#include "asyrec/dataset.hpp"
#include "asyrec/model.hpp"

namespace asyrec {

enum class MaskKind { kNoNodeAttention, kNoEdgeAttention, kTemporalParity, kModalityEdge, kSegment };
enum class Parity { kOdd, kEven };
enum class Region { kBeginning, kMiddle, kEnd };

using ModalityPair = std::pair<Modality, Modality>;

std::string_view mask_kind_name(MaskKind kind);  // "no_node_att", "temporal_parity", ...
MaskKind parse_mask_kind(std::string_view text);
std::string_view parity_name(Parity parity);
Parity parse_parity(std::string_view text);
std::string_view region_name(Region region);
Region parse_region(std::string_view text);

// The six cross-modality pairs in report order: A-T, B-T, B-A, F-T, F-A, F-B.
const std::vector<ModalityPair>& modality_pairs();
std::string pair_name(const ModalityPair& pair);
// Accepts either letter order; rejects anything outside the six pairs.
ModalityPair parse_pair(std::string_view text);

struct MaskSpec {
  MaskKind kind = MaskKind::kNoNodeAttention;
  std::optional<Parity> parity;     // temporal_parity
  double ratio = 0.0;               // temporal_parity, segment
  std::optional<ModalityPair> pair;  // modality_edge
  std::optional<Region> region;     // segment
  std::uint64_t seed = 0;

  // Rejects fields that do not belong to the kind and out-of-grid ratios.
  // Ratio 0 (or a modality_edge spec without a pair) is the empty mask.
  void validate() const;

  static MaskSpec no_node_attention();
  static MaskSpec no_edge_attention();
  static MaskSpec temporal_parity(Parity parity, double ratio, std::uint64_t seed);
  static MaskSpec modality_edge(ModalityPair pair);
  static MaskSpec segment(Region region, double ratio);

  bool empty() const;
};

// Trained parameters plus the test split they are scored on.
struct AblationFold {
  AsyrecParams params;
  Dataset test;
};

struct FidelityReport {
  MaskSpec spec;
  std::vector<double> fold_delta;  // mean L1 distance per fold
  std::vector<double> fold_uar;    // UAR of the masked model per fold
  double delta_f = 0.0;            // mean over folds
  double uar = 0.0;
};

ForwardOptions variant_no_node_attention();
ForwardOptions variant_no_edge_attention();

// Keep-mask over the r x r adjacency with both directed edges of every
// listed pair removed.
Tensor edge_mask_for_pairs(std::span<const ModalityPair> pairs, std::size_t modalities = kModalityCount);

// Clips (dyad order, then clip order) whose temporal signal is zeroed: a
// seeded uniform sample of round(ratio * m) of the m clips with the chosen
// parity. Samples for a fixed seed are nested in the ratio.
std::vector<std::vector<bool>> temporal_parity_selection(const Dataset& dataset, Parity parity, double ratio,
                                                         std::uint64_t seed);

// Contiguous clip range [first, first + count) masked within an n-clip dyad:
// count = round(ratio * n); the middle region is centered at floor(n / 2).
std::pair<std::size_t, std::size_t> segment_range(std::size_t clip_count, Region region, double ratio);

// Mean over observations of the L1 distance between aligned probability
// vectors. Rejects length mismatches.
double mean_l1(const std::vector<std::vector<double>>& original, const std::vector<std::vector<double>>& masked);

// Mean over folds of the per-fold values.
double fidelity(std::span<const double> fold_values);

FidelityReport mask_temporal_parity(std::span<const AblationFold> folds, const MaskSpec& spec);
FidelityReport mask_modality_edge(std::span<const AblationFold> folds, const MaskSpec& spec);
// Edge masking with an arbitrary pair set; `renormalize` false leaves the
// surviving weights unnormalized.
FidelityReport mask_modality_edges(std::span<const AblationFold> folds, std::span<const ModalityPair> pairs,
                                   bool renormalize = true);
FidelityReport mask_segment(std::span<const AblationFold> folds, const MaskSpec& spec);
FidelityReport attention_variant(std::span<const AblationFold> folds, const MaskSpec& spec);
// Dispatch on spec.kind.
FidelityReport run_mask(std::span<const AblationFold> folds, const MaskSpec& spec);

// Full grids: 9 ratios x 2 parities, 6 pairs, 3 regions x 3 ratios, or the
// single variant. Masking grids start with their empty-mask smoke spec.
std::vector<MaskSpec> mask_grid(MaskKind kind, std::uint64_t seed);

// Header `kind,parity,ratio,pair,region,seed,fold,dF,uar`. Each report gives
// one row per fold and a `mean` row; empty-mask reports give the `mean` row
// only, so per-fold row counts match the grid sizes.
std::string ablation_csv(std::span<const FidelityReport> reports);

}  // namespace asyrec
