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

#include <array>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace asyrec {

inline constexpr std::size_t kModalityCount = 4;

// Row order of a person's node set.
enum class Modality : std::size_t { kFace = 0, kBody = 1, kAudio = 2, kText = 3 };

const char* modality_letter(Modality m);  // "F", "B", "A", "T"

// Four same-dimension feature vectors of one person for one clip.
struct ModalityBundle {
  std::array<std::vector<double>, kModalityCount> features;

  std::vector<double>& operator[](Modality m) { return features[static_cast<std::size_t>(m)]; }
  const std::vector<double>& operator[](Modality m) const {
    return features[static_cast<std::size_t>(m)];
  }
  std::size_t dim() const { return features[0].size(); }
  bool consistent() const;

  friend bool operator==(const ModalityBundle&, const ModalityBundle&) = default;
};

struct ClipRecord {
  std::string dyad_id;
  std::size_t clip_count = 0;  // n, the dyad's declared number of clips
  std::size_t clip_index = 0;  // t in [0, n)
  ModalityBundle person_i;
  ModalityBundle person_j;
  std::size_t label_i_to_j = 0;
  std::optional<std::size_t> label_j_to_i;

  friend bool operator==(const ClipRecord&, const ClipRecord&) = default;
};

struct LabelSchema {
  std::string name;
  std::vector<std::string> classes;
  bool bidirectional = true;

  std::size_t size() const { return classes.size(); }
  std::optional<std::size_t> index_of(const std::string& cls) const;

  friend bool operator==(const LabelSchema&, const LabelSchema&) = default;
};

// Four-class bidirectional schema {Str, Acq, Fri, Vgf}.
LabelSchema noxi_schema();
// Two-class unidirectional schema {Kno, Unk}.
LabelSchema udiva_schema();
// Generic schema "synth-<C>-bi|uni" with classes c0..c{C-1}.
LabelSchema synth_schema(std::size_t classes, bool bidirectional);
// Resolves every schema name the serializer can emit, including the
// hierarchical ones ("noxi-I", "noxi-II", "noxi-III").
LabelSchema schema_by_name(const std::string& name);

struct Dyad {
  std::size_t clip_count = 0;
  std::vector<ClipRecord> clips;  // ordered by clip_index, 0..n-1

  std::size_t label_i_to_j() const { return clips.front().label_i_to_j; }
  std::optional<std::size_t> label_j_to_i() const { return clips.front().label_j_to_i; }

  friend bool operator==(const Dyad&, const Dyad&) = default;
};

struct Dataset {
  LabelSchema schema;
  std::size_t feature_dim = 0;
  std::map<std::string, Dyad> dyads;

  std::size_t clip_total() const;
  // Throws DatasetError when any structural invariant is broken.
  void validate() const;
  // Clips of the listed dyads, in dyad order.
  Dataset subset(const std::vector<std::string>& dyad_ids) const;
  std::vector<const ClipRecord*> clips() const;

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

class DatasetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Interval {
  double begin = 0.0;
  double end = 0.0;
};

// n non-overlapping clips of width T / n covering [0, T]. Clip t (1-based)
// spans [(t - 1) T / n, t T / n].
std::vector<Interval> segment_indices(double duration, std::size_t clips);

// Record-per-line text format:
//   #asyrec-features v1 d=<d> schema=<name>
//   further lines starting with # are comments
//   dyad_id \t n_clips \t clip_index \t label_i_to_j \t label_j_to_i|- \t
//     eight comma-separated float lists (i.face, i.body, i.audio, i.text,
//     j.face, j.body, j.audio, j.text), tab-separated
// Floats carry 9 significant digits.
void write_dataset(std::ostream& out, const Dataset& dataset);
Dataset read_dataset(std::istream& in);
void save_dataset(const std::filesystem::path& path, const Dataset& dataset);
Dataset load_dataset(const std::filesystem::path& path);

// Video and clip counts per class for one label direction.
struct ClassCount {
  std::string cls;
  std::size_t videos = 0;
  std::size_t clips = 0;
};
std::vector<ClassCount> class_counts(const Dataset& dataset, bool j_to_i = false);
std::string format_class_table(const Dataset& dataset);

enum class HierarchyLevel { kI, kII, kIII };
HierarchyLevel parse_level(const std::string& text);
const char* level_name(HierarchyLevel level);

// Binary restagings of the four-class schema:
//   I:   Str -> Unknown; Acq, Fri, Vgf -> Known
//   II:  Acq -> Acq; Fri, Vgf -> Fri; dyads with a Str label are dropped
//   III: Fri -> Fri; Vgf -> Vgf; dyads with a Str or Acq label are dropped
struct RemapResult {
  Dataset dataset;
  std::size_t dropped_dyads = 0;
  bool empty = false;  // flagged when no dyad survives
};
RemapResult remap_hierarchical(const Dataset& dataset, HierarchyLevel level);

}  // namespace asyrec
