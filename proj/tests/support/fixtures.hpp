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

// Hand-built datasets with known label and clip counts.
#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "asyrec/dataset.hpp"

namespace asyrec::fixture {

struct DyadSpec {
  std::string id;
  std::size_t clips = 1;
  std::size_t label_i_to_j = 0;
  std::optional<std::size_t> label_j_to_i;
};

// Features are a deterministic function of (dyad ordinal, clip, slot) and
// exactly representable in the text format.
inline Dataset build(const LabelSchema& schema, std::size_t d, const std::vector<DyadSpec>& specs) {
  Dataset ds;
  ds.schema = schema;
  ds.feature_dim = d;
  std::size_t ordinal = 0;
  for (const DyadSpec& s : specs) {
    Dyad dyad;
    dyad.clip_count = s.clips;
    for (std::size_t t = 0; t < s.clips; ++t) {
      ClipRecord c;
      c.dyad_id = s.id;
      c.clip_count = s.clips;
      c.clip_index = t;
      c.label_i_to_j = s.label_i_to_j;
      c.label_j_to_i = s.label_j_to_i;
      std::size_t slot = 0;
      for (ModalityBundle* b : {&c.person_i, &c.person_j})
        for (auto& f : b->features) {
          f.resize(d);
          for (std::size_t k = 0; k < d; ++k, ++slot)
            f[k] = static_cast<double>((ordinal * 31 + t * 7 + slot * 3) % 17) * 0.125 - 1.0;
        }
      dyad.clips.push_back(std::move(c));
    }
    ds.dyads.emplace(s.id, std::move(dyad));
    ++ordinal;
  }
  return ds;
}

inline std::string id(const std::string& prefix, std::size_t k) {
  std::string digits = std::to_string(k);
  return prefix + std::string(digits.size() < 4 ? 4 - digits.size() : 0, '0') + digits;
}

// Direction-I video and clip counts per NoXi class as printed for the real
// corpus: Str 36/3792, Acq 30/3320, Fri 6/643, Vgf 12/1392.
struct Table1Row {
  const char* cls;
  std::size_t videos;
  std::size_t clips;
};
inline constexpr std::array<Table1Row, 4> kNoxiI = {
    {{"Str", 36, 3792}, {"Acq", 30, 3320}, {"Fri", 6, 643}, {"Vgf", 12, 1392}}};

// One dyad per video; clips spread as evenly as possible. Direction J
// mirrors direction I.
inline Dataset table1_noxi_i(std::size_t d = 1) {
  std::vector<DyadSpec> specs;
  for (std::size_t c = 0; c < kNoxiI.size(); ++c) {
    const Table1Row& row = kNoxiI[c];
    for (std::size_t v = 0; v < row.videos; ++v) {
      const std::size_t clips = row.clips / row.videos + (v < row.clips % row.videos ? 1 : 0);
      specs.push_back({id(std::string(row.cls) + "-", v), clips, c, c});
    }
  }
  return build(noxi_schema(), d, specs);
}

// Every ordered (i->j, j->i) label pair over the NoXi classes, with
// 1 + (3a + b) % 4 dyads of 2 + a + b clips each.
inline Dataset hierarchy_fixture(std::size_t d = 2) {
  std::vector<DyadSpec> specs;
  std::size_t k = 0;
  for (std::size_t a = 0; a < 4; ++a)
    for (std::size_t b = 0; b < 4; ++b)
      for (std::size_t rep = 0; rep < 1 + (3 * a + b) % 4; ++rep) specs.push_back({id("h", k++), 2 + a + b, a, b});
  return build(noxi_schema(), d, specs);
}

// Fig. 7 merges written out by class name, independent of the library's
// index tables. An empty string marks a dropped class.
inline std::string merged_class(const std::string& level, const std::string& cls) {
  static const std::map<std::string, std::map<std::string, std::string>> table = {
      {"I", {{"Str", "Unknown"}, {"Acq", "Known"}, {"Fri", "Known"}, {"Vgf", "Known"}}},
      {"II", {{"Str", ""}, {"Acq", "Acq"}, {"Fri", "Fri"}, {"Vgf", "Fri"}}},
      {"III", {{"Str", ""}, {"Acq", ""}, {"Fri", "Fri"}, {"Vgf", "Vgf"}}},
  };
  return table.at(level).at(cls);
}

struct HierarchyTally {
  std::map<std::string, std::size_t> videos_i, videos_j, clips_i;
  std::size_t retained = 0;
  std::size_t dropped = 0;
  std::size_t retained_clips = 0;
};

// Expected counts after remapping: a dyad survives when both of its labels
// map to a retained class.
inline HierarchyTally expected_tally(const Dataset& source, const std::string& level) {
  HierarchyTally t;
  for (const auto& [id, dyad] : source.dyads) {
    const std::string fwd = merged_class(level, source.schema.classes[dyad.label_i_to_j()]);
    const std::string back = merged_class(level, source.schema.classes[*dyad.label_j_to_i()]);
    if (fwd.empty() || back.empty()) {
      ++t.dropped;
      continue;
    }
    ++t.retained;
    t.retained_clips += dyad.clips.size();
    t.videos_i[fwd] += 1;
    t.videos_j[back] += 1;
    t.clips_i[fwd] += dyad.clips.size();
  }
  return t;
}

inline HierarchyTally observed_tally(const RemapResult& r) {
  HierarchyTally t;
  t.dropped = r.dropped_dyads;
  for (const auto& [id, dyad] : r.dataset.dyads) {
    ++t.retained;
    t.retained_clips += dyad.clips.size();
    t.videos_i[r.dataset.schema.classes[dyad.label_i_to_j()]] += 1;
    t.videos_j[r.dataset.schema.classes[*dyad.label_j_to_i()]] += 1;
    t.clips_i[r.dataset.schema.classes[dyad.label_i_to_j()]] += dyad.clips.size();
  }
  return t;
}

inline bool operator==(const HierarchyTally& a, const HierarchyTally& b) {
  return a.videos_i == b.videos_i && a.videos_j == b.videos_j && a.clips_i == b.clips_i &&
         a.retained == b.retained && a.dropped == b.dropped && a.retained_clips == b.retained_clips;
}

}  // namespace asyrec::fixture
