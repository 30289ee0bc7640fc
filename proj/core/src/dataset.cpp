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

#include "asyrec/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "asyrec/io.hpp"

namespace asyrec {

const char* modality_letter(Modality m) {
  switch (m) {
    case Modality::kFace: return "F";
    case Modality::kBody: return "B";
    case Modality::kAudio: return "A";
    case Modality::kText: return "T";
  }
  return "?";
}

bool ModalityBundle::consistent() const {
  return std::all_of(features.begin(), features.end(),
                     [&](const std::vector<double>& f) { return f.size() == features[0].size(); });
}

std::optional<std::size_t> LabelSchema::index_of(const std::string& cls) const {
  auto it = std::find(classes.begin(), classes.end(), cls);
  if (it == classes.end()) return std::nullopt;
  return static_cast<std::size_t>(it - classes.begin());
}

LabelSchema noxi_schema() { return {"noxi", {"Str", "Acq", "Fri", "Vgf"}, true}; }

LabelSchema udiva_schema() { return {"udiva", {"Kno", "Unk"}, false}; }

LabelSchema synth_schema(std::size_t classes, bool bidirectional) {
  LabelSchema s;
  s.name = "synth-" + std::to_string(classes) + (bidirectional ? "-bi" : "-uni");
  for (std::size_t c = 0; c < classes; ++c) s.classes.push_back("c" + std::to_string(c));
  s.bidirectional = bidirectional;
  return s;
}

LabelSchema schema_by_name(const std::string& name) {
  if (name == "noxi") return noxi_schema();
  if (name == "udiva") return udiva_schema();
  if (name == "noxi-I") return {"noxi-I", {"Unknown", "Known"}, true};
  if (name == "noxi-II") return {"noxi-II", {"Acq", "Fri"}, true};
  if (name == "noxi-III") return {"noxi-III", {"Fri", "Vgf"}, true};
  if (name.rfind("synth-", 0) == 0) {
    const auto parts = io::split(name, '-');
    if (parts.size() == 3 && (parts[2] == "bi" || parts[2] == "uni")) {
      const std::size_t classes = io::parse_size(parts[1]);
      if (classes >= 2) return synth_schema(classes, parts[2] == "bi");
    }
  }
  throw DatasetError("unknown label schema '" + name + "'");
}

std::size_t Dataset::clip_total() const {
  std::size_t n = 0;
  for (const auto& [id, dyad] : dyads) n += dyad.clips.size();
  return n;
}

void Dataset::validate() const {
  for (const auto& [id, dyad] : dyads) {
    if (dyad.clips.size() != dyad.clip_count) {
      throw DatasetError("dyad '" + id + "' declares " + std::to_string(dyad.clip_count) + " clips but has " +
                         std::to_string(dyad.clips.size()));
    }
    for (std::size_t t = 0; t < dyad.clips.size(); ++t) {
      const ClipRecord& c = dyad.clips[t];
      if (c.clip_index != t) throw DatasetError("dyad '" + id + "' is missing clip index " + std::to_string(t));
      if (c.dyad_id != id) throw DatasetError("clip filed under the wrong dyad '" + id + "'");
      if (c.label_i_to_j != dyad.label_i_to_j() || c.label_j_to_i != dyad.label_j_to_i()) {
        throw DatasetError("dyad '" + id + "' has labels that change across clips");
      }
      if (c.label_i_to_j >= schema.size() || (c.label_j_to_i && *c.label_j_to_i >= schema.size())) {
        throw DatasetError("dyad '" + id + "' has a label outside schema " + schema.name);
      }
      if (schema.bidirectional != c.label_j_to_i.has_value()) {
        throw DatasetError("dyad '" + id + "' label directions do not match schema " + schema.name);
      }
      for (const ModalityBundle* b : {&c.person_i, &c.person_j}) {
        for (const auto& f : b->features) {
          if (f.size() != feature_dim) throw DatasetError("dyad '" + id + "' has a feature of wrong dimension");
        }
      }
    }
  }
}

Dataset Dataset::subset(const std::vector<std::string>& dyad_ids) const {
  Dataset out;
  out.schema = schema;
  out.feature_dim = feature_dim;
  for (const std::string& id : dyad_ids) {
    auto it = dyads.find(id);
    if (it == dyads.end()) throw DatasetError("unknown dyad '" + id + "'");
    out.dyads.emplace(id, it->second);
  }
  return out;
}

std::vector<const ClipRecord*> Dataset::clips() const {
  std::vector<const ClipRecord*> out;
  out.reserve(clip_total());
  for (const auto& [id, dyad] : dyads)
    for (const ClipRecord& c : dyad.clips) out.push_back(&c);
  return out;
}

std::vector<Interval> segment_indices(double duration, std::size_t clips) {
  if (clips == 0) throw std::invalid_argument("segment_indices: clip count must be at least 1");
  if (!(duration > 0.0)) throw std::invalid_argument("segment_indices: duration must be positive");
  std::vector<Interval> out(clips);
  const double n = static_cast<double>(clips);
  for (std::size_t t = 0; t < clips; ++t) {
    out[t].begin = t == 0 ? 0.0 : out[t - 1].end;
    out[t].end = t + 1 == clips ? duration : duration * static_cast<double>(t + 1) / n;
  }
  return out;
}

namespace {

constexpr const char* kHeaderTag = "#asyrec-features";

void write_list(std::ostream& out, const std::vector<double>& values) {
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (k > 0) out << ',';
    out << io::format_significant(values[k], 9);
  }
}

std::vector<double> read_list(std::string_view field, std::size_t line_no) {
  std::vector<double> values;
  for (std::string_view part : io::split(field, ',')) {
    try {
      values.push_back(io::parse_double(part));
    } catch (const std::invalid_argument& e) {
      throw DatasetError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return values;
}

[[noreturn]] void fail(std::size_t line_no, const std::string& msg) {
  throw DatasetError("line " + std::to_string(line_no) + ": " + msg);
}

}  // namespace

void write_dataset(std::ostream& out, const Dataset& dataset) {
  out << kHeaderTag << " v1 d=" << dataset.feature_dim << " schema=" << dataset.schema.name << '\n';
  for (const auto& [id, dyad] : dataset.dyads) {
    for (const ClipRecord& c : dyad.clips) {
      out << id << '\t' << dyad.clip_count << '\t' << c.clip_index << '\t'
          << dataset.schema.classes.at(c.label_i_to_j) << '\t'
          << (c.label_j_to_i ? dataset.schema.classes.at(*c.label_j_to_i) : std::string("-"));
      for (const ModalityBundle* b : {&c.person_i, &c.person_j}) {
        for (const auto& f : b->features) {
          out << '\t';
          write_list(out, f);
        }
      }
      out << '\n';
    }
  }
}

Dataset read_dataset(std::istream& in) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) throw DatasetError("line 1: empty dataset file");
  Dataset ds;
  {
    const auto parts = io::split(line, ' ');
    if (parts.size() != 4 || parts[0] != kHeaderTag || parts[1] != "v1" || parts[2].rfind("d=", 0) != 0 ||
        parts[3].rfind("schema=", 0) != 0) {
      fail(1, "expected header '#asyrec-features v1 d=<d> schema=<name>'");
    }
    try {
      ds.feature_dim = io::parse_size(parts[2].substr(2));
      ds.schema = schema_by_name(std::string(parts[3].substr(7)));
    } catch (const std::exception& e) {
      fail(1, e.what());
    }
    if (ds.feature_dim == 0) fail(1, "feature dimension must be positive");
  }

  std::map<std::string, std::size_t> last_line;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const auto fields = io::split(line, '\t');
    if (fields.size() != 5 + 2 * kModalityCount) {
      fail(line_no, "expected " + std::to_string(5 + 2 * kModalityCount) + " tab-separated fields, got " +
                        std::to_string(fields.size()));
    }
    ClipRecord c;
    c.dyad_id = std::string(fields[0]);
    if (c.dyad_id.empty()) fail(line_no, "empty dyad id");
    try {
      c.clip_count = io::parse_size(fields[1]);
      c.clip_index = io::parse_size(fields[2]);
    } catch (const std::invalid_argument& e) {
      fail(line_no, e.what());
    }
    if (c.clip_index >= c.clip_count) {
      fail(line_no, "clip index " + std::to_string(c.clip_index) + " not below clip count " +
                        std::to_string(c.clip_count));
    }
    auto label = ds.schema.index_of(std::string(fields[3]));
    if (!label) fail(line_no, "label '" + std::string(fields[3]) + "' is not in schema " + ds.schema.name);
    c.label_i_to_j = *label;
    if (fields[4] == "-") {
      if (ds.schema.bidirectional) fail(line_no, "schema " + ds.schema.name + " requires a j->i label");
    } else {
      if (!ds.schema.bidirectional) fail(line_no, "schema " + ds.schema.name + " is unidirectional");
      auto back = ds.schema.index_of(std::string(fields[4]));
      if (!back) fail(line_no, "label '" + std::string(fields[4]) + "' is not in schema " + ds.schema.name);
      c.label_j_to_i = *back;
    }
    for (std::size_t m = 0; m < 2 * kModalityCount; ++m) {
      std::vector<double> values = read_list(fields[5 + m], line_no);
      if (values.size() != ds.feature_dim) {
        fail(line_no, "feature list " + std::to_string(m + 1) + " has length " + std::to_string(values.size()) +
                          ", expected d=" + std::to_string(ds.feature_dim));
      }
      ModalityBundle& b = m < kModalityCount ? c.person_i : c.person_j;
      b.features[m % kModalityCount] = std::move(values);
    }

    auto [it, fresh] = ds.dyads.try_emplace(c.dyad_id);
    Dyad& dyad = it->second;
    if (fresh) {
      dyad.clip_count = c.clip_count;
    } else {
      if (dyad.clip_count != c.clip_count) fail(line_no, "clip count changes within dyad '" + c.dyad_id + "'");
      if (dyad.label_i_to_j() != c.label_i_to_j || dyad.label_j_to_i() != c.label_j_to_i) {
        fail(line_no, "labels change within dyad '" + c.dyad_id + "'");
      }
    }
    if (c.clip_index != dyad.clips.size()) {
      fail(line_no, "dyad '" + c.dyad_id + "' expected clip index " + std::to_string(dyad.clips.size()) +
                        ", got " + std::to_string(c.clip_index));
    }
    dyad.clips.push_back(std::move(c));
    last_line[it->first] = line_no;
  }
  for (const auto& [id, dyad] : ds.dyads) {
    if (dyad.clips.size() != dyad.clip_count) {
      fail(last_line[id], "dyad '" + id + "' is missing clip index " + std::to_string(dyad.clips.size()) +
                              " (declared " + std::to_string(dyad.clip_count) + " clips)");
    }
  }
  return ds;
}

void save_dataset(const std::filesystem::path& path, const Dataset& dataset) {
  std::ostringstream out;
  write_dataset(out, dataset);
  io::write_file_atomic(path, out.str());
}

Dataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DatasetError("cannot open dataset '" + path.string() + "'");
  return read_dataset(in);
}

std::vector<ClassCount> class_counts(const Dataset& dataset, bool j_to_i) {
  std::vector<ClassCount> out;
  for (const std::string& cls : dataset.schema.classes) out.push_back({cls, 0, 0});
  for (const auto& [id, dyad] : dataset.dyads) {
    std::optional<std::size_t> label = j_to_i ? dyad.label_j_to_i() : std::optional(dyad.label_i_to_j());
    if (!label) continue;
    out[*label].videos += 1;
    out[*label].clips += dyad.clips.size();
  }
  return out;
}

std::string format_class_table(const Dataset& dataset) {
  std::ostringstream out;
  auto row = [&](const char* title, bool j_to_i) {
    const auto counts = class_counts(dataset, j_to_i);
    out << title << '\n' << "         ";
    for (const auto& c : counts) out << '\t' << c.cls;
    out << "\n  videos ";
    for (const auto& c : counts) out << '\t' << c.videos;
    out << "\n  clips  ";
    for (const auto& c : counts) out << '\t' << c.clips;
    out << '\n';
  };
  row(dataset.schema.bidirectional ? "direction I (i->j)" : "labels", false);
  if (dataset.schema.bidirectional) row("direction J (j->i)", true);
  out << "total: " << dataset.dyads.size() << " dyads, " << dataset.clip_total() << " clips\n";
  return out.str();
}

HierarchyLevel parse_level(const std::string& text) {
  if (text == "I") return HierarchyLevel::kI;
  if (text == "II") return HierarchyLevel::kII;
  if (text == "III") return HierarchyLevel::kIII;
  throw std::invalid_argument("hierarchy level must be I, II or III, got '" + text + "'");
}

const char* level_name(HierarchyLevel level) {
  switch (level) {
    case HierarchyLevel::kI: return "I";
    case HierarchyLevel::kII: return "II";
    case HierarchyLevel::kIII: return "III";
  }
  return "?";
}

RemapResult remap_hierarchical(const Dataset& dataset, HierarchyLevel level) {
  if (dataset.schema.classes != noxi_schema().classes) {
    throw DatasetError("hierarchical remap needs the four-class Str/Acq/Fri/Vgf schema, got " +
                       dataset.schema.name);
  }
  constexpr int kDrop = -1;
  // Source class order: Str, Acq, Fri, Vgf.
  std::array<int, 4> map{};
  std::string name;
  switch (level) {
    case HierarchyLevel::kI: map = {0, 1, 1, 1}; name = "noxi-I"; break;
    case HierarchyLevel::kII: map = {kDrop, 0, 1, 1}; name = "noxi-II"; break;
    case HierarchyLevel::kIII: map = {kDrop, kDrop, 0, 1}; name = "noxi-III"; break;
  }
  RemapResult result;
  result.dataset.schema = schema_by_name(name);
  result.dataset.schema.bidirectional = dataset.schema.bidirectional;
  result.dataset.feature_dim = dataset.feature_dim;
  for (const auto& [id, dyad] : dataset.dyads) {
    const int fwd = map[dyad.label_i_to_j()];
    const int back = dyad.label_j_to_i() ? map[*dyad.label_j_to_i()] : 0;
    if (fwd == kDrop || back == kDrop) {
      result.dropped_dyads += 1;
      continue;
    }
    Dyad copy = dyad;
    for (ClipRecord& c : copy.clips) {
      c.label_i_to_j = static_cast<std::size_t>(fwd);
      if (c.label_j_to_i) c.label_j_to_i = static_cast<std::size_t>(back);
    }
    result.dataset.dyads.emplace(id, std::move(copy));
  }
  result.empty = result.dataset.dyads.empty();
  return result;
}

}  // namespace asyrec
