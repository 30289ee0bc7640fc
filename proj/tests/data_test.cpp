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

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <set>
#include <sstream>

#include "asyrec/dataset.hpp"
#include "asyrec/folds.hpp"
#include "asyrec/synth.hpp"
#include "support/fixtures.hpp"

namespace asyrec {
namespace {

std::string serialize(const Dataset& ds) {
  std::ostringstream out;
  write_dataset(out, ds);
  return out.str();
}

// Message of the DatasetError raised when reading `text`.
std::string read_error(const std::string& text) {
  std::istringstream in(text);
  try {
    read_dataset(in);
  } catch (const DatasetError& e) {
    return e.what();
  }
  return "";
}

TEST(Segments, EqualWidthIntervalsCoverTheVideo) {
  const auto s = segment_indices(100.0, 10);
  ASSERT_EQ(s.size(), 10u);
  for (std::size_t t = 0; t < 10; ++t) {
    EXPECT_DOUBLE_EQ(s[t].begin, 10.0 * static_cast<double>(t));
    EXPECT_DOUBLE_EQ(s[t].end, 10.0 * static_cast<double>(t + 1));
  }
  const auto one = segment_indices(10.0, 1);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0].begin, 0.0);
  EXPECT_EQ(one[0].end, 10.0);
  EXPECT_THROW(segment_indices(10.0, 0), std::invalid_argument);
  EXPECT_THROW(segment_indices(0.0, 3), std::invalid_argument);
}

TEST(Segments, PartitionHoldsForAwkwardDurations) {
  for (double T : {0.3, 7.0, 1234.567})
    for (std::size_t n : {1u, 3u, 7u, 97u}) {
      const auto s = segment_indices(T, n);
      EXPECT_EQ(s.front().begin, 0.0);
      EXPECT_EQ(s.back().end, T);
      for (std::size_t t = 0; t < n; ++t) {
        EXPECT_NEAR(s[t].end - s[t].begin, T / static_cast<double>(n), 1e-12 * T);
        if (t > 0) {
          EXPECT_EQ(s[t].begin, s[t - 1].end);
        }
      }
    }
}

TEST(DatasetIo, SmallFileRoundTripsExactly) {
  const Dataset ds = fixture::build(noxi_schema(), 3, {{"a", 3, 0, 2}, {"b", 3, 1, 1}});
  std::istringstream in(serialize(ds));
  const Dataset back = read_dataset(in);
  EXPECT_EQ(back, ds);
  EXPECT_EQ(serialize(back), serialize(ds));
}

TEST(DatasetIo, SynthDataSurvivesSaveLoadSave) {
  SynthConfig cfg;
  cfg.dyads_per_class = 2;
  cfg.clips = 4;
  const Dataset ds = synth_generate(cfg, 5);
  const auto dir = std::filesystem::temp_directory_path() / "asyrec_data_test";
  std::filesystem::create_directories(dir);
  save_dataset(dir / "a.tsv", ds);
  const Dataset back = load_dataset(dir / "a.tsv");
  EXPECT_EQ(back.clip_total(), ds.clip_total());
  EXPECT_EQ(serialize(back), serialize(ds));
  std::filesystem::remove_all(dir);
}

TEST(DatasetIo, UnidirectionalSchemaUsesDashForMissingLabel) {
  const Dataset ds = fixture::build(udiva_schema(), 1, {{"u", 2, 1, std::nullopt}});
  const std::string text = serialize(ds);
  EXPECT_NE(text.find("\tUnk\t-\t"), std::string::npos) << text;
  std::istringstream in(text);
  EXPECT_EQ(read_dataset(in), ds);
}

TEST(DatasetIo, CommentLinesAreSkipped) {
  const Dataset ds = fixture::build(noxi_schema(), 1, {{"a", 2, 0, 0}});
  std::string text = serialize(ds);
  text.insert(text.find('\n') + 1, "# seed = 4\n");
  std::istringstream in(text);
  EXPECT_EQ(read_dataset(in), ds);
}

TEST(DatasetIo, WrongVectorLengthNamesTheLine) {
  const Dataset ds = fixture::build(noxi_schema(), 2, {{"a", 3, 0, 0}});
  std::string text = serialize(ds);
  // Line 3 is clip 1; drop its last feature value.
  std::size_t pos = 0;
  for (int k = 0; k < 3; ++k) pos = text.find('\n', pos) + 1;
  const std::size_t last_comma = text.rfind(',', pos - 1);
  text.erase(last_comma, pos - 1 - last_comma);
  const std::string msg = read_error(text);
  EXPECT_NE(msg.find("line 3"), std::string::npos) << msg;
  EXPECT_NE(msg.find("expected d=2"), std::string::npos) << msg;
}

TEST(DatasetIo, StructuralErrorsAreRejectedWithLineNumbers) {
  const Dataset ds = fixture::build(noxi_schema(), 1, {{"a", 3, 0, 0}});
  const std::string good = serialize(ds);
  auto lines = [&] {
    std::vector<std::string> out;
    std::istringstream in(good);
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
  }();
  auto join = [](const std::vector<std::string>& ls) {
    std::string s;
    for (const auto& l : ls) s += l + "\n";
    return s;
  };

  auto missing = lines;
  missing.erase(missing.begin() + 2);  // clip 1 gone
  EXPECT_NE(read_error(join(missing)).find("line 3"), std::string::npos) << read_error(join(missing));

  auto bad_label = lines;
  bad_label[1].replace(bad_label[1].find("Str"), 3, "Foe");
  const std::string label_msg = read_error(join(bad_label));
  EXPECT_NE(label_msg.find("line 2"), std::string::npos) << label_msg;
  EXPECT_NE(label_msg.find("Foe"), std::string::npos) << label_msg;

  auto truncated = lines;
  truncated[3] = "a\t3\t2\tStr";
  EXPECT_NE(read_error(join(truncated)).find("line 4"), std::string::npos);

  auto bad_header = lines;
  bad_header[0] = "#asyrec-features v2 d=1 schema=noxi";
  EXPECT_NE(read_error(join(bad_header)).find("line 1"), std::string::npos);

  EXPECT_NE(read_error(good.substr(0, good.find('\n') + 1) + "a\t2\t2\tStr\tStr\t" + "0\t0\t0\t0\t0\t0\t0\t0\n")
                .find("clip index 2"),
            std::string::npos);
}

TEST(DatasetIo, Table1CountsLoadExactly) {
  const Dataset ds = fixture::table1_noxi_i(1);
  const auto dir = std::filesystem::temp_directory_path() / "asyrec_table1";
  std::filesystem::create_directories(dir);
  save_dataset(dir / "table1.tsv", ds);
  const Dataset back = load_dataset(dir / "table1.tsv");
  std::filesystem::remove_all(dir);
  const auto counts = class_counts(back);
  ASSERT_EQ(counts.size(), fixture::kNoxiI.size());
  for (std::size_t c = 0; c < counts.size(); ++c) {
    EXPECT_EQ(counts[c].cls, fixture::kNoxiI[c].cls);
    EXPECT_EQ(counts[c].videos, fixture::kNoxiI[c].videos);
    EXPECT_EQ(counts[c].clips, fixture::kNoxiI[c].clips);
  }
  EXPECT_EQ(back.clip_total(), 3792u + 3320u + 643u + 1392u);
  const std::string table = format_class_table(back);
  EXPECT_NE(table.find("3792"), std::string::npos) << table;
}

TEST(Hierarchy, LevelsMatchTheNamedMerges) {
  const Dataset source = fixture::hierarchy_fixture();
  for (const auto& [level, name] : {std::pair{HierarchyLevel::kI, "I"}, std::pair{HierarchyLevel::kII, "II"},
                                    std::pair{HierarchyLevel::kIII, "III"}}) {
    const RemapResult r = remap_hierarchical(source, level);
    EXPECT_EQ(r.dataset.schema.size(), 2u);
    EXPECT_TRUE(fixture::observed_tally(r) == fixture::expected_tally(source, name)) << "level " << name;
    EXPECT_FALSE(r.empty);
    // Retained dyads keep every clip.
    for (const auto& [id, dyad] : r.dataset.dyads) EXPECT_EQ(dyad.clips.size(), source.dyads.at(id).clips.size());
  }
}

TEST(Hierarchy, LevelOneHasNoDropsAndLevelTwoRenamesVgf) {
  const Dataset source = fixture::hierarchy_fixture();
  const RemapResult one = remap_hierarchical(source, HierarchyLevel::kI);
  EXPECT_EQ(one.dropped_dyads, 0u);
  EXPECT_EQ(one.dataset.schema.classes, (std::vector<std::string>{"Unknown", "Known"}));
  const RemapResult two = remap_hierarchical(source, HierarchyLevel::kII);
  EXPECT_EQ(two.dataset.schema.classes, (std::vector<std::string>{"Acq", "Fri"}));
  for (const auto& [id, dyad] : two.dataset.dyads) {
    if (source.dyads.at(id).label_i_to_j() == 3) {
      EXPECT_EQ(dyad.label_i_to_j(), 1u) << id;
    }
  }
}

TEST(Hierarchy, StrOnlyInputEmptiesLevelThree) {
  const Dataset strangers = fixture::build(noxi_schema(), 1, {{"a", 2, 0, 0}, {"b", 3, 0, 0}});
  const RemapResult r = remap_hierarchical(strangers, HierarchyLevel::kIII);
  EXPECT_TRUE(r.empty);
  EXPECT_EQ(r.dropped_dyads, 2u);
  EXPECT_TRUE(r.dataset.dyads.empty());
}

TEST(Hierarchy, RejectsNonNoxiSchema) {
  const Dataset ds = fixture::build(udiva_schema(), 1, {{"a", 2, 0, std::nullopt}});
  EXPECT_THROW(remap_hierarchical(ds, HierarchyLevel::kI), DatasetError);
  EXPECT_EQ(parse_level("II"), HierarchyLevel::kII);
  EXPECT_THROW(parse_level("IV"), std::invalid_argument);
}

double cosine(const std::vector<double>& a, const std::vector<double>& b) {
  double ab = 0.0, aa = 0.0, bb = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    ab += a[k] * b[k];
    aa += a[k] * a[k];
    bb += b[k] * b[k];
  }
  return ab / std::sqrt(aa * bb);
}

// Decoder that knows the generator's bases: the perceiver's face must carry
// the key and the counterpart's audio names the class.
std::optional<std::size_t> decode(const ModalityBundle& perceiver, const ModalityBundle& counterpart,
                                  const SynthBases& bases) {
  if (cosine(perceiver[Modality::kFace], bases.key) < 0.999) return std::nullopt;
  const auto& audio = bases.class_basis[static_cast<std::size_t>(Modality::kAudio)];
  std::size_t best = 0;
  for (std::size_t c = 1; c < audio.size(); ++c)
    if (cosine(counterpart[Modality::kAudio], audio[c]) > cosine(counterpart[Modality::kAudio], audio[best]))
      best = c;
  return best;
}

TEST(Synth, NoiselessDataDecodesPerfectlyWithPlantedBases) {
  SynthConfig cfg;
  cfg.classes = 2;
  cfg.noise = 0.0;
  cfg.dyads_per_class = 6;
  const Dataset ds = synth_generate(cfg, 21);
  const SynthBases bases = synth_bases(cfg, 21);
  std::size_t correct = 0, total = 0;
  for (const ClipRecord* c : ds.clips()) {
    correct += decode(c->person_i, c->person_j, bases) == c->label_i_to_j;
    correct += decode(c->person_j, c->person_i, bases) == c->label_j_to_i;
    total += 2;
  }
  EXPECT_EQ(correct, total);
}

TEST(Synth, SameSeedSameBytesDifferentSeedDifferentData) {
  SynthConfig cfg;
  cfg.dyads_per_class = 3;
  cfg.clips = 5;
  EXPECT_EQ(serialize(synth_generate(cfg, 9)), serialize(synth_generate(cfg, 9)));
  EXPECT_NE(serialize(synth_generate(cfg, 9)), serialize(synth_generate(cfg, 10)));
}

TEST(Synth, DefaultShapeAndAsymmetricFraction) {
  SynthConfig cfg;
  const Dataset ds = synth_generate(cfg, 3);
  EXPECT_EQ(ds.dyads.size(), 96u);
  EXPECT_EQ(ds.clip_total(), 1152u);
  EXPECT_EQ(ds.schema, noxi_schema());
  std::size_t asymmetric = 0;
  for (const auto& [id, dyad] : ds.dyads) asymmetric += dyad.label_i_to_j() != *dyad.label_j_to_i();
  EXPECT_EQ(asymmetric, 48u);
  for (const auto& c : class_counts(ds)) EXPECT_EQ(c.videos, 24u);

  cfg.asymmetric = false;
  for (const auto& [id, dyad] : synth_generate(cfg, 3).dyads) EXPECT_EQ(dyad.label_i_to_j(), *dyad.label_j_to_i());
}

TEST(Synth, UnidirectionalTwoClassUsesUdivaSchema) {
  SynthConfig cfg;
  cfg.classes = 2;
  cfg.bidirectional = false;
  cfg.dyads_per_class = 2;
  const Dataset ds = synth_generate(cfg, 1);
  EXPECT_EQ(ds.schema, udiva_schema());
  for (const ClipRecord* c : ds.clips()) EXPECT_FALSE(c->label_j_to_i.has_value());
}

TEST(Synth, RejectsDegenerateConfigs) {
  SynthConfig cfg;
  cfg.classes = 1;
  EXPECT_THROW(synth_generate(cfg, 0), std::invalid_argument);
  cfg = SynthConfig{};
  cfg.asymmetric_fraction = 1.5;
  EXPECT_THROW(synth_generate(cfg, 0), std::invalid_argument);
}

Dataset labelled(const std::vector<std::size_t>& per_class) {
  std::vector<fixture::DyadSpec> specs;
  std::size_t k = 0;
  for (std::size_t c = 0; c < per_class.size(); ++c)
    for (std::size_t n = 0; n < per_class[c]; ++n, ++k) specs.push_back({fixture::id("f", k), 2, c, c});
  return fixture::build(noxi_schema(), 1, specs);
}

TEST(Folds, NineDyadsThreeFolds) {
  const Dataset ds = labelled({3, 3, 3, 0});
  const auto folds = kfold_split(ds, 3, 4);
  ASSERT_EQ(folds.size(), 3u);
  std::set<std::string> seen;
  for (const FoldSplit& f : folds) {
    EXPECT_EQ(f.test.size(), 3u);
    EXPECT_EQ(f.train.size(), 6u);
    for (const auto& id : f.test) EXPECT_TRUE(seen.insert(id).second) << id;
    for (const auto& id : f.train) EXPECT_EQ(std::count(f.test.begin(), f.test.end(), id), 0);
  }
  EXPECT_EQ(seen.size(), 9u);
}

TEST(Folds, StratifiedWithinOneDyadOfGlobalProportion) {
  const std::vector<std::size_t> per_class = {36, 30, 6, 12};
  const Dataset ds = labelled(per_class);
  for (std::uint64_t seed : {0u, 1u, 2u}) {
    const auto folds = kfold_split(ds, 3, seed);
    for (const FoldSplit& f : folds) {
      std::vector<double> count(4, 0.0);
      for (const auto& id : f.test) count[ds.dyads.at(id).label_i_to_j()] += 1.0;
      for (std::size_t c = 0; c < 4; ++c) EXPECT_LE(std::abs(count[c] - per_class[c] / 3.0), 1.0);
    }
    EXPECT_EQ(folds[0].test, kfold_split(ds, 3, seed)[0].test);
  }
}

TEST(Folds, RejectsSmallKAndThinClasses) {
  const Dataset ds = labelled({3, 2, 3, 3});
  EXPECT_THROW(kfold_split(ds, 1, 0), std::invalid_argument);
  try {
    kfold_split(ds, 3, 0);
    FAIL() << "expected the thin class to be rejected";
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("'Acq'"), std::string::npos) << e.what();
  }
}

TEST(Folds, HoldoutKeepsEveryClassInTraining) {
  const Dataset ds = labelled({5, 5, 2, 3});
  std::vector<std::string> ids;
  for (const auto& [id, d] : ds.dyads) ids.push_back(id);
  const FoldSplit h = stratified_holdout(ds, ids, 0.2, 7);
  EXPECT_EQ(h.train.size() + h.test.size(), ids.size());
  std::set<std::size_t> train_classes;
  for (const auto& id : h.train) train_classes.insert(ds.dyads.at(id).label_i_to_j());
  EXPECT_EQ(train_classes.size(), 4u);
  EXPECT_EQ(h.test.size(), 4u);  // one per class: round(0.2 * {5, 5, 2, 3}) floored up to 1
}

}  // namespace
}  // namespace asyrec
