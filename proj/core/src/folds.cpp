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

#include "asyrec/folds.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace asyrec {

namespace {

std::vector<std::vector<std::string>> by_class(const Dataset& dataset, const std::vector<std::string>& ids) {
  std::vector<std::vector<std::string>> groups(dataset.schema.size());
  for (const std::string& id : ids) groups.at(dataset.dyads.at(id).label_i_to_j()).push_back(id);
  return groups;
}

std::vector<std::string> all_ids(const Dataset& dataset) {
  std::vector<std::string> ids;
  for (const auto& [id, dyad] : dataset.dyads) ids.push_back(id);
  return ids;
}

}  // namespace

std::vector<FoldSplit> kfold_split(const Dataset& dataset, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw std::invalid_argument("kfold_split needs K >= 2");
  auto groups = by_class(dataset, all_ids(dataset));
  for (std::size_t c = 0; c < groups.size(); ++c) {
    if (!groups[c].empty() && groups[c].size() < k) {
      throw std::invalid_argument("class '" + dataset.schema.classes[c] + "' has " +
                                  std::to_string(groups[c].size()) + " dyads, fewer than K=" + std::to_string(k));
    }
  }

  std::mt19937_64 rng(seed);
  std::vector<std::vector<std::string>> test(k);
  std::size_t deal = 0;
  for (auto& group : groups) {
    std::shuffle(group.begin(), group.end(), rng);
    for (const std::string& id : group) test[deal++ % k].push_back(id);
  }

  std::vector<FoldSplit> folds(k);
  for (std::size_t f = 0; f < k; ++f) {
    folds[f].test = test[f];
    for (std::size_t g = 0; g < k; ++g)
      if (g != f) folds[f].train.insert(folds[f].train.end(), test[g].begin(), test[g].end());
    std::sort(folds[f].train.begin(), folds[f].train.end());
    std::sort(folds[f].test.begin(), folds[f].test.end());
  }
  return folds;
}

FoldSplit stratified_holdout(const Dataset& dataset, const std::vector<std::string>& dyads, double fraction,
                             std::uint64_t seed) {
  if (fraction < 0.0 || fraction >= 1.0) throw std::invalid_argument("holdout fraction must lie in [0, 1)");
  auto groups = by_class(dataset, dyads);
  std::mt19937_64 rng(seed);
  FoldSplit out;
  for (auto& group : groups) {
    std::shuffle(group.begin(), group.end(), rng);
    auto held = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(group.size())));
    if (fraction > 0.0 && held == 0 && group.size() >= 2) held = 1;
    for (std::size_t i = 0; i < group.size(); ++i) (i < held ? out.test : out.train).push_back(group[i]);
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

}  // namespace asyrec
