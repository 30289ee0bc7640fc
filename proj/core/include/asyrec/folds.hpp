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
#include <string>
#include <vector>

#include "asyrec/dataset.hpp"

namespace asyrec {

struct FoldSplit {
  std::vector<std::string> train;  // dyad ids
  std::vector<std::string> test;
};

// K folds at dyad granularity, stratified by the i->j label: each class's
// dyads are shuffled with `seed` and dealt round-robin, continuing the deal
// position across classes so fold sizes stay within one dyad of each other.
// Rejects K < 2 and any class with fewer than K dyads.
std::vector<FoldSplit> kfold_split(const Dataset& dataset, std::size_t k, std::uint64_t seed);

// Stratified holdout: about `fraction` of each class's dyads (at least one
// when the class has two or more) go to the second list.
FoldSplit stratified_holdout(const Dataset& dataset, const std::vector<std::string>& dyads,
                             double fraction, std::uint64_t seed);

}  // namespace asyrec
