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
#include "asyrec/folds.hpp"
#include "asyrec/metrics.hpp"
#include "asyrec/model.hpp"

namespace asyrec {

struct TrainConfig {
  std::size_t batch_size = 64;
  double learning_rate = 1e-4;
  double weight_decay = 5e-4;
  std::size_t max_epochs = 200;
  std::size_t patience = 10;  // epochs without validation-UAR improvement
  std::uint64_t seed = 0;
  double validation_fraction = 0.2;

  void validate() const;
};

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  double val_loss = 0.0;
  double val_uar = 0.0;
  bool improved = false;
};

struct TrainResult {
  AsyrecParams params;  // best-validation snapshot
  std::vector<EpochRecord> history;
  std::size_t best_epoch = 0;
  double best_val_uar = 0.0;
};

// Seeded mini-batch Adam on the summed per-direction cross-entropy with
// early stopping on validation UAR. The standardizer is fitted on
// `train_set` before the first epoch.
TrainResult train(const Dataset& train_set, const Dataset& val_set, const TrainConfig& cfg);

// Clip predictions grouped per dyad, in dataset order.
std::vector<std::vector<ClipPrediction>> predict_dataset(const AsyrecParams& params, const Dataset& dataset,
                                                         const ForwardOptions& options = {});

// Clip- and video-level confusion matrices per label direction. Argmax ties
// go to the lowest class index.
MetricsReport evaluate(const AsyrecParams& params, const Dataset& test_set, const ForwardOptions& options = {});
MetricsReport metrics_from_predictions(const Dataset& dataset,
                                       const std::vector<std::vector<ClipPrediction>>& predictions);

struct FoldResult {
  std::size_t fold = 0;
  std::uint64_t seed = 0;
  FoldSplit split;                      // outer train / test dyads
  std::vector<std::string> validation;  // carved from split.train
  TrainResult training;
  MetricsReport test;
};

struct CrossValidationReport {
  std::vector<FoldResult> folds;
  Summary uar;
  Summary video_uar;
  std::vector<Summary> direction_uar;  // per label direction
};

// K-fold protocol: each fold trains on its outer train dyads minus a
// stratified validation share, with seed cfg.seed + fold, and is scored on
// its test dyads. Folds run on up to `threads` workers.
CrossValidationReport cross_validate(const Dataset& dataset, std::size_t k, const TrainConfig& cfg,
                                     std::size_t threads = 1);

// Worker count from ASYREC_THREADS, at least 1.
std::size_t worker_count_from_env(std::size_t fallback = 1);

}  // namespace asyrec
