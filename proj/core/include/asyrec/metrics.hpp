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

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "asyrec/dataset.hpp"

namespace asyrec {

// Rows are true classes, columns predicted classes.
class ConfusionMatrix {
 public:
  ConfusionMatrix() = default;
  explicit ConfusionMatrix(std::size_t classes) : classes_(classes), counts_(classes * classes, 0) {}

  void add(std::size_t truth, std::size_t predicted, std::size_t count = 1);
  std::size_t at(std::size_t truth, std::size_t predicted) const { return counts_.at(truth * classes_ + predicted); }
  std::size_t classes() const { return classes_; }
  std::size_t total() const;
  std::size_t row_total(std::size_t truth) const;

  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;

 private:
  std::size_t classes_ = 0;
  std::vector<std::size_t> counts_;
};

// TP / (TP + FN) per class; nullopt for a class with no true instances.
std::vector<std::optional<double>> recall_per_class(const ConfusionMatrix& cm);

// Mean over the defined recalls. Rejects input with none defined.
double uar(std::span<const std::optional<double>> recalls);
double uar(std::span<const double> recalls);

struct DirectionMetrics {
  std::string name;  // "I" (i->j) or "J" (j->i)
  ConfusionMatrix confusion;
  std::vector<std::optional<double>> recall;
  double uar = 0.0;
  std::vector<std::string> undefined_classes;

  static DirectionMetrics from_confusion(std::string name, ConfusionMatrix cm, const LabelSchema& schema);
};

struct MetricsReport {
  std::string schema;
  std::vector<std::string> classes;
  std::vector<DirectionMetrics> clip;   // one entry per label direction
  std::vector<DirectionMetrics> video;  // same, on video-level readouts
  double uar = 0.0;                     // mean of the clip-level direction UARs
  double video_uar = 0.0;
};

struct Summary {
  double mean = 0.0;
  double std = 0.0;  // population standard deviation
};

Summary summarize(std::span<const double> values);

}  // namespace asyrec
