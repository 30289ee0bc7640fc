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

#include "asyrec/metrics.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace asyrec {

void ConfusionMatrix::add(std::size_t truth, std::size_t predicted, std::size_t count) {
  if (truth >= classes_ || predicted >= classes_) {
    throw std::out_of_range("confusion entry (" + std::to_string(truth) + ", " + std::to_string(predicted) +
                            ") outside " + std::to_string(classes_) + " classes");
  }
  counts_[truth * classes_ + predicted] += count;
}

std::size_t ConfusionMatrix::total() const { return std::accumulate(counts_.begin(), counts_.end(), std::size_t{0}); }

std::size_t ConfusionMatrix::row_total(std::size_t truth) const {
  std::size_t n = 0;
  for (std::size_t p = 0; p < classes_; ++p) n += at(truth, p);
  return n;
}

std::vector<std::optional<double>> recall_per_class(const ConfusionMatrix& cm) {
  std::vector<std::optional<double>> out(cm.classes());
  for (std::size_t c = 0; c < cm.classes(); ++c) {
    const std::size_t row = cm.row_total(c);
    if (row > 0) out[c] = static_cast<double>(cm.at(c, c)) / static_cast<double>(row);
  }
  return out;
}

double uar(std::span<const std::optional<double>> recalls) {
  double total = 0.0;
  std::size_t defined = 0;
  for (const auto& r : recalls) {
    if (!r) continue;
    total += *r;
    ++defined;
  }
  if (defined == 0) throw std::invalid_argument("UAR undefined: no class has true instances");
  return total / static_cast<double>(defined);
}

double uar(std::span<const double> recalls) {
  std::vector<std::optional<double>> wrapped(recalls.begin(), recalls.end());
  return uar(std::span<const std::optional<double>>(wrapped));
}

DirectionMetrics DirectionMetrics::from_confusion(std::string name, ConfusionMatrix cm, const LabelSchema& schema) {
  DirectionMetrics m;
  m.name = std::move(name);
  m.recall = recall_per_class(cm);
  for (std::size_t c = 0; c < m.recall.size(); ++c)
    if (!m.recall[c]) m.undefined_classes.push_back(schema.classes.at(c));
  m.uar = asyrec::uar(std::span<const std::optional<double>>(m.recall));
  m.confusion = std::move(cm);
  return m;
}

Summary summarize(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("summary of an empty sequence");
  const double n = static_cast<double>(values.size());
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= n;
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  return {mean, std::sqrt(var / n)};
}

}  // namespace asyrec
