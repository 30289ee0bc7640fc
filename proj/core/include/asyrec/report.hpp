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

#include <string>
#include <vector>

#include "asyrec/metrics.hpp"
#include "asyrec/trainer.hpp"

namespace asyrec {

// Key/value lines echoed into every report as the reproducibility record.
struct RunHeader {
  std::string command;
  std::uint64_t seed = 0;
  std::string config_hash;                                   // fnv1a64 of the resolved config text
  std::vector<std::pair<std::string, std::string>> config;  // resolved, in key order
};

// Pretty-printed JSON; object keys sorted, numbers as shortest round-trip.
std::string metrics_json(const MetricsReport& report, const RunHeader& header);
std::string cross_validation_json(const CrossValidationReport& report, const RunHeader& header);

// `direction,level,truth,predicted,count` rows for every matrix in a report.
std::string confusion_csv(const MetricsReport& report);

// `fold,epoch,train_loss,val_loss,val_uar,improved`.
std::string history_csv(const CrossValidationReport& report);
std::string history_csv(const TrainResult& result, std::size_t fold = 0);

// `# key: value` comment lines for CSV outputs.
std::string csv_header_comment(const RunHeader& header);

}  // namespace asyrec
