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

#include "asyrec/report.hpp"

#include <nlohmann/json.hpp>
#include <sstream>

#include "asyrec/io.hpp"

namespace asyrec {

namespace {

using nlohmann::json;

json header_json(const RunHeader& h) {
  json config = json::object();
  for (const auto& [k, v] : h.config) config[k] = v;
  return {{"command", h.command}, {"seed", h.seed}, {"config_hash", h.config_hash}, {"config", config},
          {"format", "asyrec-report v1"}};
}

json direction_json(const DirectionMetrics& d) {
  json recall = json::array();
  for (const auto& r : d.recall) recall.push_back(r ? json(*r) : json(nullptr));
  json matrix = json::array();
  for (std::size_t t = 0; t < d.confusion.classes(); ++t) {
    json row = json::array();
    for (std::size_t p = 0; p < d.confusion.classes(); ++p) row.push_back(d.confusion.at(t, p));
    matrix.push_back(row);
  }
  return {{"direction", d.name}, {"uar", d.uar}, {"recall", recall}, {"confusion", matrix},
          {"undefined_classes", d.undefined_classes}};
}

json metrics_body(const MetricsReport& r) {
  json clip = json::array(), video = json::array();
  for (const auto& d : r.clip) clip.push_back(direction_json(d));
  for (const auto& d : r.video) video.push_back(direction_json(d));
  return {{"schema", r.schema}, {"classes", r.classes}, {"uar", r.uar}, {"video_uar", r.video_uar},
          {"clip", clip}, {"video", video}};
}

json summary_json(const Summary& s) { return {{"mean", s.mean}, {"std", s.std}}; }

}  // namespace

std::string metrics_json(const MetricsReport& report, const RunHeader& header) {
  json doc = {{"run", header_json(header)}, {"metrics", metrics_body(report)}};
  return doc.dump(2) + "\n";
}

std::string cross_validation_json(const CrossValidationReport& report, const RunHeader& header) {
  json folds = json::array();
  for (const auto& f : report.folds) {
    folds.push_back({{"fold", f.fold},
                     {"seed", f.seed},
                     {"train_dyads", f.split.train.size() - f.validation.size()},
                     {"validation_dyads", f.validation.size()},
                     {"test_dyads", f.split.test.size()},
                     {"best_epoch", f.training.best_epoch},
                     {"epochs_run", f.training.history.size()},
                     {"best_val_uar", f.training.best_val_uar},
                     {"test", metrics_body(f.test)}});
  }
  json directions = json::array();
  for (const auto& s : report.direction_uar) directions.push_back(summary_json(s));
  json doc = {{"run", header_json(header)},
              {"folds", folds},
              {"uar", summary_json(report.uar)},
              {"video_uar", summary_json(report.video_uar)},
              {"direction_uar", directions}};
  return doc.dump(2) + "\n";
}

std::string confusion_csv(const MetricsReport& report) {
  std::ostringstream out;
  out << "direction,level,truth,predicted,count\n";
  auto emit = [&](const std::vector<DirectionMetrics>& dirs, const char* level) {
    for (const auto& d : dirs)
      for (std::size_t t = 0; t < d.confusion.classes(); ++t)
        for (std::size_t p = 0; p < d.confusion.classes(); ++p)
          out << d.name << ',' << level << ',' << report.classes.at(t) << ',' << report.classes.at(p) << ','
              << d.confusion.at(t, p) << '\n';
  };
  emit(report.clip, "clip");
  emit(report.video, "video");
  return out.str();
}

namespace {

void history_rows(std::ostringstream& out, const TrainResult& result, std::size_t fold) {
  for (const auto& e : result.history) {
    out << fold << ',' << e.epoch << ',' << io::format_significant(e.train_loss, 10) << ','
        << io::format_significant(e.val_loss, 10) << ',' << io::format_significant(e.val_uar, 10) << ','
        << (e.improved ? 1 : 0) << '\n';
  }
}

}  // namespace

std::string history_csv(const CrossValidationReport& report) {
  std::ostringstream out;
  out << "fold,epoch,train_loss,val_loss,val_uar,improved\n";
  for (const auto& f : report.folds) history_rows(out, f.training, f.fold);
  return out.str();
}

std::string history_csv(const TrainResult& result, std::size_t fold) {
  std::ostringstream out;
  out << "fold,epoch,train_loss,val_loss,val_uar,improved\n";
  history_rows(out, result, fold);
  return out.str();
}

std::string csv_header_comment(const RunHeader& header) {
  std::ostringstream out;
  out << "# asyrec-report v1\n# command: " << header.command << "\n# seed: " << header.seed
      << "\n# config_hash: " << header.config_hash << '\n';
  return out.str();
}

}  // namespace asyrec
