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

#include "asyrec/trainer.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>

#include "asyrec/io.hpp"
#include "asyrec/ops.hpp"
#include "asyrec/optimizer.hpp"

namespace asyrec {

void TrainConfig::validate() const {
  if (batch_size == 0) throw std::invalid_argument("batch_size must be positive");
  if (!(learning_rate > 0.0)) throw std::invalid_argument("learning_rate must be positive");
  if (!(weight_decay >= 0.0)) throw std::invalid_argument("weight_decay must be non-negative");
  if (max_epochs == 0) throw std::invalid_argument("max_epochs must be positive");
  if (!(validation_fraction > 0.0 && validation_fraction < 1.0))
    throw std::invalid_argument("validation_fraction must lie in (0, 1)");
}

std::vector<std::vector<ClipPrediction>> predict_dataset(const AsyrecParams& params, const Dataset& dataset,
                                                         const ForwardOptions& options) {
  if (params.schema != dataset.schema) {
    throw std::invalid_argument("model schema " + params.schema.name + " does not match dataset schema " +
                                dataset.schema.name);
  }
  if (params.dim != dataset.feature_dim) {
    throw std::invalid_argument("model dimension " + std::to_string(params.dim) + " does not match dataset d=" +
                                std::to_string(dataset.feature_dim));
  }
  std::vector<std::vector<ClipPrediction>> out;
  out.reserve(dataset.dyads.size());
  for (const auto& [id, dyad] : dataset.dyads) {
    auto& preds = out.emplace_back();
    preds.reserve(dyad.clips.size());
    for (const ClipRecord& clip : dyad.clips) preds.push_back(forward(clip, params, options));
  }
  return out;
}

MetricsReport metrics_from_predictions(const Dataset& dataset,
                                       const std::vector<std::vector<ClipPrediction>>& predictions) {
  if (predictions.size() != dataset.dyads.size()) throw std::invalid_argument("prediction count does not match dyads");
  const std::size_t classes = dataset.schema.size();
  const bool both = dataset.schema.bidirectional;
  ConfusionMatrix clip_i(classes), clip_j(classes), video_i(classes), video_j(classes);
  std::size_t k = 0;
  for (const auto& [id, dyad] : dataset.dyads) {
    const auto& preds = predictions[k++];
    if (preds.size() != dyad.clips.size()) throw std::invalid_argument("clip prediction count mismatch for " + id);
    for (const ClipPrediction& p : preds) {
      if (p.p_i_to_j.size() != classes || p.p_j_to_i.has_value() != both || (both && p.p_j_to_i->size() != classes))
        throw std::invalid_argument("prediction shape does not match schema " + dataset.schema.name);
    }
    for (std::size_t t = 0; t < preds.size(); ++t) {
      const ClipRecord& clip = dyad.clips[t];
      clip_i.add(clip.label_i_to_j, argmax(preds[t].p_i_to_j));
      if (both) clip_j.add(*clip.label_j_to_i, argmax(*preds[t].p_j_to_i));
    }
    const VideoPrediction video = predict_video(preds);
    video_i.add(dyad.label_i_to_j(), argmax(video.p_i_to_j));
    if (both) video_j.add(*dyad.label_j_to_i(), argmax(*video.p_j_to_i));
  }

  MetricsReport report;
  report.schema = dataset.schema.name;
  report.classes = dataset.schema.classes;
  report.clip.push_back(DirectionMetrics::from_confusion("I", std::move(clip_i), dataset.schema));
  report.video.push_back(DirectionMetrics::from_confusion("I", std::move(video_i), dataset.schema));
  if (both) {
    report.clip.push_back(DirectionMetrics::from_confusion("J", std::move(clip_j), dataset.schema));
    report.video.push_back(DirectionMetrics::from_confusion("J", std::move(video_j), dataset.schema));
  }
  auto mean_uar = [](const std::vector<DirectionMetrics>& dirs) {
    double s = 0.0;
    for (const auto& d : dirs) s += d.uar;
    return s / static_cast<double>(dirs.size());
  };
  report.uar = mean_uar(report.clip);
  report.video_uar = mean_uar(report.video);
  return report;
}

MetricsReport evaluate(const AsyrecParams& params, const Dataset& test_set, const ForwardOptions& options) {
  return metrics_from_predictions(test_set, predict_dataset(params, test_set, options));
}

namespace {

double mean_loss(const Dataset& dataset, const std::vector<std::vector<ClipPrediction>>& predictions) {
  double total = 0.0;
  std::size_t n = 0, k = 0;
  for (const auto& [id, dyad] : dataset.dyads) {
    const auto& preds = predictions[k++];
    for (std::size_t t = 0; t < preds.size(); ++t, ++n) total += loss(preds[t], dyad.clips[t]);
  }
  return n == 0 ? 0.0 : total / static_cast<double>(n);
}

}  // namespace

TrainResult train(const Dataset& train_set, const Dataset& val_set, const TrainConfig& cfg) {
  cfg.validate();
  if (train_set.dyads.empty()) throw std::invalid_argument("training split is empty");
  if (val_set.dyads.empty()) throw std::invalid_argument("validation split is empty");
  if (train_set.schema != val_set.schema || train_set.feature_dim != val_set.feature_dim)
    throw std::invalid_argument("training and validation splits disagree on schema or feature dimension");

  AsyrecParams params = AsyrecParams::init(train_set.feature_dim, train_set.schema, cfg.seed);
  params.standardizer = Standardizer::fit(train_set);

  OptimizerState opt;
  opt.hyper.learning_rate = cfg.learning_rate;
  opt.hyper.weight_decay = cfg.weight_decay;

  std::vector<const ClipRecord*> order = train_set.clips();
  std::mt19937_64 rng(cfg.seed ^ 0x7a1b5eedULL);

  TrainResult result;
  result.params = params;
  bool have_best = false;
  std::size_t stale = 0;

  for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t stop = std::min(order.size(), start + cfg.batch_size);
      Tape tape;
      std::vector<Var> leaves;
      std::vector<Tensor*> targets;
      for (auto& [name, t] : params.named_parameters()) {
        leaves.push_back(tape.leaf(*t, true));
        targets.push_back(t);
      }
      const AsyrecVars vars = bind_from(params, leaves);
      Var total = clip_loss(forward_on_tape(tape, params, vars, *order[start]), *order[start]);
      for (std::size_t s = start + 1; s < stop; ++s)
        total = add(total, clip_loss(forward_on_tape(tape, params, vars, *order[s]), *order[s]));
      epoch_loss += total.value().item();
      const Var batch_loss = scale(total, 1.0 / static_cast<double>(stop - start));
      tape.backward(batch_loss);
      std::vector<const Tensor*> grads;
      for (const Var& v : leaves) grads.push_back(&v.grad());
      optimizer_step(opt, targets, grads);
    }

    const auto preds = predict_dataset(params, val_set);
    const MetricsReport val = metrics_from_predictions(val_set, preds);
    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = epoch_loss / static_cast<double>(order.size());
    rec.val_loss = mean_loss(val_set, preds);
    rec.val_uar = val.uar;
    rec.improved = !have_best || val.uar > result.best_val_uar;
    result.history.push_back(rec);
    if (rec.improved) {
      have_best = true;
      result.params = params;
      result.best_epoch = epoch;
      result.best_val_uar = val.uar;
      stale = 0;
    } else {
      ++stale;
    }
    if (stale >= cfg.patience) break;
  }
  return result;
}

std::size_t worker_count_from_env(std::size_t fallback) {
  const char* raw = std::getenv("ASYREC_THREADS");
  if (raw == nullptr || *raw == '\0') return std::max<std::size_t>(fallback, 1);
  try {
    return std::max<std::size_t>(io::parse_size(raw), 1);
  } catch (const std::invalid_argument&) {
    return std::max<std::size_t>(fallback, 1);
  }
}

CrossValidationReport cross_validate(const Dataset& dataset, std::size_t k, const TrainConfig& cfg,
                                     std::size_t threads) {
  cfg.validate();
  const std::vector<FoldSplit> splits = kfold_split(dataset, k, cfg.seed);
  CrossValidationReport report;
  report.folds.resize(splits.size());

  auto run_fold = [&](std::size_t f) {
    FoldResult& out = report.folds[f];
    out.fold = f;
    out.seed = cfg.seed + f;
    out.split = splits[f];
    const FoldSplit inner = stratified_holdout(dataset, splits[f].train, cfg.validation_fraction, out.seed);
    out.validation = inner.test;
    TrainConfig fold_cfg = cfg;
    fold_cfg.seed = out.seed;
    out.training = train(dataset.subset(inner.train), dataset.subset(inner.test), fold_cfg);
    out.test = evaluate(out.training.params, dataset.subset(splits[f].test));
  };

  const std::size_t workers = std::clamp<std::size_t>(threads, 1, splits.size());
  if (workers == 1) {
    for (std::size_t f = 0; f < splits.size(); ++f) run_fold(f);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t f = next++; f < splits.size(); f = next++) {
          try {
            run_fold(f);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
  }

  std::vector<double> uars, video_uars;
  const std::size_t directions = report.folds.front().test.clip.size();
  std::vector<std::vector<double>> per_direction(directions);
  for (const auto& fold : report.folds) {
    uars.push_back(fold.test.uar);
    video_uars.push_back(fold.test.video_uar);
    for (std::size_t d = 0; d < directions; ++d) per_direction[d].push_back(fold.test.clip[d].uar);
  }
  report.uar = summarize(uars);
  report.video_uar = summarize(video_uars);
  for (const auto& values : per_direction) report.direction_uar.push_back(summarize(values));
  return report;
}

}  // namespace asyrec
