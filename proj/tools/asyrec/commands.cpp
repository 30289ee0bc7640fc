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

#include "commands.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <atomic>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <nlohmann/json.hpp>
#include <sstream>
#include <thread>

#include "asyrec/ablation.hpp"
#include "asyrec/checkpoint.hpp"
#include "asyrec/dataset.hpp"
#include "asyrec/io.hpp"
#include "asyrec/report.hpp"
#include "asyrec/synth.hpp"
#include "asyrec/trainer.hpp"
#include "config.hpp"

namespace asyrec::cli {

namespace fs = std::filesystem;

namespace {

const std::vector<ParamDef> kCommon = {
    {"seed", "0", "random seed"},
    {"out", "asyrec-out", "output directory"},
};

const std::vector<ParamDef> kGenData = {
    {"classes", "4", "number of relationship classes (>= 2)"},
    {"dyads-per-class", "24", "dyads generated per class"},
    {"clips", "12", "clips per dyad"},
    {"dim", "16", "feature dimension per modality"},
    {"noise", "0.05", "additive Gaussian noise sigma"},
    {"bidirectional", "true", "label both directions"},
    {"asymmetric", "true", "give a share of dyads differing directional labels"},
    {"asymmetric-fraction", "0.5", "share of dyads per class with differing labels"},
    {"background", "1.0", "scale of the body/text nuisance vectors"},
    {"output", "", "dataset path (default <out>/data.tsv)"},
};

const std::vector<ParamDef> kTrain = {
    {"data", "", "dataset file"},
    {"kfold", "3", "number of folds; 1 trains a single train/validation split"},
    {"batch-size", "64", "mini-batch size"},
    {"lr", "1e-4", "Adam learning rate"},
    {"weight-decay", "5e-4", "decoupled weight decay"},
    {"max-epochs", "200", "epoch budget"},
    {"patience", "10", "early-stopping patience in epochs"},
    {"val-fraction", "0.2", "share of training dyads held out for validation"},
    {"level", "", "hierarchical relabeling before training: I, II or III"},
};

const std::vector<ParamDef> kEval = {
    {"data", "", "dataset file"},
    {"checkpoint", "", "checkpoint file"},
    {"level", "", "hierarchical relabeling before evaluation: I, II or III"},
};

const std::vector<ParamDef> kAblate = {
    {"data", "", "dataset file"},
    {"run", "", "directory written by the train command"},
    {"kind", "all", "comma-separated mask kinds or 'all'"},
    {"renormalize", "true", "renormalize edge weights after modality-edge masking"},
    {"level", "", "hierarchical relabeling matching the trained run"},
};

const std::vector<ParamDef> kReport = {
    {"run", "", "directory written by the train command"},
    {"ablation", "", "CSV written by the ablate command"},
};

std::vector<ParamDef> with_common(const std::vector<ParamDef>& defs) {
  std::vector<ParamDef> all = kCommon;
  all.insert(all.end(), defs.begin(), defs.end());
  return all;
}

RunHeader make_header(const ResolvedConfig& cfg) {
  RunHeader h;
  h.command = cfg.command();
  h.seed = cfg.u64("seed");
  h.config_hash = cfg.hash();
  for (const auto& [k, v] : cfg.values()) h.config.emplace_back(k, v);
  return h;
}

std::string require_path(const ResolvedConfig& cfg, const std::string& key) {
  const std::string& v = cfg.str(key);
  if (v.empty()) throw ConfigError("--" + key + " is required for " + cfg.command());
  return v;
}

void write_config(const fs::path& out_dir, const ResolvedConfig& cfg) {
  io::write_file_atomic(out_dir / "config.txt", "# config_hash: " + cfg.hash() + "\n" + cfg.text());
}

std::size_t workers() { return worker_count_from_env(1); }

// Runs task(0..n-1) on up to `threads` workers; rethrows the first failure.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& task) {
  threads = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(n, 1));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex m;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          task(i);
        } catch (...) {
          std::lock_guard lock(m);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

std::optional<HierarchyLevel> level_of(const ResolvedConfig& cfg) {
  const std::string& v = cfg.str("level");
  if (v.empty()) return std::nullopt;
  try {
    return parse_level(v);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("--level: ") + e.what());
  }
}

Dataset load_with_level(const std::string& path, std::optional<HierarchyLevel> level, std::ostream& out) {
  Dataset ds = load_dataset(path);
  if (!level) return ds;
  RemapResult r = remap_hierarchical(ds, *level);
  if (r.empty) throw std::runtime_error(std::string("level ") + level_name(*level) + " leaves no dyads");
  out << "level " << level_name(*level) << ": " << r.dataset.dyads.size() << " dyads kept, " << r.dropped_dyads
      << " dropped\n";
  return std::move(r.dataset);
}

// ---------------------------------------------------------------- gen-data

int gen_data(const ResolvedConfig& cfg, std::ostream& out) {
  SynthConfig sc;
  sc.classes = cfg.size("classes");
  sc.dyads_per_class = cfg.size("dyads-per-class");
  sc.clips = cfg.size("clips");
  sc.dim = cfg.size("dim");
  sc.noise = cfg.real("noise");
  sc.bidirectional = cfg.flag("bidirectional");
  sc.asymmetric = cfg.flag("asymmetric");
  sc.asymmetric_fraction = cfg.real("asymmetric-fraction");
  sc.background = cfg.real("background");
  const std::uint64_t seed = cfg.u64("seed");
  if (sc.classes < 2) throw ConfigError("--classes must be at least 2, got " + std::to_string(sc.classes));
  try {
    (void)synth_bases(sc, seed);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }

  const Dataset ds = synth_generate(sc, seed);
  fs::path path = cfg.str("output");
  if (path.empty()) path = fs::path(cfg.str("out")) / "data.tsv";

  std::ostringstream body;
  write_dataset(body, ds);
  std::string text = body.str();
  const std::size_t first_break = text.find('\n') + 1;
  text.insert(first_break, "# seed: " + std::to_string(seed) + "\n# config_hash: " + cfg.hash() + "\n");
  io::write_file_atomic(path, text);
  io::write_file_atomic(fs::path(path.string() + ".config.txt"), "# config_hash: " + cfg.hash() + "\n" + cfg.text());

  out << format_class_table(ds);
  out << "wrote " << ds.dyads.size() << " dyads, " << ds.clip_total() << " clips to " << path.string() << '\n';
  return 0;
}

// ------------------------------------------------------------------- train

TrainConfig train_config(const ResolvedConfig& cfg) {
  TrainConfig tc;
  tc.batch_size = cfg.size("batch-size");
  tc.learning_rate = cfg.real("lr");
  tc.weight_decay = cfg.real("weight-decay");
  tc.max_epochs = cfg.size("max-epochs");
  tc.patience = cfg.size("patience");
  tc.validation_fraction = cfg.real("val-fraction");
  tc.seed = cfg.u64("seed");
  try {
    tc.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return tc;
}

std::string folds_table(const CrossValidationReport& cv) {
  std::ostringstream out;
  out << "#asyrec-folds v1\n";
  for (const auto& f : cv.folds) {
    std::vector<std::string> validation = f.validation;
    std::sort(validation.begin(), validation.end());
    for (const auto& id : f.split.train) {
      const bool val = std::binary_search(validation.begin(), validation.end(), id);
      out << f.fold << '\t' << id << '\t' << (val ? "validation" : "train") << '\n';
    }
    for (const auto& id : f.split.test) out << f.fold << '\t' << id << "\ttest\n";
  }
  return out.str();
}

int train_cmd(const ResolvedConfig& cfg, std::ostream& out) {
  const TrainConfig tc = train_config(cfg);
  const std::size_t k = cfg.size("kfold");
  if (k == 0) throw ConfigError("--kfold must be at least 1");
  const auto level = level_of(cfg);
  const std::string data = require_path(cfg, "data");
  const fs::path out_dir = cfg.str("out");
  const Dataset ds = load_with_level(data, level, out);

  CrossValidationReport cv;
  if (k >= 2) {
    cv = cross_validate(ds, k, tc, workers());
  } else {
    std::vector<std::string> ids;
    for (const auto& [id, dyad] : ds.dyads) ids.push_back(id);
    const FoldSplit inner = stratified_holdout(ds, ids, tc.validation_fraction, tc.seed);
    FoldResult f;
    f.seed = tc.seed;
    f.split = {ids, inner.test};
    f.validation = inner.test;
    f.training = train(ds.subset(inner.train), ds.subset(inner.test), tc);
    f.test = evaluate(f.training.params, ds.subset(inner.test));
    cv.folds.push_back(std::move(f));
    const double u[] = {cv.folds[0].test.uar};
    const double v[] = {cv.folds[0].test.video_uar};
    cv.uar = summarize(u);
    cv.video_uar = summarize(v);
    for (const auto& d : cv.folds[0].test.clip) {
      const double x[] = {d.uar};
      cv.direction_uar.push_back(summarize(x));
    }
  }

  const RunHeader header = make_header(cfg);
  for (const auto& f : cv.folds) save_checkpoint(out_dir / ("fold" + std::to_string(f.fold) + ".ckpt"), f.training.params);
  io::write_file_atomic(out_dir / "folds.tsv", folds_table(cv));
  io::write_file_atomic(out_dir / "history.csv", csv_header_comment(header) + history_csv(cv));
  io::write_file_atomic(out_dir / "report.json", cross_validation_json(cv, header));
  write_config(out_dir, cfg);

  for (const auto& f : cv.folds) {
    out << "fold " << f.fold << ": epochs " << f.training.history.size() << ", best " << f.training.best_epoch
        << ", test UAR " << io::format_fixed(f.test.uar, 4) << ", video UAR " << io::format_fixed(f.test.video_uar, 4)
        << '\n';
  }
  out << "mean UAR " << io::format_fixed(cv.uar.mean, 4) << " +- " << io::format_fixed(cv.uar.std, 4) << '\n';
  return 0;
}

// -------------------------------------------------------------------- eval

int eval_cmd(const ResolvedConfig& cfg, std::ostream& out) {
  const auto level = level_of(cfg);
  const std::string data = require_path(cfg, "data");
  const std::string ckpt = require_path(cfg, "checkpoint");
  const fs::path out_dir = cfg.str("out");
  const AsyrecParams params = load_checkpoint(ckpt);
  const Dataset ds = load_with_level(data, level, out);
  if (ds.schema != params.schema) {
    throw std::runtime_error("checkpoint schema '" + params.schema.name + "' (" +
                             std::to_string(params.schema.size()) + " classes) does not match dataset schema '" +
                             ds.schema.name + "' (" + std::to_string(ds.schema.size()) +
                             " classes); retrain for this level");
  }
  if (ds.feature_dim != params.dim) {
    throw std::runtime_error("checkpoint dimension " + std::to_string(params.dim) +
                             " does not match dataset dimension " + std::to_string(ds.feature_dim));
  }
  const MetricsReport report = evaluate(params, ds);
  const RunHeader header = make_header(cfg);
  io::write_file_atomic(out_dir / "metrics.json", metrics_json(report, header));
  io::write_file_atomic(out_dir / "confusion.csv", csv_header_comment(header) + confusion_csv(report));
  write_config(out_dir, cfg);
  for (const auto& d : report.clip) out << "direction " << d.name << " UAR " << io::format_fixed(d.uar, 4) << '\n';
  out << "UAR " << io::format_fixed(report.uar, 4) << ", video UAR " << io::format_fixed(report.video_uar, 4) << '\n';
  return 0;
}

// ------------------------------------------------------------------ ablate

std::vector<AblationFold> load_run(const fs::path& run_dir, const Dataset& ds) {
  std::map<std::size_t, std::vector<std::string>> test, validation;
  std::istringstream in(io::read_file(run_dir / "folds.tsv"));
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line.front() == '#') continue;
    const auto parts = io::split(line, '\t');
    if (parts.size() != 3) throw std::runtime_error("folds.tsv: malformed line '" + line + "'");
    const std::size_t fold = io::parse_size(parts[0]);
    if (parts[2] == "test") test[fold].emplace_back(parts[1]);
    if (parts[2] == "validation") validation[fold].emplace_back(parts[1]);
  }
  std::vector<AblationFold> folds;
  for (auto& [fold, ids] : test) {
    AblationFold f;
    f.params = load_checkpoint(run_dir / ("fold" + std::to_string(fold) + ".ckpt"));
    f.test = ds.subset(ids);
    if (f.test.schema != f.params.schema) throw std::runtime_error("checkpoint and dataset schemas differ");
    folds.push_back(std::move(f));
  }
  if (folds.empty()) throw std::runtime_error("no test folds listed in " + (run_dir / "folds.tsv").string());
  return folds;
}

int ablate_cmd(const ResolvedConfig& cfg, std::ostream& out) {
  std::vector<MaskKind> kinds;
  const std::string& kind_text = cfg.str("kind");
  if (kind_text == "all") {
    kinds = {MaskKind::kNoNodeAttention, MaskKind::kNoEdgeAttention, MaskKind::kTemporalParity,
             MaskKind::kModalityEdge, MaskKind::kSegment};
  } else {
    for (std::string_view part : io::split(kind_text, ',')) {
      try {
        kinds.push_back(parse_mask_kind(part));
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
      }
    }
  }
  const bool renormalize = cfg.flag("renormalize");
  const auto level = level_of(cfg);
  const std::uint64_t seed = cfg.u64("seed");
  const std::string data = require_path(cfg, "data");
  const std::string run_dir = require_path(cfg, "run");
  const fs::path out_dir = cfg.str("out");

  const Dataset ds = load_with_level(data, level, out);
  const std::vector<AblationFold> folds = load_run(run_dir, ds);

  std::vector<MaskSpec> specs;
  for (MaskKind k : kinds) {
    const auto grid = mask_grid(k, seed);
    specs.insert(specs.end(), grid.begin(), grid.end());
  }
  std::vector<FidelityReport> reports(specs.size());
  parallel_for(specs.size(), workers(), [&](std::size_t i) {
    const MaskSpec& s = specs[i];
    if (s.kind == MaskKind::kModalityEdge && !renormalize) {
      std::vector<ModalityPair> pairs;
      if (s.pair) pairs.push_back(*s.pair);
      reports[i] = mask_modality_edges(folds, pairs, false);
      reports[i].spec = s;
    } else {
      reports[i] = run_mask(folds, s);
    }
  });

  const RunHeader header = make_header(cfg);
  io::write_file_atomic(out_dir / "ablation.csv", csv_header_comment(header) + ablation_csv(reports));
  write_config(out_dir, cfg);
  out << "wrote " << reports.size() << " mask conditions over " << folds.size() << " folds to "
      << (out_dir / "ablation.csv").string() << '\n';
  return 0;
}

// ------------------------------------------------------------------ report

std::string csv_value(const nlohmann::json& v) {
  if (v.is_null()) return "";
  if (v.is_number_float()) return io::format_significant(v.get<double>(), 10);
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

void report_run(const fs::path& run_dir, const fs::path& out_dir, const std::string& comment) {
  const auto doc = nlohmann::json::parse(io::read_file(run_dir / "report.json"));
  std::ostringstream folds, recall;
  folds << comment << "fold,seed,epochs_run,best_epoch,best_val_uar,uar,video_uar\n";
  recall << comment << "fold,level,direction,class,recall\n";
  for (const auto& f : doc.at("folds")) {
    const auto& test = f.at("test");
    folds << f.at("fold").dump() << ',' << f.at("seed").dump() << ',' << f.at("epochs_run").dump() << ','
          << f.at("best_epoch").dump() << ',' << csv_value(f.at("best_val_uar")) << ',' << csv_value(test.at("uar"))
          << ',' << csv_value(test.at("video_uar")) << '\n';
    for (const char* level : {"clip", "video"}) {
      for (const auto& d : test.at(level)) {
        const auto& classes = test.at("classes");
        for (std::size_t c = 0; c < classes.size(); ++c) {
          recall << f.at("fold").dump() << ',' << level << ',' << d.at("direction").get<std::string>() << ','
                 << classes[c].get<std::string>() << ',' << csv_value(d.at("recall")[c]) << '\n';
        }
      }
    }
  }
  io::write_file_atomic(out_dir / "fold_summary.csv", folds.str());
  io::write_file_atomic(out_dir / "recall.csv", recall.str());
}

void report_ablation(const fs::path& csv_path, const fs::path& out_dir, const std::string& comment) {
  std::istringstream in(io::read_file(csv_path));
  std::map<std::string, std::ostringstream> tables;
  tables["table4_attention.csv"] << comment << "variant,dF,uar\n";
  tables["fig6_temporal_parity.csv"] << comment << "parity,ratio,dF,uar\n";
  tables["fig8_modality_edge.csv"] << comment << "pair,dF,uar\n";
  tables["fig9_segment.csv"] << comment << "region,ratio,dF,uar\n";
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty() || line.front() == '#') continue;
    if (!header_seen) {
      if (line != "kind,parity,ratio,pair,region,seed,fold,dF,uar")
        throw std::runtime_error("not an ablation CSV: " + csv_path.string());
      header_seen = true;
      continue;
    }
    const auto c = io::split(line, ',');
    if (c.size() != 9) throw std::runtime_error("ablation CSV: malformed row '" + line + "'");
    if (c[6] != "mean") continue;
    const std::string tail = std::string(c[7]) + "," + std::string(c[8]) + "\n";
    const std::string kind(c[0]);
    if (kind == "no_node_att" || kind == "no_edge_att") {
      tables["table4_attention.csv"] << kind << ',' << tail;
    } else if (kind == "temporal_parity") {
      tables["fig6_temporal_parity.csv"] << c[1] << ',' << c[2] << ',' << tail;
    } else if (kind == "modality_edge") {
      tables["fig8_modality_edge.csv"] << c[3] << ',' << tail;
    } else if (kind == "segment") {
      tables["fig9_segment.csv"] << c[4] << ',' << c[2] << ',' << tail;
    }
  }
  for (auto& [name, table] : tables) io::write_file_atomic(out_dir / name, table.str());
}

int report_cmd(const ResolvedConfig& cfg, std::ostream& out) {
  const std::string& run_dir = cfg.str("run");
  const std::string& ablation = cfg.str("ablation");
  if (run_dir.empty() && ablation.empty()) throw ConfigError("report needs --run and/or --ablation");
  const fs::path out_dir = cfg.str("out");
  const std::string comment = csv_header_comment(make_header(cfg));
  if (!run_dir.empty()) report_run(run_dir, out_dir, comment);
  if (!ablation.empty()) report_ablation(ablation, out_dir, comment);
  write_config(out_dir, cfg);
  out << "wrote plot tables to " << out_dir.string() << '\n';
  return 0;
}

struct Command {
  std::string name;
  std::string help;
  std::vector<ParamDef> defs;
  std::function<int(const ResolvedConfig&, std::ostream&)> body;
  std::map<std::string, char> short_names;
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<Command> commands = {
      {"gen-data", "generate a synthetic dyadic feature set", with_common(kGenData), gen_data, {{"output", 'o'}}},
      {"train", "train with K-fold cross-validation", with_common(kTrain), train_cmd, {{"data", 'd'}}},
      {"eval", "evaluate a checkpoint on a dataset", with_common(kEval), eval_cmd, {{"data", 'd'}, {"checkpoint", 'c'}}},
      {"ablate", "run attention-removal and masking ablations", with_common(kAblate), ablate_cmd, {{"data", 'd'}}},
      {"report", "emit plot-ready tables from run outputs", with_common(kReport), report_cmd, {}},
  };

  CLI::App app{"asyrec: asymmetric dyadic relationship classification"};
  app.require_subcommand(1);
  std::map<std::string, std::map<std::string, std::string>> storage;
  std::map<std::string, std::map<std::string, CLI::Option*>> options;
  std::map<std::string, std::string> config_paths;
  for (const Command& c : commands) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    sub->add_option("--config", config_paths[c.name], "config file (key = value, [command] sections)");
    for (const ParamDef& d : c.defs) {
      std::string flags = "--" + d.key;
      if (auto it = c.short_names.find(d.key); it != c.short_names.end()) flags = std::string("-") + it->second + "," + flags;
      std::string help = d.help;
      if (!d.default_value.empty()) help += " [" + d.default_value + "]";
      options[c.name][d.key] = sub->add_option(flags, storage[c.name][d.key], help);
    }
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  for (const Command& c : commands) {
    if (app.got_subcommand(c.name)) {
      try {
        ValueMap file_values;
        if (!config_paths[c.name].empty()) {
          std::string text;
          try {
            text = io::read_file(config_paths[c.name]);
          } catch (const std::exception& e) {
            throw ConfigError(e.what());
          }
          file_values = parse_config_text(text, c.name);
        }
        ValueMap flag_values;
        for (const auto& [key, opt] : options[c.name])
          if (opt->count() > 0) flag_values[key] = storage[c.name][key];
        const ResolvedConfig cfg(c.name, c.defs, file_values, flag_values);
        (void)cfg.u64("seed");
        return c.body(cfg, out);
      } catch (const ConfigError& e) {
        err << "asyrec " << c.name << ": invalid configuration: " << e.what() << '\n';
        return 2;
      } catch (const std::exception& e) {
        err << "asyrec " << c.name << ": " << e.what() << '\n';
        return 1;
      }
    }
  }
  return 2;
}

}  // namespace asyrec::cli
