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

// Acceptance run: prints one PASS/FAIL line per criterion and exits non-zero
// if any criterion fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "asyrec/ablation.hpp"
#include "asyrec/checkpoint.hpp"
#include "asyrec/io.hpp"
#include "asyrec/metrics.hpp"
#include "asyrec/synth.hpp"
#include "asyrec/trainer.hpp"
#include "commands.hpp"
#include "support/checks.hpp"
#include "support/fixtures.hpp"

namespace {

using namespace asyrec;
using Clock = std::chrono::steady_clock;

struct Verdict {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Verdict gradient_correctness() {
  const auto t0 = Clock::now();
  const GradCheckResult r = checks::composed_loss_grad_check(8, 2024);
  const double secs = seconds_since(t0);
  return {r.max_rel_error <= 1e-4 && secs < 60.0,
          fmt("max rel error %.3g (<= 1e-4) in %.1fs (< 60s)", r.max_rel_error, secs)};
}

Verdict oracle_equivalence() {
  double worst = 0.0;
  std::string which;
  for (const auto& [eq, err] : checks::oracle_equivalence(100, 2025)) {
    if (err >= worst) {
      worst = err;
      which = eq;
    }
  }
  return {worst <= 1e-10, fmt("100 instances, worst abs error %.3g at %s (<= 1e-10)", worst, which.c_str())};
}

Verdict normalization_invariants() {
  const checks::PropertyReport rep = checks::normalization_properties(1000, 2026);
  return {rep.cases == 1000 && rep.total() == 0,
          fmt("%zu cases; violations node %zu edge %zu adjacency %zu phi %zu softmax %zu", rep.cases,
              rep.node_weight_violations, rep.edge_column_violations, rep.adjacency_violations,
              rep.phi_range_violations, rep.softmax_violations)};
}

Verdict analytic_anchors() {
  bool ok = true;
  double ce_err = 0.0;
  for (std::size_t n : {2u, 4u, 9u}) {
    Tape tape;
    ce_err = std::max(ce_err, std::abs(cross_entropy(tape.constant(Tensor({n}, -1.25)), 0).value().item() -
                                       std::log(static_cast<double>(n))));
  }
  ok = ok && ce_err <= 1e-15;

  std::mt19937_64 rng(5);
  std::normal_distribution<double> g(0.0, 1.0);
  bool uniform = true;
  for (const LabelSchema& schema : {noxi_schema(), udiva_schema()}) {
    const AsyrecParams p = AsyrecParams::init(8, schema, 3);
    ClipRecord c;
    c.clip_count = 7;
    c.clip_index = 4;
    if (schema.bidirectional) c.label_j_to_i = 0;
    for (ModalityBundle* b : {&c.person_i, &c.person_j})
      for (auto& f : b->features) {
        f.resize(8);
        for (double& x : f) x = g(rng);
      }
    const ClipPrediction pred = forward(c, p);
    const double u = 1.0 / static_cast<double>(schema.size());
    for (double v : pred.p_i_to_j) uniform = uniform && v == u;
    if (pred.p_j_to_i)
      for (double v : *pred.p_j_to_i) uniform = uniform && v == u;
  }
  ok = ok && uniform;

  const std::vector<double> noxi = {0.496, 0.619, 0.384, 0.528}, udiva = {0.655, 0.533};
  const double a = 100.0 * uar(noxi), b = 100.0 * uar(udiva);
  ok = ok && std::abs(a - 50.7) <= 0.05 && std::abs(b - 59.4) <= 0.05;
  return {ok, fmt("CE(uniform) err %.2g; zero-head uniform %s; UAR %.3f%% (50.7) and %.1f%% (59.4)", ce_err,
                  uniform ? "yes" : "no", a, b)};
}

// One synthetic seed: cross-validated model plus the ablation measurements
// consumed by criteria 5 to 7.
struct SeedRun {
  std::uint64_t seed = 0;
  double seconds = 0.0;
  std::size_t max_epochs_used = 0;
  double uar_full = 0.0;
  double uar_no_node = 0.0;
  double uar_no_edge = 0.0;
  std::map<std::string, std::vector<double>> curves;  // ratio-ordered dF per masking family
  double df_fa = 0.0;
  double df_bt = 0.0;
};

SeedRun run_seed(std::uint64_t seed) {
  SeedRun out;
  out.seed = seed;
  SynthConfig sc;  // d=16, 4 classes, 24 dyads/class, n=12, sigma=0.05, asymmetric
  const Dataset ds = synth_generate(sc, seed);
  TrainConfig tc;
  tc.max_epochs = 50;
  tc.learning_rate = 1e-2;
  tc.seed = seed;
  const auto t0 = Clock::now();
  const CrossValidationReport cv = cross_validate(ds, 3, tc, worker_count_from_env(1));
  out.seconds = seconds_since(t0);
  out.uar_full = cv.uar.mean;
  for (const FoldResult& f : cv.folds) out.max_epochs_used = std::max(out.max_epochs_used, f.training.history.size());

  std::vector<AblationFold> folds;
  for (const FoldResult& f : cv.folds) folds.push_back({f.training.params, ds.subset(f.split.test)});
  out.uar_no_node = run_mask(folds, MaskSpec::no_node_attention()).uar;
  out.uar_no_edge = run_mask(folds, MaskSpec::no_edge_attention()).uar;

  for (Parity p : {Parity::kOdd, Parity::kEven}) {
    auto& curve = out.curves["temporal_parity/" + std::string(parity_name(p))];
    for (int k = 0; k <= 9; ++k) curve.push_back(run_mask(folds, MaskSpec::temporal_parity(p, k / 10.0, seed)).delta_f);
  }
  for (Region r : {Region::kBeginning, Region::kMiddle, Region::kEnd}) {
    auto& curve = out.curves["segment/" + std::string(region_name(r))];
    for (int k = 0; k <= 3; ++k) curve.push_back(run_mask(folds, MaskSpec::segment(r, k / 10.0)).delta_f);
  }
  out.df_fa = run_mask(folds, MaskSpec::modality_edge({Modality::kFace, Modality::kAudio})).delta_f;
  out.df_bt = run_mask(folds, MaskSpec::modality_edge({Modality::kBody, Modality::kText})).delta_f;
  return out;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

Verdict learning_check(const SeedRun& run) {
  return {run.uar_full >= 0.90 && run.max_epochs_used <= 50 && run.seconds < 600.0,
          fmt("seed %llu: 3-fold mean test UAR %.4f (>= 0.90), %zu epochs max, %.1fs (< 600s)",
              static_cast<unsigned long long>(run.seed), run.uar_full, run.max_epochs_used, run.seconds)};
}

Verdict ablation_direction(const std::vector<SeedRun>& runs) {
  std::vector<double> full, node, edge;
  for (const SeedRun& r : runs) {
    full.push_back(r.uar_full);
    node.push_back(r.uar_no_node);
    edge.push_back(r.uar_no_edge);
  }
  const double mf = median(full), mn = median(node), me = median(edge);
  return {runs.size() >= 5 && me < mn && mn < mf,
          fmt("%zu seeds, median UAR no-edge %.4f < no-node %.4f < full %.4f", runs.size(), me, mn, mf)};
}

Verdict masking_trends(const std::vector<SeedRun>& runs) {
  bool ok = runs.size() >= 5;
  std::ostringstream detail;
  detail << runs.size() << " seeds;";
  for (const auto& [family, first] : runs.front().curves) {
    std::vector<double> mean(first.size(), 0.0);
    for (const SeedRun& r : runs)
      for (std::size_t k = 0; k < mean.size(); ++k) mean[k] += r.curves.at(family)[k] / static_cast<double>(runs.size());
    bool monotone = true;
    for (std::size_t k = 1; k < mean.size(); ++k) monotone = monotone && mean[k] >= mean[k - 1];
    ok = ok && monotone;
    detail << ' ' << family << (monotone ? " non-decreasing" : " NOT monotone") << " ["
           << io::format_significant(mean.front(), 3) << ".." << io::format_significant(mean.back(), 3) << "];";
  }
  double fa = 0.0, bt = 0.0;
  for (const SeedRun& r : runs) {
    fa += r.df_fa / static_cast<double>(runs.size());
    bt += r.df_bt / static_cast<double>(runs.size());
  }
  ok = ok && fa > bt;
  detail << " dF(F-A) " << io::format_significant(fa, 4) << " > dF(B-T) " << io::format_significant(bt, 4);
  return {ok, detail.str()};
}

std::map<std::string, std::string> read_tree(const std::filesystem::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : std::filesystem::recursive_directory_iterator(root))
    if (e.is_regular_file()) files[std::filesystem::relative(e.path(), root).string()] = io::read_file(e.path());
  return files;
}

// Runs every command twice in the same place with the same configuration.
Verdict determinism() {
  namespace fs = std::filesystem;
  const fs::path base = fs::temp_directory_path() / "asyrec_acceptance_determinism";
  const std::string root = base.string();
  const std::string data = root + "/data.tsv";
  const std::vector<std::vector<std::string>> script = {
      {"gen-data", "--dim", "4", "--dyads-per-class", "3", "--clips", "6", "--seed", "11", "--out", root},
      {"train", "-d", data, "--max-epochs", "3", "--lr", "1e-2", "--seed", "11", "--out", root + "/run"},
      {"eval", "-d", data, "-c", root + "/run/fold0.ckpt", "--out", root + "/eval"},
      {"ablate", "-d", data, "--run", root + "/run", "--seed", "11", "--out", root + "/abl"},
      {"report", "--run", root + "/run", "--ablation", root + "/abl/ablation.csv", "--out", root + "/rep"}};
  std::ostringstream sink;
  bool commands_ok = true;
  std::vector<std::map<std::string, std::string>> trees;
  for (int pass = 0; pass < 2; ++pass) {
    fs::remove_all(base);
    for (const auto& args : script) commands_ok = commands_ok && cli::run(args, sink, sink) == 0;
    trees.push_back(read_tree(base));
  }
  const bool identical = trees[0] == trees[1];

  const AsyrecParams p = load_checkpoint(base / "run/fold0.ckpt");
  std::ostringstream once, twice;
  write_checkpoint(once, p);
  std::istringstream in(once.str());
  const AsyrecParams q = read_checkpoint(in);
  write_checkpoint(twice, q);
  bool tensors_equal = true;
  auto pa = p.named_parameters();
  auto qa = q.named_parameters();
  for (std::size_t k = 0; k < pa.size(); ++k) tensors_equal = tensors_equal && *pa[k].second == *qa[k].second;
  const bool round_trip = tensors_equal && p.standardizer == q.standardizer && once.str() == twice.str() &&
                          once.str() == io::read_file(base / "run/fold0.ckpt");
  fs::remove_all(base);
  return {commands_ok && identical && round_trip,
          fmt("5 commands %s; %zu output files byte-identical across reruns: %s; checkpoint bit-exact: %s",
              commands_ok ? "exit 0" : "FAILED", trees[0].size(), identical ? "yes" : "no",
              round_trip ? "yes" : "no")};
}

Verdict hierarchical_protocol() {
  const Dataset source = fixture::hierarchy_fixture();
  bool ok = true;
  std::ostringstream detail;
  detail << source.dyads.size() << " fixture dyads;";
  for (const auto& [level, name] : {std::pair{HierarchyLevel::kI, "I"}, std::pair{HierarchyLevel::kII, "II"},
                                    std::pair{HierarchyLevel::kIII, "III"}}) {
    const RemapResult r = remap_hierarchical(source, level);
    const fixture::HierarchyTally want = fixture::expected_tally(source, name);
    const bool match = fixture::observed_tally(r) == want;
    ok = ok && match;
    detail << " level " << name << ": " << want.retained << " kept/" << want.dropped << " dropped "
           << (match ? "match" : "MISMATCH") << ';';
  }
  const Dataset strangers = fixture::build(noxi_schema(), 1, {{"s", 2, 0, 0}});
  const bool flagged = remap_hierarchical(strangers, HierarchyLevel::kIII).empty;
  ok = ok && flagged;
  detail << " Str-only level III flagged empty: " << (flagged ? "yes" : "no");
  return {ok, detail.str()};
}

}  // namespace

int main() {
  int failures = 0;
  auto report = [&](int id, const char* name, const std::function<Verdict()>& check) {
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    std::printf("criterion %d [%s]: %s - %s\n", id, name, v.pass ? "PASS" : "FAIL", v.detail.c_str());
    std::fflush(stdout);
    failures += v.pass ? 0 : 1;
  };

  report(1, "gradient correctness", gradient_correctness);
  report(2, "oracle equivalence", oracle_equivalence);
  report(3, "normalization invariants", normalization_invariants);
  report(4, "analytic anchors", analytic_anchors);

  std::vector<SeedRun> runs;
  std::string seed_error;
  try {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) runs.push_back(run_seed(seed));
  } catch (const std::exception& e) {
    seed_error = e.what();
  }
  auto with_runs = [&](auto check) {
    return [&, check] {
      if (!seed_error.empty()) throw std::runtime_error(seed_error);
      return check();
    };
  };
  report(5, "learning check", with_runs([&] { return learning_check(runs.front()); }));
  report(6, "ablation direction", with_runs([&] { return ablation_direction(runs); }));
  report(7, "masking trends", with_runs([&] { return masking_trends(runs); }));
  report(8, "determinism", determinism);
  report(9, "hierarchical protocol", hierarchical_protocol);
  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
