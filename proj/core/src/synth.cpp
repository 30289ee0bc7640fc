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

#include "asyrec/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

namespace asyrec {

namespace {

std::vector<double> gaussian(std::mt19937_64& rng, std::size_t n, double scale) {
  std::normal_distribution<double> dist(0.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = scale * dist(rng);
  return v;
}

// Rescaled so the root-mean-square entry is 1.
std::vector<double> unit_rms(std::vector<double> v) {
  double ss = 0.0;
  for (double x : v) ss += x * x;
  const double rms = std::sqrt(ss / static_cast<double>(v.size()));
  for (double& x : v) x /= rms;
  return v;
}

std::string dyad_name(std::size_t index) {
  std::string digits = std::to_string(index);
  return "d" + std::string(digits.size() < 4 ? 4 - digits.size() : 0, '0') + digits;
}

void validate(const SynthConfig& cfg) {
  if (cfg.classes < 2) throw std::invalid_argument("synthetic data needs classes >= 2");
  if (cfg.dim == 0) throw std::invalid_argument("synthetic data needs dim >= 1");
  if (cfg.clips == 0) throw std::invalid_argument("synthetic data needs clips >= 1");
  if (cfg.dyads_per_class == 0) throw std::invalid_argument("synthetic data needs dyads-per-class >= 1");
  if (cfg.noise < 0.0) throw std::invalid_argument("synthetic noise must be non-negative");
  if (cfg.asymmetric_fraction < 0.0 || cfg.asymmetric_fraction > 1.0) {
    throw std::invalid_argument("asymmetric fraction must lie in [0, 1]");
  }
}

}  // namespace

SynthBases synth_bases(const SynthConfig& cfg, std::uint64_t seed) {
  validate(cfg);
  std::mt19937_64 rng(seed ^ 0x5eedba5e5ULL);
  SynthBases b;
  b.class_basis.resize(kModalityCount);
  for (auto& per_modality : b.class_basis)
    for (std::size_t c = 0; c < cfg.classes; ++c) per_modality.push_back(unit_rms(gaussian(rng, cfg.dim, 1.0)));
  std::bernoulli_distribution coin(0.5);
  for (std::size_t k = 0; k < cfg.dim; ++k) b.key.push_back(coin(rng) ? 1.0 : -1.0);
  for (std::size_t c = 0; c < cfg.classes; ++c) b.frequency.push_back(static_cast<double>(c % 4 + 1));
  return b;
}

Dataset synth_generate(const SynthConfig& cfg, std::uint64_t seed) {
  validate(cfg);
  const SynthBases bases = synth_bases(cfg, seed);
  std::mt19937_64 rng(seed);

  Dataset ds;
  if (cfg.classes == 4 && cfg.bidirectional) {
    ds.schema = noxi_schema();
  } else if (cfg.classes == 2 && !cfg.bidirectional) {
    ds.schema = udiva_schema();
  } else {
    ds.schema = synth_schema(cfg.classes, cfg.bidirectional);
  }
  ds.feature_dim = cfg.dim;

  // Per class, a fixed number of dyads get a different j->i label.
  const auto flipped_per_class = static_cast<std::size_t>(
      std::llround(cfg.asymmetric_fraction * static_cast<double>(cfg.dyads_per_class)));
  std::uniform_int_distribution<std::size_t> other(1, cfg.classes - 1);

  const double two_pi = 2.0 * std::numbers::pi;
  const double n = static_cast<double>(cfg.clips);
  std::normal_distribution<double> noise(0.0, 1.0);

  const auto& face_key = bases.key;
  const auto& audio_basis = bases.class_basis[static_cast<std::size_t>(Modality::kAudio)];

  std::size_t index = 0;
  for (std::size_t cls = 0; cls < cfg.classes; ++cls) {
    std::vector<std::size_t> order(cfg.dyads_per_class);
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<bool> flip(cfg.dyads_per_class, false);
    if (cfg.asymmetric && cfg.bidirectional) {
      for (std::size_t k = 0; k < flipped_per_class; ++k) flip[order[k]] = true;
    }

    for (std::size_t k = 0; k < cfg.dyads_per_class; ++k, ++index) {
      const std::size_t label_ij = cls;
      const std::size_t label_ji = flip[k] ? (cls + other(rng)) % cfg.classes : cls;

      Dyad dyad;
      dyad.clip_count = cfg.clips;
      for (std::size_t t = 0; t < cfg.clips; ++t) {
        // Nuisance for body and text of both persons, plus the face and
        // audio slots that carry no planted signal in unidirectional data.
        std::array<std::array<std::vector<double>, kModalityCount>, 2> nuisance;
        for (auto& person : nuisance)
          for (auto& slot : person) slot = gaussian(rng, cfg.dim, cfg.background);
        ClipRecord clip;
        clip.dyad_id = dyad_name(index);
        clip.clip_count = cfg.clips;
        clip.clip_index = t;
        clip.label_i_to_j = label_ij;
        if (cfg.bidirectional) clip.label_j_to_i = label_ji;

        const double phase = two_pi * static_cast<double>(t) / n;
        const double amp_i = 1.0 + 0.5 * std::sin(bases.frequency[label_ij] * phase);
        const double amp_j = 1.0 + 0.5 * std::sin(bases.frequency[cfg.bidirectional ? label_ji : label_ij] * phase);

        for (std::size_t person = 0; person < 2; ++person) {
          ModalityBundle& b = person == 0 ? clip.person_i : clip.person_j;
          const double amp = person == 0 ? amp_i : amp_j;
          b[Modality::kBody] = nuisance[person][static_cast<std::size_t>(Modality::kBody)];
          b[Modality::kText] = nuisance[person][static_cast<std::size_t>(Modality::kText)];
          const bool perceives = person == 0 || cfg.bidirectional;
          // The perceiver's face holds the key; the counterpart's audio holds
          // the perceiver's class basis.
          b[Modality::kFace] = perceives ? face_key : nuisance[person][static_cast<std::size_t>(Modality::kFace)];
          const bool counterpart_perceives = person == 1 || cfg.bidirectional;
          if (counterpart_perceives) {
            b[Modality::kAudio] = audio_basis[person == 1 ? label_ij : label_ji];
          } else {
            b[Modality::kAudio] = nuisance[person][static_cast<std::size_t>(Modality::kAudio)];
          }
          for (auto& f : b.features)
            for (double& x : f) x = amp * x + cfg.noise * noise(rng);
        }
        dyad.clips.push_back(std::move(clip));
      }
      ds.dyads.emplace(dyad_name(index), std::move(dyad));
    }
  }
  return ds;
}

}  // namespace asyrec
