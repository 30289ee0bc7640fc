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
#include <vector>

#include "asyrec/dataset.hpp"

namespace asyrec {

struct SynthConfig {
  std::size_t dim = 16;
  std::size_t classes = 4;
  std::size_t dyads_per_class = 24;
  std::size_t clips = 12;
  double noise = 0.05;
  bool bidirectional = true;
  bool asymmetric = true;
  double asymmetric_fraction = 0.5;
  double background = 1.0;  // scale of the per-clip nuisance on body and text
};

// Generator-side ground truth, exposed so tests can decode with it.
struct SynthBases {
  // class_basis[m][c]: unit-RMS basis of class c for modality m.
  std::vector<std::vector<std::vector<double>>> class_basis;
  // Key planted into the perceiving person's face, entries +-1.
  std::vector<double> key;
  // Amplitude modulation frequency per class (1, 2, 3, 4, 1, ...).
  std::vector<double> frequency;
};

SynthBases synth_bases(const SynthConfig& cfg, std::uint64_t seed);

// Deterministic surrogate data set. For direction i->j with label c the
// class signal lives only in the pairing of i's face (the key) with j's
// audio (basis c of the audio modality); j->i mirrors this with j's face
// and i's audio. Body and text carry per-dyad nuisance vectors. Every
// feature of person k is scaled by 1 + 0.5 sin(2 pi f t / n) with f the
// frequency of k's perceived class, then Gaussian noise is added.
// C = 4 bidirectional data uses the Str/Acq/Fri/Vgf schema and C = 2
// unidirectional data the Kno/Unk schema.
Dataset synth_generate(const SynthConfig& cfg, std::uint64_t seed);

}  // namespace asyrec
