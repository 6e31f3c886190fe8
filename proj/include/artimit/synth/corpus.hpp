// Copyright 2026 The artimit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Synthetic VCV corpus rendered through the analytic tract, with ground-truth
// trajectories, source tracks and frame-aligned phone labels.

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "artimit/graph/matrix.hpp"
#include "artimit/store/text_formats.hpp"
#include "artimit/synth/tract.hpp"

namespace artimit::synth {

struct CorpusConfig {
  std::size_t speakers = 1;
  std::size_t items_per_speaker = 300;
  std::vector<std::string> vowels = {"a", "i", "u"};
  std::vector<std::string> consonants = {"p", "f", "t", "s", "k", "x"};
  double steady_min_s = 0.08;
  double steady_max_s = 0.14;
  double transition_s = 0.03;
  double jitter = 0.05;
  double pp_min = 120.0;
  double pp_max = 240.0;
  /// Maximum relative pitch-period change across an utterance.
  double pp_drift = 0.05;
  /// Multi-speaker corpora draw one formant scale per speaker from this
  /// range; a single-speaker corpus uses the reference scale 1.
  double scale_min = 0.85;
  double scale_max = 1.2;
  double train_fraction = 0.8;
  double valid_fraction = 0.1;
};

void ValidateCorpusConfig(const CorpusConfig& cfg);

/// Half-open frame span [start, end).
struct LabelSpan {
  std::size_t start = 0;
  std::size_t end = 0;
  std::string label;
};

struct SyntheticUtterance {
  std::string id;
  std::string speaker;
  double speaker_scale = 1.0;
  std::string split;
  std::string vowel;
  std::string consonant;
  Matrix artic;    // T x 6
  Matrix source;   // T x 2
  Matrix log_mel;  // T x 80
  std::vector<LabelSpan> labels;

  std::size_t num_frames() const { return artic.rows(); }
};

/// Deterministic per seed. Utterances are V-C-V with identical vowels; items
/// cycle through every vowel/consonant pair.
std::vector<SyntheticUtterance> GenerateCorpus(const CorpusConfig& cfg,
                                               std::uint64_t seed);

std::vector<store::AlignmentSegment> LabelsToSegments(
    const std::vector<LabelSpan>& labels, double frame_rate = 50.0);
/// Frame spans from segment times (boundaries rounded to frames).
std::vector<LabelSpan> SegmentsToLabels(
    const std::vector<store::AlignmentSegment>& segments, double frame_rate = 50.0);

/// Writes per-utterance files plus `manifest.tsv` into `dir`. The
/// `features` entry holds the log-mel input; with `vtln` it is warped to
/// the reference speaker, while `logmel` always keeps the raw frames.
void WriteCorpus(const std::filesystem::path& dir,
                 const std::vector<SyntheticUtterance>& corpus, bool vtln = false);

}  // namespace artimit::synth
