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

#include "artimit/synth/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "artimit/artic/gpca.hpp"
#include "artimit/common/error.hpp"
#include "artimit/common/phones.hpp"
#include "artimit/dsp/frontend.hpp"
#include "artimit/store/formats.hpp"

namespace artimit::synth {
namespace {

constexpr double kFrameSeconds = 1.0 / dsp::kFrameRate;

double SourceCoefficient(const Phone& p) {
  switch (p.manner) {
    case Manner::kVowel: return 0.9;
    case Manner::kStop: return 0.7;
    case Manner::kFricative: return 0.3;
    case Manner::kOther: return 0.5;
  }
  return 0.5;
}

// Piecewise-constant targets joined by raised-cosine transitions.
struct Schedule {
  std::array<const Phone*, 3> phones{};
  // Start of each steady state and end of each steady state.
  std::array<double, 3> steady_start{};
  std::array<double, 3> steady_end{};

  // Interpolation weight pair (index, next index, u) at time t.
  template <typename Get>
  double At(double t, Get get) const {
    if (t <= steady_end[0]) return get(*phones[0]);
    for (std::size_t k = 0; k < 2; ++k) {
      if (t < steady_start[k + 1]) {
        const double u = (t - steady_end[k]) / (steady_start[k + 1] - steady_end[k]);
        const double w = 0.5 * (1.0 - std::cos(std::numbers::pi * u));
        return (1.0 - w) * get(*phones[k]) + w * get(*phones[k + 1]);
      }
      if (t <= steady_end[k + 1]) return get(*phones[k + 1]);
    }
    return get(*phones[2]);
  }
};

std::string ItemId(std::size_t speaker, std::size_t item) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "spk%02zu_%04zu", speaker, item);
  return buf;
}

}  // namespace

void ValidateCorpusConfig(const CorpusConfig& cfg) {
  if (cfg.vowels.empty() || cfg.consonants.empty())
    Fail(ErrorKind::kConfig, "corpus inventory needs at least one vowel and one consonant");
  for (const std::string& v : cfg.vowels)
    if (FindPhone(v).manner != Manner::kVowel)
      Fail(ErrorKind::kConfig, "'" + v + "' is not a vowel");
  for (const std::string& c : cfg.consonants)
    if (FindPhone(c).manner == Manner::kVowel)
      Fail(ErrorKind::kConfig, "'" + c + "' is not a consonant");
  if (cfg.speakers == 0 || cfg.items_per_speaker == 0)
    Fail(ErrorKind::kConfig, "corpus needs at least one speaker and one item");
  if (!(cfg.steady_min_s > 0.0 && cfg.steady_min_s <= cfg.steady_max_s) ||
      !(cfg.transition_s >= 0.0))
    Fail(ErrorKind::kConfig, "invalid corpus durations");
  if (!(cfg.jitter >= 0.0)) Fail(ErrorKind::kConfig, "jitter must be nonnegative");
  const double lo = cfg.pp_min * (1.0 - cfg.pp_drift);
  const double hi = cfg.pp_max * (1.0 + cfg.pp_drift);
  if (!(cfg.pp_min <= cfg.pp_max) || lo < static_cast<double>(dsp::kMinPitchLag) ||
      hi > static_cast<double>(dsp::kMaxPitchLag))
    Fail(ErrorKind::kConfig, "pitch-period range must stay inside [80, 320]");
  if (!(cfg.scale_min <= cfg.scale_max) || cfg.scale_min < kMinSpeakerScale ||
      cfg.scale_max > kMaxSpeakerScale)
    Fail(ErrorKind::kConfig, "speaker scale range must lie in [0.8, 1.25]");
  if (!(cfg.train_fraction >= 0.0 && cfg.valid_fraction >= 0.0 &&
        cfg.train_fraction + cfg.valid_fraction <= 1.0))
    Fail(ErrorKind::kConfig, "split fractions must be nonnegative and sum to at most 1");
}

std::vector<SyntheticUtterance> GenerateCorpus(const CorpusConfig& cfg,
                                               std::uint64_t seed) {
  ValidateCorpusConfig(cfg);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };

  std::vector<std::pair<const Phone*, const Phone*>> pairs;
  for (const std::string& v : cfg.vowels)
    for (const std::string& c : cfg.consonants)
      pairs.emplace_back(&FindPhone(v), &FindPhone(c));

  std::vector<SyntheticUtterance> corpus;
  for (std::size_t s = 0; s < cfg.speakers; ++s) {
    TractConfig tract;
    const double drawn = uniform(cfg.scale_min, cfg.scale_max);
    tract.speaker_scale = cfg.speakers == 1 ? 1.0 : drawn;
    const std::string speaker = "spk" + std::string(s < 10 ? "0" : "") + std::to_string(s);

    // Split by a seeded permutation of the speaker's items.
    std::vector<std::size_t> order(cfg.items_per_speaker);
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng);
    const auto n = static_cast<double>(order.size());
    const auto n_train = static_cast<std::size_t>(std::round(cfg.train_fraction * n));
    const auto n_valid = static_cast<std::size_t>(std::round(cfg.valid_fraction * n));
    std::vector<std::string> split(order.size(), "test");
    for (std::size_t r = 0; r < order.size(); ++r)
      split[order[r]] = r < n_train ? "train" : (r < n_train + n_valid ? "valid" : "test");

    for (std::size_t i = 0; i < cfg.items_per_speaker; ++i) {
      const auto [vowel, consonant] = pairs[i % pairs.size()];
      Schedule sched;
      sched.phones = {vowel, consonant, vowel};
      double t = 0.0;
      for (std::size_t k = 0; k < 3; ++k) {
        sched.steady_start[k] = t;
        t += uniform(cfg.steady_min_s, cfg.steady_max_s);
        sched.steady_end[k] = t;
        if (k < 2) t += cfg.transition_s;
      }
      const double total = t;
      const auto frames = static_cast<std::size_t>(std::round(total / kFrameSeconds));
      const double pp0 = uniform(cfg.pp_min, cfg.pp_max);
      const double drift = uniform(-cfg.pp_drift, cfg.pp_drift);

      SyntheticUtterance u;
      u.id = ItemId(s, i);
      u.speaker = speaker;
      u.speaker_scale = tract.speaker_scale;
      u.split = split[i];
      u.vowel = vowel->symbol;
      u.consonant = consonant->symbol;
      u.artic = Matrix(frames, artic::kNumParams);
      u.source = Matrix(frames, 2);
      // Labels switch at the midpoint of each transition.
      const std::array<double, 2> boundary = {
          0.5 * (sched.steady_end[0] + sched.steady_start[1]),
          0.5 * (sched.steady_end[1] + sched.steady_start[2])};
      std::vector<std::size_t> phone_of(frames);
      for (std::size_t f = 0; f < frames; ++f) {
        const double tf = (static_cast<double>(f) + 0.5) * kFrameSeconds;
        for (std::size_t j = 0; j < artic::kNumParams; ++j)
          u.artic(f, j) = sched.At(tf, [j](const Phone& p) { return p.target[j]; }) +
                          cfg.jitter * gauss(rng);
        u.source(f, 0) = pp0 * (1.0 + drift * (2.0 * tf / total - 1.0));
        u.source(f, 1) = sched.At(tf, SourceCoefficient);
        phone_of[f] = tf < boundary[0] ? 0 : (tf < boundary[1] ? 1 : 2);
      }
      for (std::size_t f = 0; f < frames; ++f) {
        if (u.labels.empty() || f == 0 || phone_of[f] != phone_of[f - 1])
          u.labels.push_back({f, f + 1, sched.phones[phone_of[f]]->symbol});
        else
          u.labels.back().end = f + 1;
      }
      u.log_mel = TractForward(u.artic, u.source, tract);
      corpus.push_back(std::move(u));
    }
  }
  return corpus;
}

std::vector<store::AlignmentSegment> LabelsToSegments(
    const std::vector<LabelSpan>& labels, double frame_rate) {
  std::vector<store::AlignmentSegment> out;
  for (const LabelSpan& l : labels)
    out.push_back({static_cast<double>(l.start) / frame_rate,
                   static_cast<double>(l.end) / frame_rate, l.label});
  return out;
}

std::vector<LabelSpan> SegmentsToLabels(
    const std::vector<store::AlignmentSegment>& segments, double frame_rate) {
  std::vector<LabelSpan> out;
  for (const store::AlignmentSegment& s : segments) {
    const auto start = static_cast<std::size_t>(std::llround(s.start_s * frame_rate));
    const auto end = static_cast<std::size_t>(std::llround(s.end_s * frame_rate));
    if (end > start) out.push_back({start, end, s.label});
  }
  return out;
}

void WriteCorpus(const std::filesystem::path& dir,
                 const std::vector<SyntheticUtterance>& corpus, bool vtln) {
  std::filesystem::create_directories(dir);
  store::Manifest manifest;
  manifest.base_dir = dir;
  for (const SyntheticUtterance& u : corpus) {
    auto feature = [](const Matrix& m, dsp::FeatureKind kind) {
      return dsp::FeatureSequence{m, dsp::kFrameRate, kind};
    };
    store::ManifestEntry e{u.id, u.speaker, {}, u.split};
    e.paths["logmel"] = dir / (u.id + ".logmel.ftr");
    e.paths["features"] = dir / (u.id + ".features.ftr");
    e.paths["trajectory"] = dir / (u.id + ".traj.ftr");
    e.paths["source"] = dir / (u.id + ".src.ftr");
    e.paths["alignment"] = dir / (u.id + ".align.tsv");
    store::WriteFeatures(e.paths["logmel"], feature(u.log_mel, dsp::FeatureKind::kLogMel80));
    store::WriteFeatures(
        e.paths["features"],
        feature(vtln ? VtlnWarp(u.log_mel, u.speaker_scale) : u.log_mel,
                dsp::FeatureKind::kLogMel80));
    store::WriteFeatures(e.paths["trajectory"], feature(u.artic, dsp::FeatureKind::kExternal));
    store::WriteFeatures(e.paths["source"], feature(u.source, dsp::FeatureKind::kExternal));
    store::WriteAlignments(e.paths["alignment"], LabelsToSegments(u.labels));
    manifest.entries.push_back(std::move(e));
  }
  store::WriteManifest(dir / "manifest.tsv", manifest);
}

}  // namespace artimit::synth
