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

#include <cmath>
#include <limits>
#include <random>

#include "artimit/common/error.hpp"
#include "artimit/common/phones.hpp"
#include "artimit/dsp/frontend.hpp"
#include "artimit/graph/grad_check.hpp"
#include "artimit/graph/ops.hpp"
#include "artimit/store/formats.hpp"
#include "artimit/store/text_formats.hpp"
#include "artimit/synth/corpus.hpp"
#include "artimit/synth/net.hpp"
#include "artimit/synth/tract.hpp"
#include "doctest.h"
#include "unit/test_util.hpp"

namespace artimit::synth {
namespace {

Matrix Source(std::size_t t, double pp, double pc) {
  Matrix s(t, 2);
  for (std::size_t i = 0; i < t; ++i) {
    s(i, 0) = pp;
    s(i, 1) = pc;
  }
  return s;
}

// Nearest band by mel distance between the filterbank's band centers and f.
std::size_t NearestBand(double hz) {
  std::size_t best = 0;
  for (std::size_t m = 1; m < dsp::kNumMels; ++m)
    if (std::abs(dsp::HzToMel(dsp::MelBandCenterHz(m)) - dsp::HzToMel(hz)) <
        std::abs(dsp::HzToMel(dsp::MelBandCenterHz(best)) - dsp::HzToMel(hz)))
      best = m;
  return best;
}

std::vector<std::size_t> LocalMaxima(std::span<const double> row) {
  std::vector<std::size_t> out;
  for (std::size_t m = 1; m + 1 < row.size(); ++m)
    if (row[m] > row[m - 1] && row[m] >= row[m + 1]) out.push_back(m);
  return out;
}

TEST_CASE("closing the lips drives every band to the log floor") {
  Matrix a(1, 6);
  a(0, 5) = -40.0;
  Matrix out = TractForward(a, Source(1, 160, 0.9), TractConfig{});
  for (double v : out.values()) CHECK(v == doctest::Approx(std::log(1e-10)).epsilon(1e-9));
}

TEST_CASE("neutral frame peaks at the bands of 500/1500/2500/3500 Hz") {
  const double hz[4] = {500.0, 1500.0, 2500.0, 3500.0};
  // Each resonance alone peaks at the band nearest its frequency.
  for (std::size_t k = 0; k < 4; ++k) {
    TractConfig cfg;
    for (std::size_t j = 0; j < 4; ++j)
      if (j != k) cfg.peak_gain[j] = 0.0;
    const Matrix out = TractForward(Matrix(1, 6), Source(1, 160, 0.0), cfg);
    const std::vector<std::size_t> peaks = LocalMaxima(out.row(0));
    REQUIRE(peaks.size() == 1);
    CHECK(peaks[0] == NearestBand(hz[k]));
  }
  // Together, tails of neighbours may move a maximum by at most one band.
  const Matrix out = TractForward(Matrix(1, 6), Source(1, 160, 0.0), TractConfig{});
  const std::vector<std::size_t> peaks = LocalMaxima(out.row(0));
  REQUIRE(peaks.size() == 4);
  for (std::size_t k = 0; k < 4; ++k)
    CHECK(std::abs(static_cast<int>(peaks[k]) - static_cast<int>(NearestBand(hz[k]))) <= 1);
}

TEST_CASE("tract_forward passes grad_check over 20 seeds") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::mt19937_64 rng(seed);
    ParameterSet p;
    p.Add("a", testing::RandomMatrix(4, 6, rng, -1.5, 1.5));
    Matrix src(4, 2);
    std::uniform_real_distribution<double> pp(80.0, 320.0), pc(0.0, 1.0);
    for (std::size_t t = 0; t < 4; ++t) {
      src(t, 0) = t == 2 ? 0.0 : pp(rng);
      src(t, 1) = pc(rng);
    }
    TractConfig cfg;
    cfg.speaker_scale = 0.85 + 0.3 * pc(rng);
    const Matrix w = testing::RandomMatrix(4, 80, rng);
    auto f = [&](Tape& tape, ParameterSet& ps) {
      return Sum(Mul(TractForward(tape.Param(ps.at("a")), src, cfg), tape.ConstantRef(w)));
    };
    GradCheckReport r = GradCheck(f, p, 1e-6, 1e-5);
    CHECK_MESSAGE(r.passed, "seed " << seed << " worst " << r.worst);
  }
}

TEST_CASE("clamped formants stop responding to their parameter") {
  Matrix a(1, 6);
  a(0, 0) = -3.0;  // F1 = 500 - 600 < 100 Hz
  Tape tape;
  Var av = tape.Constant(a);
  ParameterSet p;
  p.Add("a", a);
  Var out = TractForward(tape.Param(p.at("a")), Source(1, 0, 0), TractConfig{});
  tape.Backward(Sum(out));
  CHECK(p.at("a").grad(0, 0) == 0.0);
  (void)av;
}

TEST_CASE("out-of-range inputs are domain errors") {
  auto kind = [](const Matrix& a, const Matrix& s, TractConfig cfg = {}) {
    try {
      TractForward(a, s, cfg);
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::kUsage;
  };
  CHECK(kind(Matrix(1, 6), Source(1, 50, 0.5)) == ErrorKind::kDomain);
  CHECK(kind(Matrix(1, 6), Source(1, 400, 0.5)) == ErrorKind::kDomain);
  CHECK(kind(Matrix(1, 6), Source(1, 160, 1.5)) == ErrorKind::kDomain);
  CHECK(kind(Matrix(1, 6), Source(1, 160, -0.1)) == ErrorKind::kDomain);
  Matrix nan(1, 6);
  nan(0, 2) = std::numeric_limits<double>::quiet_NaN();
  CHECK(kind(nan, Source(1, 160, 0.5)) == ErrorKind::kDomain);
  TractConfig big;
  big.speaker_scale = 1.3;
  CHECK(kind(Matrix(1, 6), Source(1, 160, 0.5), big) == ErrorKind::kConfig);
  CHECK(kind(Matrix(1, 5), Source(1, 160, 0.5)) == ErrorKind::kDimension);
}

TEST_CASE("output is monotone in lip height") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    Matrix a = testing::RandomMatrix(1, 6, rng, -2, 2);
    Matrix b = a;
    b(0, 5) += 0.5;
    Matrix src = Source(1, 200, 0.6);
    Matrix lo = TractForward(a, src, {}), hi = TractForward(b, src, {});
    for (std::size_t m = 0; m < 80; ++m) CHECK(hi(0, m) >= lo(0, m));
  }
}

TEST_CASE("speaker scale: equal iff scales equal, peaks move up with scale") {
  std::mt19937_64 rng(4);
  Matrix a = testing::RandomMatrix(1, 6, rng, -1, 1);
  Matrix src = Source(1, 0, 0);
  TractConfig c1, c2;
  c2.speaker_scale = 1.0;
  CHECK(TractForward(a, src, c1) == TractForward(a, src, c2));
  c2.speaker_scale = 1.05;
  CHECK_FALSE(TractForward(a, src, c1) == TractForward(a, src, c2));
  std::vector<std::size_t> prev;
  for (double s = 0.85; s <= 1.2001; s += 0.05) {
    TractConfig c;
    c.speaker_scale = s;
    const std::vector<std::size_t> peaks = LocalMaxima(TractForward(Matrix(1, 6), src, c).row(0));
    REQUIRE(peaks.size() == 4);
    if (!prev.empty())
      for (std::size_t k = 0; k < 4; ++k) CHECK(peaks[k] >= prev[k]);
    prev = peaks;
  }
  CHECK(prev[0] > LocalMaxima(TractForward(Matrix(1, 6), src, TractConfig{}).row(0))[0]);
}

TEST_CASE("VTLN warp maps a scaled speaker back onto the reference peaks") {
  Matrix src = Source(1, 0, 0);
  const Matrix ref = TractForward(Matrix(1, 6), src, TractConfig{});
  CHECK(MaxAbsDiff(VtlnWarp(ref, 1.0), ref) < 1e-9);
  for (double s : {0.85, 1.1, 1.2}) {
    TractConfig c;
    c.speaker_scale = s;
    const Matrix warped = VtlnWarp(TractForward(Matrix(1, 6), src, c), s);
    const std::vector<std::size_t> p = LocalMaxima(warped.row(0));
    const std::vector<std::size_t> q = LocalMaxima(ref.row(0));
    REQUIRE(p.size() == q.size());
    for (std::size_t k = 0; k < p.size(); ++k)
      CHECK(std::abs(static_cast<int>(p[k]) - static_cast<int>(q[k])) <= 1);
  }
}

TEST_CASE("corpus generation is deterministic and labels tile utterances") {
  CorpusConfig cfg;
  cfg.items_per_speaker = 40;
  const auto c1 = GenerateCorpus(cfg, 7);
  const auto c2 = GenerateCorpus(cfg, 7);
  const auto c3 = GenerateCorpus(cfg, 8);
  REQUIRE(c1.size() == 40);
  bool differs = false;
  for (std::size_t i = 0; i < c1.size(); ++i) {
    CHECK(c1[i].artic == c2[i].artic);
    CHECK(c1[i].log_mel == c2[i].log_mel);
    CHECK(c1[i].source == c2[i].source);
    differs = differs || !(c1[i].artic.SameShape(c3[i].artic) && c1[i].artic == c3[i].artic);
  }
  CHECK(differs);
  for (const SyntheticUtterance& u : c1) {
    REQUIRE(u.labels.size() == 3);
    CHECK(u.labels.front().start == 0);
    CHECK(u.labels.back().end == u.num_frames());
    for (std::size_t k = 1; k < u.labels.size(); ++k)
      CHECK(u.labels[k].start == u.labels[k - 1].end);
    CHECK(u.labels[0].label == u.vowel);
    CHECK(u.labels[1].label == u.consonant);
    CHECK(u.labels[2].label == u.vowel);
    CHECK(u.speaker_scale == 1.0);
    CHECK(u.log_mel == TractForward(u.artic, u.source, TractConfig{}));
    CHECK(u.labels[1].end - u.labels[1].start >= 4);
    for (std::size_t t = 0; t < u.num_frames(); ++t) {
      CHECK(u.source(t, 0) >= 120.0 * 0.95);
      CHECK(u.source(t, 0) <= 240.0 * 1.05);
    }
  }
}

TEST_CASE("corpus splits, pairs and speaker scales") {
  CorpusConfig cfg;
  cfg.speakers = 3;
  cfg.items_per_speaker = 30;
  const auto c = GenerateCorpus(cfg, 1);
  REQUIRE(c.size() == 90);
  std::map<std::string, int> splits;
  for (const auto& u : c) {
    ++splits[u.split];
    CHECK(u.speaker_scale >= 0.85);
    CHECK(u.speaker_scale <= 1.2);
  }
  CHECK(splits["train"] == 72);
  CHECK(splits["valid"] == 9);
  CHECK(splits["test"] == 9);
  CHECK(c[0].speaker_scale != c[30].speaker_scale);
  std::set<std::string> pairs;
  for (std::size_t i = 0; i < 18; ++i) pairs.insert(c[i].vowel + c[i].consonant);
  CHECK(pairs.size() == 18);
  // Consonant steady state: the vowel PC is 0.9, fricatives 0.3.
  for (const auto& u : c) {
    const auto& mid = u.labels[1];
    const double pc = u.source((mid.start + mid.end) / 2, 1);
    if (FindPhone(u.consonant).manner == Manner::kFricative) CHECK(pc < 0.5);
    else CHECK(pc > 0.6);
  }
}

TEST_CASE("corpus config validation") {
  CorpusConfig empty;
  empty.consonants.clear();
  CHECK_THROWS_AS(GenerateCorpus(empty, 1), Error);
  CorpusConfig wrong;
  wrong.vowels = {"p"};
  CHECK_THROWS_AS(GenerateCorpus(wrong, 1), Error);
  CorpusConfig scale;
  scale.scale_max = 1.4;
  CHECK_THROWS_AS(GenerateCorpus(scale, 1), Error);
}

TEST_CASE("written corpus re-reads with identical boundaries and frames") {
  testing::TempDir dir;
  CorpusConfig cfg;
  cfg.items_per_speaker = 12;
  const auto c = GenerateCorpus(cfg, 2);
  WriteCorpus(dir.path(), c);
  const store::Manifest m = store::ReadManifest(dir / "manifest.tsv");
  REQUIRE(m.entries.size() == c.size());
  const std::set<std::string> inventory = InventorySymbols();
  for (std::size_t i = 0; i < c.size(); ++i) {
    const store::ManifestEntry& e = m.entries[i];
    CHECK(e.id == c[i].id);
    CHECK(e.split == c[i].split);
    const auto labels =
        SegmentsToLabels(store::ReadAlignments(e.path("alignment"), &inventory));
    REQUIRE(labels.size() == c[i].labels.size());
    for (std::size_t k = 0; k < labels.size(); ++k) {
      CHECK(labels[k].start == c[i].labels[k].start);
      CHECK(labels[k].end == c[i].labels[k].end);
      CHECK(labels[k].label == c[i].labels[k].label);
    }
    CHECK(store::ReadFeatures(e.path("trajectory")).frames ==
          store::RoundToF32(c[i].artic));
    CHECK(store::ReadFeatures(e.path("logmel")).kind == dsp::FeatureKind::kLogMel80);
  }
}

TEST_CASE("synthesizer net: shapes, zero-epoch baseline and checkpoint") {
  CorpusConfig cfg;
  cfg.items_per_speaker = 6;
  const auto c = GenerateCorpus(cfg, 3);
  SynthTrainData d;
  std::vector<Matrix> a, s, m;
  for (const auto& u : c) {
    a.push_back(u.artic);
    s.push_back(u.source);
    m.push_back(u.log_mel);
  }
  d = {VStack(a), VStack(s), VStack(m)};
  SynthTrainConfig tc;
  tc.epochs = 0;
  SynthesizerNet net = TrainSynthesizer(d, d, tc);
  SynthesizerNet fresh = InitSynthesizerNet(0);
  // Zero epochs: initial weights, fitted input statistics, baseline loss.
  for (const auto& [name, p] : fresh.params)
    if (name.rfind("input.", 0) != 0) CHECK(net.params.at(name).value == p.value);
  CHECK(net.train_loss == doctest::Approx(SynthNetMse(net, d)));
  CHECK(net.train_loss > 1.0);
  CHECK(net.params.ScalarCount() ==
        8 * 512 + 512 + 3 * (512 * 512 + 512) + 512 * 80 + 80 + 16);

  tc.epochs = 3;
  tc.batch_size = 16;
  SynthesizerNet trained = TrainSynthesizer(d, d, tc);
  CHECK(trained.train_loss < net.train_loss);

  const store::Bytes bytes = store::EncodeCheckpoint(SynthNetToCheckpoint(trained));
  SynthesizerNet back =
      SynthNetFromCheckpoint(store::DecodeCheckpoint({bytes.data(), bytes.size()}, "n"));
  CHECK(MaxAbsDiff(SynthNetPredict(back, d.artic, d.source),
                   SynthNetPredict(trained, d.artic, d.source)) < 1e-3);

  SynthTrainData bad = d;
  bad.log_mel(0, 0) = std::numeric_limits<double>::quiet_NaN();
  try {
    TrainSynthesizer(bad, d, tc);
    FAIL("expected divergence");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kDivergence);
    CHECK(std::string(e.what()).find("step") != std::string::npos);
  }
}

TEST_CASE("gradients flow through the frozen synthesizer net") {
  SynthesizerNet net = InitSynthesizerNet(5);
  net.params.SetTrainable(false);
  std::mt19937_64 rng(6);
  ParameterSet p;
  p.Add("a", testing::RandomMatrix(3, 6, rng));
  const Matrix src = Source(3, 150, 0.5);
  const Matrix w = testing::RandomMatrix(3, 80, rng);
  auto f = [&](Tape& tape, ParameterSet& ps) {
    return Sum(Mul(SynthNetForward(tape, net, tape.Param(ps.at("a")), src),
                   tape.ConstantRef(w)));
  };
  const std::uint64_t before = net.params.Checksum();
  GradCheckReport r = GradCheck(f, p, 1e-6, 1e-5);
  CHECK_MESSAGE(r.passed, "worst " << r.worst);
  CHECK(net.params.Checksum() == before);
}

}  // namespace
}  // namespace artimit::synth
