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
#include <numbers>
#include <random>

#include "artimit/common/error.hpp"
#include "artimit/dsp/frontend.hpp"
#include "artimit/graph/grad_check.hpp"
#include "artimit/graph/ops.hpp"
#include "doctest.h"
#include "unit/dsp_oracle.hpp"
#include "unit/test_util.hpp"

namespace artimit::dsp {
namespace {

Waveform Sine(double hz, std::size_t n, double amp = 1.0) {
  Waveform w;
  w.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    w.samples[i] = amp * std::sin(2.0 * std::numbers::pi * hz *
                                  static_cast<double>(i) / kSampleRate);
  return w;
}

Waveform Noise(std::size_t n, std::uint64_t seed, double amp = 0.5) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(-amp, amp);
  Waveform w;
  w.samples.resize(n);
  for (double& s : w.samples) s = d(rng);
  return w;
}

TEST_CASE("frame layout gives one vector per 20 ms") {
  CHECK(kFrameRate == 50.0);
  CHECK(1000.0 * static_cast<double>(kHop) / kSampleRate == 20.0);
  CHECK(FrameCount(1600) == 4);
  CHECK(FrameCount(639) == 0);
  CHECK(FrameCount(16000) == 49);
}

TEST_CASE("stft of silence is all zeros") {
  Waveform w;
  w.samples.assign(1600, 0.0);
  Matrix s = StftMagnitude(w);
  CHECK(s.rows() == 4);
  CHECK(s.cols() == 321);
  CHECK(s == Matrix(4, 321));
}

TEST_CASE("stft of a 1 kHz sine peaks at bin 40 and matches a direct DFT") {
  Waveform w = Sine(1000.0, 4000);
  Matrix s = StftMagnitude(w);
  Matrix oracle = oracle::DirectStft(w.samples);
  REQUIRE(oracle.SameShape(s));
  CHECK(MaxAbsDiff(s, oracle) < 1e-9);
  for (std::size_t t = 0; t < s.rows(); ++t) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < s.cols(); ++k)
      if (s(t, k) > s(t, best)) best = k;
    CHECK(best == 40);
  }
}

TEST_CASE("stft input validation") {
  Waveform w;
  w.samples.assign(639, 0.1);
  try {
    StftMagnitude(w);
    FAIL("expected input-too-short");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kInputTooShort);
  }
  Waveform other = Sine(100.0, 2000);
  other.sample_rate = 22050;
  try {
    StftMagnitude(other);
    FAIL("expected unsupported format");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kUnsupportedFormat);
  }
}

TEST_CASE("mel projection: zeros, band count and bin-count check") {
  MelSpectrogram m = MelProject(Matrix(3, 321));
  CHECK(m.energies.cols() == 80);
  CHECK(m.energies == Matrix(3, 80));
  CHECK_THROWS_AS(MelProject(Matrix(2, 320)), Error);
}

TEST_CASE("flat unit spectrum gives filter areas of an independent filterbank") {
  const Matrix oracle_bank = oracle::HtkFilterbank();
  MelSpectrogram m = MelProject(Matrix(1, 321, 1.0));
  for (std::size_t b = 0; b < 80; ++b) {
    double area = 0.0;
    for (std::size_t k = 0; k < 321; ++k) area += oracle_bank(k, b);
    CHECK(m.energies(0, b) == doctest::Approx(area).epsilon(1e-12));
  }
  CHECK(MaxAbsDiff(MelFilterbank(), oracle_bank) < 1e-12);
}

TEST_CASE("filterbank rows are nonnegative with contiguous support") {
  const Matrix& fb = MelFilterbank();
  for (std::size_t b = 0; b < 80; ++b) {
    int transitions = 0;
    bool inside = false;
    bool any = false;
    for (std::size_t k = 0; k < 321; ++k) {
      CHECK(fb(k, b) >= 0.0);
      const bool on = fb(k, b) > 0.0;
      any = any || on;
      if (on != inside) ++transitions;
      inside = on;
    }
    CHECK(any);
    CHECK(transitions <= 2);
  }
}

TEST_CASE("doubling the amplitude quadruples every band energy exactly") {
  Waveform w = Noise(6400, 3);
  Waveform w2 = w;
  for (double& s : w2.samples) s *= 2.0;
  MelSpectrogram a = MelProject(StftMagnitude(w));
  MelSpectrogram b = MelProject(StftMagnitude(w2));
  for (std::size_t i = 0; i < a.energies.size(); ++i)
    CHECK(b.energies[i] == doctest::Approx(4.0 * a.energies[i]).epsilon(1e-13));
}

TEST_CASE("delta_features: constant, ramp and brute-force formula") {
  Matrix c(6, 2, 3.5);
  CHECK(DeltaFeatures(c) == Matrix(6, 2));
  Matrix ramp(12, 1);
  for (std::size_t t = 0; t < 12; ++t) ramp(t, 0) = static_cast<double>(t);
  Matrix d = DeltaFeatures(ramp);
  for (std::size_t t = 2; t < 10; ++t) CHECK(d(t, 0) == doctest::Approx(1.0));

  std::mt19937_64 rng(4);
  Matrix x = testing::RandomMatrix(10, 3, rng);
  Matrix got = DeltaFeatures(x, 2);
  for (std::size_t t = 0; t < 10; ++t) {
    for (std::size_t c2 = 0; c2 < 3; ++c2) {
      auto at = [&](int i) {
        return x(static_cast<std::size_t>(std::clamp(i, 0, 9)), c2);
      };
      const int ti = static_cast<int>(t);
      const double expected =
          (1.0 * (at(ti + 1) - at(ti - 1)) + 2.0 * (at(ti + 2) - at(ti - 2))) /
          10.0;
      CHECK(got(t, c2) == doctest::Approx(expected).epsilon(1e-14));
    }
  }
}

TEST_CASE("mfcc39 has 39 dims and matches an independent DSP oracle") {
  Waveform w = Noise(16000, 5, 0.3);
  // Add a tone so the cepstra are not pure noise statistics.
  for (std::size_t i = 0; i < w.samples.size(); ++i)
    w.samples[i] += 0.2 * std::sin(2.0 * std::numbers::pi * 440.0 *
                                   static_cast<double>(i) / kSampleRate);
  FeatureSequence f = Mfcc39(w);
  CHECK(f.dim() == 39);
  CHECK(f.kind == FeatureKind::kMfcc39);
  Matrix oracle = oracle::DirectMfcc39(w.samples);
  REQUIRE(oracle.SameShape(f.frames));
  CHECK(MaxAbsDiff(oracle, f.frames) < 1e-4);
}

TEST_CASE("mfcc39 on a constant signal has zero deltas") {
  Waveform w;
  w.samples.assign(8000, 0.5);
  CepstralStats stats{std::vector<double>(13, 0.0), std::vector<double>(13, 1.0)};
  FeatureSequence f = Mfcc39(w, stats);
  for (std::size_t t = 0; t < f.num_frames(); ++t)
    for (std::size_t c = 13; c < 39; ++c) CHECK(f.frames(t, c) == 0.0);
  // Fitting on that signal alone cannot normalize: every column is constant.
  try {
    Mfcc39(w);
    FAIL("expected normalization error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kNormalization);
    CHECK(std::string(e.what()).find("coefficient 0") != std::string::npos);
  }
}

TEST_CASE("degenerate supplied stats name the coefficient") {
  CepstralStats stats{std::vector<double>(13, 0.0), std::vector<double>(13, 1.0)};
  stats.stddev[7] = 0.0;
  try {
    Mfcc39(Noise(4000, 6), stats);
    FAIL("expected normalization error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kNormalization);
    CHECK(std::string(e.what()).find("coefficient 7") != std::string::npos);
  }
}

TEST_CASE("corpus z-scoring yields zero mean and unit variance columns") {
  std::vector<Matrix> cepstra;
  for (std::uint64_t s = 0; s < 3; ++s)
    cepstra.push_back(CepstraFromMel(
        MelProject(StftMagnitude(Noise(8000 + 1600 * s, 10 + s))).energies));
  CepstralStats stats = FitCepstralStats(cepstra);
  std::vector<double> sum(13, 0.0), sq(13, 0.0);
  std::size_t n = 0;
  for (const Matrix& c : cepstra) {
    Matrix z = AssembleMfcc(c, stats);
    for (std::size_t t = 0; t < z.rows(); ++t) {
      for (std::size_t k = 0; k < 13; ++k) {
        sum[k] += z(t, k);
        sq[k] += z(t, k) * z(t, k);
      }
    }
    n += z.rows();
  }
  for (std::size_t k = 0; k < 13; ++k) {
    const double mean = sum[k] / static_cast<double>(n);
    const double var = sq[k] / static_cast<double>(n) - mean * mean;
    CHECK(std::abs(mean) < 1e-10);
    CHECK(std::abs(var - 1.0) < 1e-10);
  }
}

TEST_CASE("mfcc_from_mel equals mfcc39 and passes grad_check") {
  Waveform w = Noise(9600, 7);
  const Matrix cep = CepstraFromMel(MelProject(StftMagnitude(w)).energies);
  CepstralStats stats = FitCepstralStats({cep});
  FeatureSequence direct = Mfcc39(w, stats);
  MelSpectrogram mel = MelProject(StftMagnitude(w));
  CHECK(MaxAbsDiff(MfccFromMel(mel, stats).frames, direct.frames) < 1e-10);
  Tape tape;
  Var graph = MfccFromMel(tape.Constant(mel.energies), stats);
  CHECK(MaxAbsDiff(graph.value(), direct.frames) < 1e-10);

  std::mt19937_64 rng(8);
  ParameterSet p;
  p.Add("mel", testing::RandomMatrix(5, 80, rng, 0.5, 2.0));
  const Matrix target = testing::RandomMatrix(5, 39, rng);
  auto f = [&](Tape& t, ParameterSet& ps) {
    return CosineDistanceLoss(t.ConstantRef(target),
                              MfccFromMel(t.Param(ps.at("mel")), stats));
  };
  GradCheckReport r = GradCheck(f, p, 1e-4, 1e-5);
  CHECK_MESSAGE(r.passed, "worst " << r.worst);
}

TEST_CASE("mfcc_from_mel of zero mel input is constant with zero deltas") {
  CepstralStats stats{std::vector<double>(13, 0.0), std::vector<double>(13, 1.0)};
  FeatureSequence f = MfccFromMel(MelSpectrogram{Matrix(4, 80), kFrameRate}, stats);
  const Matrix expected_cep = CepstraFromLogMel(Matrix(4, 80, std::log(kLogFloor)));
  for (std::size_t t = 0; t < 4; ++t) {
    for (std::size_t k = 0; k < 13; ++k) {
      CHECK(f.frames(t, k) == f.frames(0, k));
      CHECK(f.frames(t, k) == expected_cep(t, k));
    }
    for (std::size_t k = 13; k < 39; ++k) CHECK(f.frames(t, k) == 0.0);
  }
}

Waveform Sawtooth(double hz, std::size_t n) {
  Waveform w;
  w.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double phase = hz * static_cast<double>(i) / kSampleRate;
    w.samples[i] = 0.8 * (2.0 * (phase - std::floor(phase)) - 1.0);
  }
  return w;
}

TEST_CASE("extract_source recovers the period of a 100 Hz sawtooth") {
  SourceTrack s = ExtractSource(Sawtooth(100.0, 16000));
  std::size_t voiced = 0;
  for (std::size_t t = 0; t < s.frames.rows(); ++t) {
    if (s.frames(t, 0) == 0.0) continue;
    ++voiced;
    CHECK(std::abs(s.frames(t, 0) - 160.0) <= 1.0);
    CHECK(s.frames(t, 1) > 0.8);
  }
  CHECK(voiced == s.frames.rows());
}

TEST_CASE("extract_source tracks periodic signals across the search range") {
  for (double hz : {55.0, 73.0, 100.0, 123.0, 151.0, 187.0}) {
    SourceTrack s = ExtractSource(Sawtooth(hz, 8000));
    const double period = kSampleRate / hz;
    for (std::size_t t = 0; t < s.frames.rows(); ++t)
      CHECK_MESSAGE(std::abs(s.frames(t, 0) - period) <= 1.0, hz << " Hz");
  }
}

TEST_CASE("extract_source: white noise is mostly unvoiced, silence fully") {
  SourceTrack s = ExtractSource(Noise(32000, 9));
  std::size_t low = 0;
  for (std::size_t t = 0; t < s.frames.rows(); ++t)
    if (s.frames(t, 1) < 0.3) ++low;
  CHECK(static_cast<double>(low) >= 0.9 * static_cast<double>(s.frames.rows()));

  Waveform silence;
  silence.samples.assign(4000, 0.0);
  SourceTrack q = ExtractSource(silence);
  CHECK(q.frames == Matrix(FrameCount(4000), 2));
}

TEST_CASE("all front-end outputs share one frame count") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<std::size_t> len(640, 9000);
  for (int trial = 0; trial < 10; ++trial) {
    Waveform w = Noise(len(rng), 20 + static_cast<std::uint64_t>(trial));
    const std::size_t t = FrameCount(w.samples.size());
    CHECK(StftMagnitude(w).rows() == t);
    CHECK(MelProject(StftMagnitude(w)).energies.rows() == t);
    CHECK(ExtractSource(w).frames.rows() == t);
    CepstralStats stats{std::vector<double>(13, 0.0),
                        std::vector<double>(13, 1.0)};
    CHECK(Mfcc39(w, stats).num_frames() == t);
  }
}

}  // namespace
}  // namespace artimit::dsp
