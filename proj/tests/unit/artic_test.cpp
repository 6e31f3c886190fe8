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

#include "artimit/artic/gpca.hpp"
#include "artimit/common/error.hpp"
#include "doctest.h"
#include "unit/test_util.hpp"

namespace artimit::artic {
namespace {

EmaRecording SineChannel(double hz, double rate, std::size_t n) {
  EmaRecording e{{"ch"}, Matrix(n, 1), rate};
  for (std::size_t t = 0; t < n; ++t)
    e.samples(t, 0) = std::sin(2.0 * std::numbers::pi * hz * static_cast<double>(t) / rate);
  return e;
}

double Correlation(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

std::vector<double> Column(const Matrix& m, std::size_t c) {
  std::vector<double> out(m.rows());
  for (std::size_t t = 0; t < m.rows(); ++t) out[t] = m(t, c);
  return out;
}

TEST_CASE("low-pass taps are symmetric with unity DC gain") {
  const std::vector<double> h = LowPassTaps(200.0);
  REQUIRE(h.size() == 65);
  double sum = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    CHECK(h[i] == doctest::Approx(h[h.size() - 1 - i]).epsilon(1e-15));
    sum += h[i];
  }
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("resample: constant channel stays constant") {
  EmaRecording e{{"a", "b"}, Matrix(401, 2), 200.0};
  for (std::size_t t = 0; t < 401; ++t) {
    e.samples(t, 0) = 3.25;
    e.samples(t, 1) = -1.0;
  }
  EmaRecording r = ResampleTo50Hz(e);
  CHECK(r.rate == 50.0);
  CHECK(r.num_samples() == 101);
  for (std::size_t t = 0; t < r.num_samples(); ++t) {
    CHECK(r.samples(t, 0) == doctest::Approx(3.25).epsilon(1e-13));
    CHECK(r.samples(t, 1) == doctest::Approx(-1.0).epsilon(1e-13));
  }
}

TEST_CASE("resample: 5 Hz passes within 1%, 40 Hz is attenuated 40 dB") {
  EmaRecording pass = ResampleTo50Hz(SineChannel(5.0, 200.0, 2000));
  double worst = 0.0;
  for (std::size_t j = 10; j + 10 < pass.num_samples(); ++j) {
    const double expected = std::sin(2.0 * std::numbers::pi * 5.0 * j / 50.0);
    worst = std::max(worst, std::abs(pass.samples(j, 0) - expected));
  }
  CHECK(worst < 0.01);

  EmaRecording stop = ResampleTo50Hz(SineChannel(40.0, 200.0, 2000));
  double peak = 0.0;
  for (std::size_t j = 10; j + 10 < stop.num_samples(); ++j)
    peak = std::max(peak, std::abs(stop.samples(j, 0)));
  CHECK(20.0 * std::log10(peak) <= -40.0);
}

TEST_CASE("resample rejects non-integer factors and passes 50 Hz through") {
  try {
    ResampleTo50Hz(SineChannel(5.0, 210.0, 100));
    FAIL("expected unsupported rate");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kUnsupportedRate);
  }
  CHECK_THROWS_AS(ResampleTo50Hz(SineChannel(5.0, 25.0, 100)), Error);
  EmaRecording same = SineChannel(5.0, 50.0, 100);
  CHECK(ResampleTo50Hz(same).samples == same.samples);
}

TEST_CASE("stage 1 regression leaves the residual uncorrelated with p1") {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g(0.0, 1.0);
  EmaRecording e{{"lower_incisor_y", "other"}, Matrix(500, 2), 50.0};
  for (std::size_t t = 0; t < 500; ++t) {
    e.samples(t, 0) = 2.0 + g(rng);
    e.samples(t, 1) = 0.5 * e.samples(t, 0) + 0.3 * g(rng);
  }
  GuidedPcaSpec spec{{{"JH", ExtractionRule::kCoordinate, {"lower_incisor_y"}}}};
  GuidedPcaModel m = GpcaFit(e, spec, true);
  Matrix residual;
  Matrix q = GpcaStageScores(e, m, &residual);
  CHECK(std::abs(Correlation(Column(q, 0), Column(residual, 1))) < 1e-10);
  CHECK(m.regression(0, 1) == doctest::Approx(0.5).epsilon(0.05));
  CHECK_THROWS_AS(GpcaFit(e, spec), Error);
}

TEST_CASE("mutually uncorrelated channels give zero cross regression") {
  // Zero-mean cosines at distinct integer frequencies are exactly orthogonal.
  const std::vector<std::string> names = DefaultEmaChannels();
  const std::size_t n = 480;
  EmaRecording e{names, Matrix(n, names.size()), 50.0};
  for (std::size_t c = 0; c < names.size(); ++c)
    for (std::size_t t = 0; t < n; ++t)
      e.samples(t, c) = (1.0 + 0.25 * static_cast<double>(c)) *
                        std::cos(2.0 * std::numbers::pi * (c + 1) *
                                 (static_cast<double>(t) + 0.5) / n);
  const GuidedPcaSpec spec = DefaultGpcaSpec();
  GuidedPcaModel m = GpcaFit(e, spec);
  for (std::size_t k = 0; k < m.num_stages(); ++k) {
    const GpcaStage& st = spec.stages[k];
    for (std::size_t c = 0; c < names.size(); ++c) {
      const bool in_subset =
          std::find(st.channels.begin(), st.channels.end(), names[c]) != st.channels.end();
      if (!in_subset) CHECK(std::abs(m.regression(k, c)) < 1e-12);
    }
  }
  // PC stages pick the higher-variance channel of their pair.
  ArticulatoryTrajectory a = GpcaEncode(e, m);
  const std::size_t mid_y = e.ChannelIndex("tongue_mid_y");
  double s = 0.0;
  for (std::size_t t = 0; t < n; ++t) s += e.samples(t, mid_y) * e.samples(t, mid_y);
  const double sd = std::sqrt(s / n);
  for (std::size_t t = 0; t < n; ++t)
    CHECK(std::abs(std::abs(a.frames(t, ParamIndex("TB"))) -
                   std::abs(e.samples(t, mid_y) / sd)) < 1e-9);
}

TEST_CASE("six-factor mix: standardization, reconstruction and signs") {
  EmaRecording e = SyntheticEma(2000, 50.0, 7, 0.0);
  GuidedPcaModel m = GpcaFit(e, DefaultGpcaSpec());
  ArticulatoryTrajectory a = GpcaEncode(e, m);
  for (std::size_t k = 0; k < kNumParams; ++k) {
    double mean = 0, sq = 0;
    for (std::size_t t = 0; t < a.frames.rows(); ++t) {
      mean += a.frames(t, k);
      sq += a.frames(t, k) * a.frames(t, k);
    }
    mean /= 2000.0;
    CHECK(std::abs(mean) < 1e-8);
    CHECK(std::abs(std::sqrt(sq / 2000.0 - mean * mean) - 1.0) < 1e-6);
  }
  for (double r2 : ChannelR2(e.samples, GpcaDecode(a, m).samples)) CHECK(r2 > 0.99);
  const std::vector<double> jh = Column(a.frames, ParamIndex("JH"));
  CHECK(Correlation(jh, Column(e.samples, e.ChannelIndex("lower_incisor_y"))) > 0.99);
  const std::vector<double> lh = Column(a.frames, ParamIndex("LH"));
  Matrix gap(e.num_samples(), 1);
  for (std::size_t t = 0; t < e.num_samples(); ++t)
    gap(t, 0) = e.samples(t, e.ChannelIndex("upper_lip_y")) -
                e.samples(t, e.ChannelIndex("lower_lip_y"));
  CHECK(Correlation(lh, Column(gap, 0)) > 0.0);
  const GuidedPcaSpec spec = DefaultGpcaSpec();
  for (std::size_t k = 0; k < m.num_stages(); ++k) {
    const std::string& primary = spec.stages[k].channels[0];
    CHECK(m.extraction(k, e.ChannelIndex(primary)) > 0.0);
  }
}

TEST_CASE("stage orthogonality and monotone cumulative reconstruction") {
  EmaRecording e = SyntheticEma(1500, 50.0, 8, 0.05);
  GuidedPcaModel m = GpcaFit(e, DefaultGpcaSpec());
  // Recompute the residual cascade stage by stage.
  Matrix q = GpcaStageScores(e, m);
  for (std::size_t k = 0; k < m.num_stages(); ++k) {
    EmaRecording partial = GpcaReconstruct(e, m, k + 1);
    for (std::size_t c = 0; c < e.channels.size(); ++c) {
      std::vector<double> residual(e.num_samples());
      for (std::size_t t = 0; t < e.num_samples(); ++t)
        residual[t] = e.samples(t, c) - partial.samples(t, c);
      double var = 0;
      for (double v : residual) var += v * v;
      if (var < 1e-20) continue;
      CHECK(std::abs(Correlation(Column(q, k), residual)) < 1e-8);
    }
  }
  double prev = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k <= m.num_stages(); ++k) {
    const double mse = ChannelMse(e.samples, GpcaReconstruct(e, m, k).samples);
    CHECK(mse <= prev);
    prev = mse;
  }
}

TEST_CASE("held-out reconstruction improves as stages are added") {
  GuidedPcaModel m = GpcaFit(SyntheticEma(3000, 50.0, 9, 0.05), DefaultGpcaSpec());
  // Same coil geometry and latents, independent measurement noise.
  EmaRecording held = SyntheticEma(3000, 50.0, 9, 0.0);
  std::mt19937_64 rng(99);
  std::normal_distribution<double> g(0.0, 0.05);
  for (double& v : held.samples.values()) v += g(rng);
  // A stage whose latent does not drive a channel still fits a small
  // noise-level coefficient to it, so per-channel held-out R2 may dip by
  // sampling error; the pooled error must not rise.
  std::vector<double> prev(m.channels.size(), -1.0);
  double prev_mse = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k <= m.num_stages(); ++k) {
    const Matrix recon = GpcaReconstruct(held, m, k).samples;
    const std::vector<double> r2 = ChannelR2(held.samples, recon);
    for (std::size_t c = 0; c < r2.size(); ++c) {
      CHECK_MESSAGE(r2[c] >= prev[c] - 1e-3, m.channels[c] << " stage " << k);
      prev[c] = r2[c];
    }
    const double mse = ChannelMse(held.samples, recon);
    CHECK(mse <= prev_mse);
    prev_mse = mse;
  }
  for (double r2 : prev) CHECK(r2 > 0.9);
}

TEST_CASE("encode is affine and inverts decode") {
  GuidedPcaModel m = GpcaFit(SyntheticEma(1000, 50.0, 10, 0.1), DefaultGpcaSpec());
  EmaRecording e1 = SyntheticEma(200, 50.0, 11, 0.1);
  EmaRecording e2 = SyntheticEma(200, 50.0, 12, 0.1);
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-2.0, 3.0);
  for (int trial = 0; trial < 5; ++trial) {
    const double alpha = u(rng);
    EmaRecording mix = e1;
    for (std::size_t i = 0; i < mix.samples.size(); ++i)
      mix.samples[i] = alpha * e1.samples[i] + (1 - alpha) * e2.samples[i];
    Matrix lhs = GpcaEncode(mix, m).frames;
    Matrix a1 = GpcaEncode(e1, m).frames, a2 = GpcaEncode(e2, m).frames;
    for (std::size_t i = 0; i < lhs.size(); ++i)
      CHECK(std::abs(lhs[i] - (alpha * a1[i] + (1 - alpha) * a2[i])) < 1e-9);
  }
  ArticulatoryTrajectory a{testing::RandomMatrix(50, 6, rng, -3, 3), 50.0};
  CHECK(MaxAbsDiff(GpcaEncode(GpcaDecode(a, m), m).frames, a.frames) < 1e-8);
  EmaRecording zero = GpcaDecode({Matrix(3, 6), 50.0}, m);
  for (std::size_t t = 0; t < 3; ++t)
    for (std::size_t c = 0; c < m.channels.size(); ++c)
      CHECK(zero.samples(t, c) == m.channel_means[c]);
}

TEST_CASE("degenerate stages and missing channels are reported") {
  EmaRecording e = SyntheticEma(600, 50.0, 14, 0.05);
  const std::size_t li = e.ChannelIndex("lower_incisor_y");
  for (std::size_t t = 0; t < e.num_samples(); ++t) e.samples(t, li) = 1.0;
  try {
    GpcaFit(e, DefaultGpcaSpec());
    FAIL("expected degenerate stage");
  } catch (const Error& err) {
    CHECK(err.kind() == ErrorKind::kDegenerateStage);
    CHECK(std::string(err.what()).find("stage 1 (JH)") != std::string::npos);
  }
  GuidedPcaSpec twice = DefaultGpcaSpec();
  twice.stages[1] = {"TB", ExtractionRule::kCoordinate, {"lower_incisor_x"}};
  twice.stages[2] = {"TD", ExtractionRule::kCoordinate, {"lower_incisor_x"}};
  try {
    GpcaFit(SyntheticEma(600, 50.0, 15, 0.05), twice);
    FAIL("expected degenerate stage");
  } catch (const Error& err) {
    CHECK(err.kind() == ErrorKind::kDegenerateStage);
    CHECK(std::string(err.what()).find("stage 3 (TD)") != std::string::npos);
  }
  GuidedPcaModel m = GpcaFit(SyntheticEma(600, 50.0, 16, 0.05), DefaultGpcaSpec());
  EmaRecording missing = SyntheticEma(10, 50.0, 17, 0.0);
  missing.channels[0] = "renamed";
  try {
    GpcaEncode(missing, m);
    FAIL("expected schema error");
  } catch (const Error& err) {
    CHECK(err.kind() == ErrorKind::kSchema);
  }
  CHECK_THROWS_AS(GpcaFit(SyntheticEma(50, 50.0, 18, 0.1), DefaultGpcaSpec()), Error);
}

TEST_CASE("spec text round trip and validation") {
  const GuidedPcaSpec d = DefaultGpcaSpec();
  const GuidedPcaSpec back = ParseGpcaSpec(FormatGpcaSpec(d), "spec");
  REQUIRE(back.stages.size() == 6);
  for (std::size_t k = 0; k < 6; ++k) {
    CHECK(back.stages[k].parameter == d.stages[k].parameter);
    CHECK(back.stages[k].rule == d.stages[k].rule);
    CHECK(back.stages[k].channels == d.stages[k].channels);
  }
  CHECK_THROWS_AS(ParseGpcaSpec("JH sideways a\n", "s"), Error);
  CHECK_THROWS_AS(ParseGpcaSpec("JH coordinate a\n", "s"), Error);
  GuidedPcaSpec dup = d;
  dup.stages[1].parameter = "JH";
  CHECK_THROWS_AS(ValidateGpcaSpec(dup), Error);
  GuidedPcaSpec bad_rule = d;
  bad_rule.stages[0].channels.push_back("lower_incisor_x");
  CHECK_THROWS_AS(ValidateGpcaSpec(bad_rule), Error);
}

TEST_CASE("gpca model survives a checkpoint round trip") {
  EmaRecording e = SyntheticEma(800, 50.0, 19, 0.05);
  GuidedPcaModel m = GpcaFit(e, DefaultGpcaSpec());
  const store::Bytes bytes = store::EncodeCheckpoint(GpcaToCheckpoint(m));
  GuidedPcaModel back = GpcaFromCheckpoint(
      store::DecodeCheckpoint({bytes.data(), bytes.size()}, "gpca"));
  CHECK(back.channels == m.channels);
  CHECK(back.parameters == m.parameters);
  CHECK(MaxAbsDiff(GpcaEncode(e, back).frames, GpcaEncode(e, m).frames) < 1e-4);
}

}  // namespace
}  // namespace artimit::artic
