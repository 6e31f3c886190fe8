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

#include "artimit/artic/gpca.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "artimit/common/error.hpp"

namespace artimit::artic {
namespace {

constexpr double kDegenerateVariance = 1e-12;
constexpr std::size_t kMinSamplesPerChannel = 10;

std::vector<std::string> SplitWords(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

std::string JoinWords(const std::vector<std::string>& words) {
  std::string out;
  for (std::size_t i = 0; i < words.size(); ++i) out += (i ? " " : "") + words[i];
  return out;
}

std::vector<std::size_t> ChannelColumns(const EmaRecording& e,
                                        const GuidedPcaModel& model) {
  std::vector<std::size_t> cols;
  for (const std::string& name : model.channels) cols.push_back(e.ChannelIndex(name));
  return cols;
}

// Channels of `e` in model order, minus the channel means.
Matrix CenteredChannels(const EmaRecording& e, const GuidedPcaModel& model) {
  const std::vector<std::size_t> cols = ChannelColumns(e, model);
  Matrix x(e.num_samples(), cols.size());
  for (std::size_t t = 0; t < x.rows(); ++t)
    for (std::size_t c = 0; c < cols.size(); ++c)
      x(t, c) = e.samples(t, cols[c]) - model.channel_means[c];
  return x;
}

std::vector<double> Project(const Matrix& r, std::span<const double> e) {
  std::vector<double> q(r.rows(), 0.0);
  for (std::size_t t = 0; t < r.rows(); ++t)
    for (std::size_t c = 0; c < r.cols(); ++c) q[t] += r(t, c) * e[c];
  return q;
}

void SubtractOuter(Matrix& r, const std::vector<double>& q,
                   std::span<const double> beta) {
  for (std::size_t t = 0; t < r.rows(); ++t)
    for (std::size_t c = 0; c < r.cols(); ++c) r(t, c) -= q[t] * beta[c];
}

std::vector<double> FirstPrincipalAxis(const Matrix& r,
                                       const std::vector<std::size_t>& subset) {
  const std::size_t s = subset.size();
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(s),
                                              static_cast<Eigen::Index>(s));
  for (std::size_t t = 0; t < r.rows(); ++t)
    for (std::size_t i = 0; i < s; ++i)
      for (std::size_t j = 0; j < s; ++j)
        cov(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) +=
            r(t, subset[i]) * r(t, subset[j]);
  cov /= static_cast<double>(r.rows());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  // Eigenvalues ascend; the last column is the leading axis.
  const Eigen::VectorXd v = solver.eigenvectors().col(static_cast<Eigen::Index>(s - 1));
  std::vector<double> axis(r.cols(), 0.0);
  double sign = 0.0;
  for (std::size_t i = 0; i < s && sign == 0.0; ++i) {
    const double vi = v(static_cast<Eigen::Index>(i));
    if (std::abs(vi) > 1e-12) sign = vi > 0.0 ? 1.0 : -1.0;
  }
  if (sign == 0.0) sign = 1.0;
  for (std::size_t i = 0; i < s; ++i)
    axis[subset[i]] = sign * v(static_cast<Eigen::Index>(i));
  return axis;
}

}  // namespace

std::size_t ParamIndex(const std::string& name) {
  for (std::size_t i = 0; i < kNumParams; ++i)
    if (kParamNames[i] == name) return i;
  Fail(ErrorKind::kSchema, "unknown articulatory parameter '" + name + "'");
}

std::vector<double> LowPassTaps(double rate) {
  const double fc = kResampleCutoffHz / rate;
  const double mid = static_cast<double>(kResampleTaps - 1) / 2.0;
  std::vector<double> h(kResampleTaps);
  double sum = 0.0;
  for (std::size_t n = 0; n < kResampleTaps; ++n) {
    const double m = static_cast<double>(n) - mid;
    const double x = 2.0 * fc * m;
    const double sinc = m == 0.0 ? 1.0 : std::sin(std::numbers::pi * x) /
                                             (std::numbers::pi * x);
    const double window =
        0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * static_cast<double>(n) /
                               static_cast<double>(kResampleTaps - 1));
    h[n] = 2.0 * fc * sinc * window;
    sum += h[n];
  }
  for (double& v : h) v /= sum;
  return h;
}

EmaRecording ResampleTo50Hz(const EmaRecording& e) {
  ValidateEma(e);
  const double ratio = e.rate / kTargetRate;
  const double factor_real = std::round(ratio);
  if (factor_real < 1.0 || std::abs(ratio - factor_real) > 1e-9)
    Fail(ErrorKind::kUnsupportedRate,
         "EMA rate " + std::to_string(e.rate) +
             " Hz is not an integer multiple of 50 Hz");
  const auto factor = static_cast<std::size_t>(factor_real);
  if (factor == 1) return e;
  const std::vector<double> h = LowPassTaps(e.rate);
  const auto n = static_cast<long>(e.num_samples());
  const long half = static_cast<long>(kResampleTaps / 2);
  const std::size_t out_n = (e.num_samples() + factor - 1) / factor;
  EmaRecording out{e.channels, Matrix(out_n, e.channels.size()), kTargetRate};
  for (std::size_t j = 0; j < out_n; ++j) {
    const long t = static_cast<long>(j * factor);
    for (std::size_t c = 0; c < e.channels.size(); ++c) {
      double acc = 0.0;
      for (std::size_t k = 0; k < kResampleTaps; ++k) {
        const long src = std::clamp(t + static_cast<long>(k) - half, 0L, n - 1);
        acc += h[k] * e.samples(static_cast<std::size_t>(src), c);
      }
      out.samples(j, c) = acc;
    }
  }
  return out;
}

std::string ExtractionRuleName(ExtractionRule rule) {
  switch (rule) {
    case ExtractionRule::kFirstPc: return "first_pc";
    case ExtractionRule::kCoordinate: return "coordinate";
    case ExtractionRule::kDifference: return "difference";
  }
  return "first_pc";
}

GuidedPcaSpec DefaultGpcaSpec() {
  using R = ExtractionRule;
  return {{{"JH", R::kCoordinate, {"lower_incisor_y"}},
           {"TB", R::kFirstPc, {"tongue_mid_y", "tongue_mid_x"}},
           {"TD", R::kFirstPc, {"tongue_back_y", "tongue_back_x"}},
           {"TT", R::kFirstPc, {"tongue_tip_y", "tongue_tip_x"}},
           {"LP", R::kFirstPc, {"upper_lip_x", "lower_lip_x"}},
           {"LH", R::kDifference, {"upper_lip_y", "lower_lip_y"}}}};
}

std::vector<std::string> DefaultEmaChannels() {
  return {"lower_incisor_x", "lower_incisor_y", "tongue_tip_x", "tongue_tip_y",
          "tongue_mid_x",    "tongue_mid_y",    "tongue_back_x", "tongue_back_y",
          "upper_lip_x",     "upper_lip_y",     "lower_lip_x",   "lower_lip_y"};
}

void ValidateGpcaSpec(const GuidedPcaSpec& spec, bool allow_partial) {
  if (spec.stages.empty() ||
      (!allow_partial && spec.stages.size() != kNumParams))
    Fail(ErrorKind::kSchema, "guided PCA spec needs 6 stages, got " +
                                 std::to_string(spec.stages.size()));
  std::set<std::string> seen;
  for (const GpcaStage& s : spec.stages) {
    ParamIndex(s.parameter);
    if (!seen.insert(s.parameter).second)
      Fail(ErrorKind::kSchema, "parameter " + s.parameter + " appears twice");
    const std::size_t n = s.channels.size();
    if ((s.rule == ExtractionRule::kCoordinate && n != 1) ||
        (s.rule == ExtractionRule::kDifference && n != 2) || n == 0)
      Fail(ErrorKind::kSchema, "stage " + s.parameter + ": rule " +
                                   ExtractionRuleName(s.rule) + " cannot take " +
                                   std::to_string(n) + " channels");
    std::set<std::string> uniq(s.channels.begin(), s.channels.end());
    if (uniq.size() != n)
      Fail(ErrorKind::kSchema, "stage " + s.parameter + " repeats a channel");
  }
}

GuidedPcaSpec ParseGpcaSpec(const std::string& text, const std::string& source) {
  GuidedPcaSpec spec;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::vector<std::string> w = SplitWords(line);
    if (w.empty() || w[0][0] == '#') continue;
    if (w.size() < 3)
      Fail(ErrorKind::kParse, source + ":" + std::to_string(lineno) +
                                  ": expected <param> <rule> <channels...>");
    GpcaStage s;
    s.parameter = w[0];
    if (w[1] == "first_pc") s.rule = ExtractionRule::kFirstPc;
    else if (w[1] == "coordinate") s.rule = ExtractionRule::kCoordinate;
    else if (w[1] == "difference") s.rule = ExtractionRule::kDifference;
    else
      Fail(ErrorKind::kParse, source + ":" + std::to_string(lineno) +
                                  ": unknown rule '" + w[1] + "'");
    s.channels.assign(w.begin() + 2, w.end());
    spec.stages.push_back(std::move(s));
  }
  ValidateGpcaSpec(spec);
  return spec;
}

std::string FormatGpcaSpec(const GuidedPcaSpec& spec) {
  std::string out;
  for (const GpcaStage& s : spec.stages)
    out += s.parameter + " " + ExtractionRuleName(s.rule) + " " +
           JoinWords(s.channels) + "\n";
  return out;
}

GuidedPcaModel GpcaFit(const EmaRecording& data, const GuidedPcaSpec& spec,
                       bool allow_partial) {
  ValidateEma(data);
  ValidateGpcaSpec(spec, allow_partial);
  GuidedPcaModel model;
  model.channels = data.channels;
  const std::size_t n = data.num_samples();
  const std::size_t c = data.channels.size();
  if (n < kMinSamplesPerChannel * c)
    Fail(ErrorKind::kContract, "guided PCA needs at least " +
                                   std::to_string(kMinSamplesPerChannel * c) +
                                   " samples, got " + std::to_string(n));
  RequireFinite(data.samples, "EMA samples");
  model.channel_means.assign(c, 0.0);
  for (std::size_t t = 0; t < n; ++t)
    for (std::size_t j = 0; j < c; ++j) model.channel_means[j] += data.samples(t, j);
  for (double& m : model.channel_means) m /= static_cast<double>(n);
  Matrix r = CenteredChannels(data, model);

  double scale = 0.0;
  for (double v : r.values()) scale += v * v;
  scale = std::max(1.0, scale / static_cast<double>(r.size()));

  const std::size_t stages = spec.stages.size();
  model.extraction = Matrix(stages, c);
  model.regression = Matrix(stages, c);
  for (std::size_t k = 0; k < stages; ++k) {
    const GpcaStage& st = spec.stages[k];
    model.parameters.push_back(st.parameter);
    std::vector<std::size_t> subset;
    for (const std::string& name : st.channels) {
      try {
        subset.push_back(data.ChannelIndex(name));
      } catch (const Error&) {
        Fail(ErrorKind::kSchema, "stage " + std::to_string(k + 1) + " (" +
                                     st.parameter + ") needs missing channel '" +
                                     name + "'");
      }
    }
    std::vector<double> e(c, 0.0);
    if (st.rule == ExtractionRule::kCoordinate) {
      e[subset[0]] = 1.0;
    } else if (st.rule == ExtractionRule::kDifference) {
      e[subset[0]] = 1.0;
      e[subset[1]] = -1.0;
    } else {
      e = FirstPrincipalAxis(r, subset);
    }
    const std::vector<double> q = Project(r, e);
    double qq = 0.0;
    for (double v : q) qq += v * v;
    if (qq / static_cast<double>(n) <= kDegenerateVariance * scale)
      Fail(ErrorKind::kDegenerateStage,
           "stage " + std::to_string(k + 1) + " (" + st.parameter +
               "): extraction channels have no residual variance");
    std::vector<double> beta(c, 0.0);
    for (std::size_t t = 0; t < n; ++t)
      for (std::size_t j = 0; j < c; ++j) beta[j] += r(t, j) * q[t];
    for (double& b : beta) b /= qq;
    SubtractOuter(r, q, beta);
    std::copy(e.begin(), e.end(), model.extraction.row(k).begin());
    std::copy(beta.begin(), beta.end(), model.regression.row(k).begin());
    model.score_std.push_back(std::sqrt(qq / static_cast<double>(n)));
  }
  return model;
}

Matrix GpcaStageScores(const EmaRecording& e, const GuidedPcaModel& model,
                       Matrix* residual) {
  Matrix r = CenteredChannels(e, model);
  Matrix scores(r.rows(), model.num_stages());
  for (std::size_t k = 0; k < model.num_stages(); ++k) {
    const std::vector<double> q = Project(r, model.extraction.row(k));
    SubtractOuter(r, q, model.regression.row(k));
    for (std::size_t t = 0; t < r.rows(); ++t) scores(t, k) = q[t];
  }
  if (residual) *residual = std::move(r);
  return scores;
}

ArticulatoryTrajectory GpcaEncode(const EmaRecording& e,
                                  const GuidedPcaModel& model) {
  const Matrix q = GpcaStageScores(e, model);
  ArticulatoryTrajectory a{Matrix(q.rows(), kNumParams), e.rate};
  for (std::size_t k = 0; k < model.num_stages(); ++k) {
    const std::size_t col = ParamIndex(model.parameters[k]);
    for (std::size_t t = 0; t < q.rows(); ++t)
      a.frames(t, col) = q(t, k) / model.score_std[k];
  }
  return a;
}

namespace {

EmaRecording Expand(const Matrix& q, const GuidedPcaModel& model,
                    std::size_t stages, double rate) {
  EmaRecording out{model.channels, Matrix(q.rows(), model.channels.size()), rate};
  for (std::size_t t = 0; t < q.rows(); ++t) {
    for (std::size_t c = 0; c < model.channels.size(); ++c) {
      double v = model.channel_means[c];
      for (std::size_t k = 0; k < stages; ++k) v += q(t, k) * model.regression(k, c);
      out.samples(t, c) = v;
    }
  }
  return out;
}

}  // namespace

EmaRecording GpcaDecode(const ArticulatoryTrajectory& a,
                        const GuidedPcaModel& model) {
  if (a.frames.cols() != kNumParams)
    Fail(ErrorKind::kDimension, "trajectory must have 6 columns, got " +
                                    std::to_string(a.frames.cols()));
  Matrix q(a.frames.rows(), model.num_stages());
  for (std::size_t k = 0; k < model.num_stages(); ++k) {
    const std::size_t col = ParamIndex(model.parameters[k]);
    for (std::size_t t = 0; t < q.rows(); ++t)
      q(t, k) = a.frames(t, col) * model.score_std[k];
  }
  return Expand(q, model, model.num_stages(), a.frame_rate);
}

EmaRecording GpcaReconstruct(const EmaRecording& e, const GuidedPcaModel& model,
                             std::size_t stages) {
  if (stages > model.num_stages())
    Fail(ErrorKind::kContract, "model has only " +
                                   std::to_string(model.num_stages()) + " stages");
  return Expand(GpcaStageScores(e, model), model, stages, e.rate);
}

std::vector<double> ChannelR2(const Matrix& truth, const Matrix& estimate) {
  RequireShape(estimate, truth.rows(), truth.cols(), "reconstruction");
  std::vector<double> r2(truth.cols());
  for (std::size_t c = 0; c < truth.cols(); ++c) {
    double mean = 0.0;
    for (std::size_t t = 0; t < truth.rows(); ++t) mean += truth(t, c);
    mean /= static_cast<double>(truth.rows());
    double sse = 0.0, sst = 0.0;
    for (std::size_t t = 0; t < truth.rows(); ++t) {
      sse += (truth(t, c) - estimate(t, c)) * (truth(t, c) - estimate(t, c));
      sst += (truth(t, c) - mean) * (truth(t, c) - mean);
    }
    r2[c] = sst > 0.0 ? 1.0 - sse / sst : (sse == 0.0 ? 1.0 : 0.0);
  }
  return r2;
}

double ChannelMse(const Matrix& truth, const Matrix& estimate) {
  RequireShape(estimate, truth.rows(), truth.cols(), "reconstruction");
  double s = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i)
    s += (truth[i] - estimate[i]) * (truth[i] - estimate[i]);
  return s / static_cast<double>(truth.size());
}

EmaRecording SyntheticEma(std::size_t samples, double rate, std::uint64_t seed,
                          double noise) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  // Each latent is a sum of three slow sinusoids (0.5-6 Hz).
  Matrix z(samples, kNumParams);
  for (std::size_t k = 0; k < kNumParams; ++k) {
    for (int h = 0; h < 3; ++h) {
      const double f = 0.5 + 5.5 * unit(rng);
      const double phase = 2.0 * std::numbers::pi * unit(rng);
      const double amp = 0.5 + unit(rng);
      for (std::size_t t = 0; t < samples; ++t)
        z(t, k) += amp * std::sin(2.0 * std::numbers::pi * f *
                                      static_cast<double>(t) / rate + phase);
    }
  }
  const std::vector<std::string> names = DefaultEmaChannels();
  // Which latents drive each coil (JH=0 TB=1 TD=2 TT=3 LP=4 LH=5); the jaw
  // carries tongue and lower lip.
  const std::vector<std::vector<std::size_t>> drivers = {
      {0}, {0}, {0, 1, 3}, {0, 1, 3}, {0, 1}, {0, 1}, {0, 1, 2}, {0, 1, 2},
      {4, 5}, {4, 5}, {0, 4, 5}, {0, 4, 5}};
  Matrix mix(kNumParams, names.size());
  for (std::size_t c = 0; c < names.size(); ++c)
    for (std::size_t k : drivers[c]) mix(k, c) = 0.3 + unit(rng);
  // Lower lip moves opposite to the lip-height latent.
  mix(5, 11) = -mix(5, 11);
  EmaRecording e{names, MatMul(z, mix), rate};
  std::vector<double> offset(names.size());
  for (double& o : offset) o = 10.0 * gauss(rng);
  for (std::size_t t = 0; t < samples; ++t)
    for (std::size_t c = 0; c < names.size(); ++c)
      e.samples(t, c) += offset[c] + noise * gauss(rng);
  return e;
}

store::Checkpoint GpcaToCheckpoint(const GuidedPcaModel& model) {
  store::Checkpoint c;
  c.schema = "gpca_model";
  c.attributes["channels"] = JoinWords(model.channels);
  c.attributes["parameters"] = JoinWords(model.parameters);
  c.tensors["channel_means"] = Matrix::FromData(1, model.channels.size(),
                                                model.channel_means);
  c.tensors["extraction"] = model.extraction;
  c.tensors["regression"] = model.regression;
  c.tensors["score_std"] = Matrix::FromData(1, model.num_stages(), model.score_std);
  return c;
}

GuidedPcaModel GpcaFromCheckpoint(const store::Checkpoint& c) {
  store::RequireSchema(c, "gpca_model");
  GuidedPcaModel m;
  m.channels = SplitWords(c.attribute("channels"));
  m.parameters = SplitWords(c.attribute("parameters"));
  const std::size_t nc = m.channels.size(), ns = m.parameters.size();
  for (const std::string& p : m.parameters) ParamIndex(p);
  auto row = [&](const std::string& name, std::size_t n) {
    const Matrix& t = c.tensor(name);
    if (t.rows() != 1 || t.cols() != n)
      Fail(ErrorKind::kFormat, "gpca tensor '" + name + "' has shape " +
                                   t.ShapeString());
    return t.values();
  };
  m.channel_means = row("channel_means", nc);
  m.score_std = row("score_std", ns);
  m.extraction = c.tensor("extraction");
  m.regression = c.tensor("regression");
  RequireShape(m.extraction, ns, nc, "gpca extraction");
  RequireShape(m.regression, ns, nc, "gpca regression");
  for (double s : m.score_std)
    if (!(s > 0.0)) Fail(ErrorKind::kFormat, "gpca score_std must be positive");
  return m;
}

}  // namespace artimit::artic
