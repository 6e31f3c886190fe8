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

// Python bindings: numpy float64 arrays in and out, errors raised as
// artimit.Error with args (code, message).

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "artimit/artic/gpca.hpp"
#include "artimit/cli/cli.hpp"
#include "artimit/common/error.hpp"
#include "artimit/common/phones.hpp"
#include "artimit/dsp/frontend.hpp"
#include "artimit/eval/abx.hpp"
#include "artimit/eval/metrics.hpp"
#include "artimit/imitation/imitation.hpp"
#include "artimit/imitation/loss_space.hpp"
#include "artimit/store/formats.hpp"
#include "artimit/store/text_formats.hpp"
#include "artimit/synth/corpus.hpp"
#include "artimit/synth/tract.hpp"

namespace py = pybind11;

namespace artimit {
namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Matrix ToMatrix(const Array& a) {
  if (a.ndim() != 2)
    Fail(ErrorKind::kDimension, "expected a 2-D array, got " + std::to_string(a.ndim()) + " dims");
  const auto rows = static_cast<std::size_t>(a.shape(0));
  const auto cols = static_cast<std::size_t>(a.shape(1));
  return Matrix::FromData(rows, cols, std::vector<double>(a.data(), a.data() + rows * cols));
}

Array ToArray(const Matrix& m) {
  Array a({m.rows(), m.cols()});
  std::copy(m.data(), m.data() + m.size(), a.mutable_data());
  return a;
}

dsp::Waveform ToWaveform(const Array& samples) {
  if (samples.ndim() != 1) Fail(ErrorKind::kDimension, "expected a 1-D sample array");
  dsp::Waveform w;
  w.samples.assign(samples.data(), samples.data() + samples.shape(0));
  return w;
}

imitation::LossSpace MakeSpace(const std::string& name, const std::string& encoder) {
  switch (imitation::ParseLossSpaceKind(name)) {
    case imitation::LossSpaceKind::kLogMel80:
      return imitation::LossSpace::LogMel();
    case imitation::LossSpaceKind::kMfcc39:
      Fail(ErrorKind::kConfig, "mfcc39 needs corpus statistics; use LossSpace.from_checkpoint");
    case imitation::LossSpaceKind::kFrozenEncoder:
      return imitation::LossSpace::Encoder(imitation::LoadFrozenEncoder(encoder));
  }
  Fail(ErrorKind::kConfig, "unknown loss space '" + name + "'");
}

/// Inverse model plus the loss space it was trained with.
struct Inverter {
  imitation::InverseModel model;
  imitation::LossSpace space;

  static Inverter Load(const std::filesystem::path& path) {
    const store::Checkpoint c = store::ReadCheckpoint(path);
    return {imitation::InverseFromCheckpoint(c), imitation::LoadLossSpace(c)};
  }

  Array Predict(const Array& log_mel) {
    const dsp::FeatureSequence f{ToMatrix(log_mel), dsp::kFrameRate, dsp::FeatureKind::kLogMel80};
    return ToArray(imitation::InverseForward(model, space.RenderInput(f)));
  }
};

py::dict UtteranceDict(const synth::SyntheticUtterance& u) {
  py::dict d;
  d["id"] = u.id;
  d["speaker"] = u.speaker;
  d["speaker_scale"] = u.speaker_scale;
  d["split"] = u.split;
  d["vowel"] = u.vowel;
  d["consonant"] = u.consonant;
  d["artic"] = ToArray(u.artic);
  d["source"] = ToArray(u.source);
  d["log_mel"] = ToArray(u.log_mel);
  py::list labels;
  for (const synth::LabelSpan& s : u.labels) labels.append(py::make_tuple(s.start, s.end, s.label));
  d["labels"] = labels;
  return d;
}

}  // namespace
}  // namespace artimit

PYBIND11_MODULE(_artimit, m) {
  using namespace artimit;
  m.doc() = "Articulatory imitation learning toolkit";

  static py::exception<Error> error(m, "Error", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      PyErr_SetObject(error.ptr(), py::make_tuple(std::string(e.code()), e.what()).ptr());
    }
  });

  m.attr("SAMPLE_RATE") = dsp::kSampleRate;
  m.attr("FRAME_RATE") = dsp::kFrameRate;
  m.attr("PARAM_NAMES") = std::vector<std::string>(artic::kParamNames.begin(), artic::kParamNames.end());

  // Front end.
  m.def("log_mel80", [](const Array& s) { return ToArray(dsp::LogMel80(ToWaveform(s)).frames); },
        py::arg("samples"), "T x 80 log-mel features of 16 kHz samples.");
  m.def("mfcc39", [](const Array& s) { return ToArray(dsp::Mfcc39(ToWaveform(s)).frames); },
        py::arg("samples"), "T x 39 MFCCs with deltas, z-scored per utterance.");
  m.def("extract_source", [](const Array& s) { return ToArray(dsp::ExtractSource(ToWaveform(s)).frames); },
        py::arg("samples"), "T x 2 pitch period (samples) and harmonicity.");
  m.def("frame_count", &dsp::FrameCount, py::arg("num_samples"));

  // Files.
  m.def("read_wav", [](const std::filesystem::path& p) {
    const dsp::Waveform w = store::ReadWav(p);
    return py::array_t<double>(static_cast<py::ssize_t>(w.samples.size()), w.samples.data());
  }, py::arg("path"));
  m.def("write_wav", [](const std::filesystem::path& p, const Array& s) { store::WriteWav(p, ToWaveform(s)); },
        py::arg("path"), py::arg("samples"));
  m.def("read_features", [](const std::filesystem::path& p) {
    const dsp::FeatureSequence f = store::ReadFeatures(p);
    return py::make_tuple(ToArray(f.frames), dsp::FeatureKindName(f.kind), f.frame_rate);
  }, py::arg("path"), "Returns (frames, kind, frame_rate).");
  m.def("write_features", [](const std::filesystem::path& p, const Array& frames, const std::string& kind) {
    store::WriteFeatures(p, {ToMatrix(frames), dsp::kFrameRate, dsp::ParseFeatureKind(kind)});
  }, py::arg("path"), py::arg("frames"), py::arg("kind") = "external");

  // Synthesis.
  m.def("tract_forward", [](const Array& artic, const Array& source, double speaker_scale) {
    synth::TractConfig cfg;
    cfg.speaker_scale = speaker_scale;
    return ToArray(synth::TractForward(ToMatrix(artic), ToMatrix(source), cfg));
  }, py::arg("artic"), py::arg("source"), py::arg("speaker_scale") = 1.0,
     "Analytic synthesizer: T x 6 trajectory and T x 2 source to T x 80 log-mel.");
  m.def("vtln_warp", [](const Array& log_mel, double scale) {
    return ToArray(synth::VtlnWarp(ToMatrix(log_mel), scale));
  }, py::arg("log_mel"), py::arg("scale"));
  m.def("generate_corpus", [](std::size_t speakers, std::size_t items_per_speaker, std::uint64_t seed) {
    synth::CorpusConfig cfg;
    cfg.speakers = speakers;
    cfg.items_per_speaker = items_per_speaker;
    py::list out;
    for (const auto& u : synth::GenerateCorpus(cfg, seed)) out.append(UtteranceDict(u));
    return out;
  }, py::arg("speakers") = 1, py::arg("items_per_speaker") = 300, py::arg("seed") = 0);

  // Guided PCA.
  py::class_<artic::GuidedPcaModel>(m, "GuidedPca")
      .def_static("fit", [](const std::vector<std::string>& channels, const Array& samples, double rate) {
        const artic::EmaRecording e = artic::ResampleTo50Hz({channels, ToMatrix(samples), rate});
        return artic::GpcaFit(e, artic::DefaultGpcaSpec());
      }, py::arg("channels"), py::arg("samples"), py::arg("rate"),
         "Fits the default six-stage spec on EMA samples resampled to 50 Hz.")
      .def_static("load", [](const std::filesystem::path& p) {
        return artic::GpcaFromCheckpoint(store::ReadCheckpoint(p));
      }, py::arg("path"))
      .def("save", [](const artic::GuidedPcaModel& g, const std::filesystem::path& p) {
        store::WriteCheckpoint(p, artic::GpcaToCheckpoint(g));
      }, py::arg("path"))
      .def("encode", [](const artic::GuidedPcaModel& g, const Array& samples) {
        return ToArray(artic::GpcaEncode({g.channels, ToMatrix(samples), artic::kTargetRate}, g).frames);
      }, py::arg("samples"), "50 Hz EMA samples to T x 6 parameters.")
      .def("decode", [](const artic::GuidedPcaModel& g, const Array& params) {
        return ToArray(artic::GpcaDecode({ToMatrix(params), artic::kTargetRate}, g).samples);
      }, py::arg("params"))
      .def_readonly("channels", &artic::GuidedPcaModel::channels)
      .def_readonly("parameters", &artic::GuidedPcaModel::parameters);
  m.def("default_ema_channels", &artic::DefaultEmaChannels);

  // Loss spaces and the inverse model.
  py::class_<imitation::LossSpace>(m, "LossSpace")
      .def(py::init(&MakeSpace), py::arg("name") = "logmel80", py::arg("encoder") = "")
      .def_property_readonly("name", &imitation::LossSpace::name)
      .def_property_readonly("dim", &imitation::LossSpace::dim)
      .def("render", [](imitation::LossSpace& s, const Array& log_mel) {
        return ToArray(s.Render(ToMatrix(log_mel)));
      }, py::arg("log_mel"));
  m.def("imitation_loss", [](const Array& target, const Array& a_hat, const Array& source,
                             imitation::LossSpace& space) {
    imitation::Synthesizer synth = imitation::Synthesizer::Analytic();
    return imitation::ImitationLoss(ToMatrix(target), ToMatrix(a_hat), ToMatrix(source), synth, space);
  }, py::arg("target"), py::arg("a_hat"), py::arg("source"), py::arg("space"),
     "Mean frame cosine distance between the target and the analytic synthesis of a_hat.");
  py::class_<Inverter>(m, "InverseModel")
      .def_static("load", &Inverter::Load, py::arg("path"))
      .def("predict", &Inverter::Predict, py::arg("log_mel"), "T x 80 log-mel to T x 6 trajectory.")
      .def_property_readonly("loss_space", [](const Inverter& i) { return i.space.name(); })
      .def_property_readonly("input_dim", [](const Inverter& i) { return i.model.input_dim; });

  // Evaluation.
  m.def("pearson_per_param", [](const std::vector<Array>& pred, const std::vector<Array>& truth) {
    std::vector<Matrix> p, t;
    for (const Array& a : pred) p.push_back(ToMatrix(a));
    for (const Array& a : truth) t.push_back(ToMatrix(a));
    const eval::CorrelationReport r = eval::PearsonPerParam(p, t);
    py::dict d;
    for (std::size_t c = 0; c < r.names.size(); ++c) d[py::str(r.names[c])] = r.r[c];
    d["mean"] = r.mean;
    return d;
  }, py::arg("pred"), py::arg("truth"), "Pooled per-column Pearson r and their mean.");
  m.def("dtw_distance", [](const Array& x, const Array& y) {
    return eval::DtwDistance(ToMatrix(x), ToMatrix(y));
  }, py::arg("x"), py::arg("y"));
  m.def("wer", &eval::Wer, py::arg("reference"), py::arg("hypothesis"));

  // Command line.
  m.def("run_cli", [](const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = cli::RunCli(args, out, err);
    return py::make_tuple(code, out.str(), err.str());
  }, py::arg("args"), "Runs an artimit subcommand in process; returns (exit_code, stdout, stderr).");
}
