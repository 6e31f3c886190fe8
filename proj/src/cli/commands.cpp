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

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>

#include "artimit/artic/gpca.hpp"
#include "artimit/cli/cli.hpp"
#include "artimit/cli/run_config.hpp"
#include "artimit/common/error.hpp"
#include "artimit/common/phones.hpp"
#include "artimit/dsp/frontend.hpp"
#include "artimit/eval/abx.hpp"
#include "artimit/eval/metrics.hpp"
#include "artimit/eval/probe.hpp"
#include "artimit/imitation/imitation.hpp"
#include "artimit/imitation/loss_space.hpp"
#include "artimit/store/formats.hpp"
#include "artimit/store/text_formats.hpp"
#include "artimit/synth/corpus.hpp"
#include "artimit/synth/net.hpp"

namespace artimit::cli {
namespace {

namespace fs = std::filesystem;

/// A directory argument stands for its manifest.tsv.
store::Manifest LoadManifest(const fs::path& arg) {
  return store::ReadManifest(fs::is_directory(arg) ? arg / "manifest.tsv" : arg);
}

/// "all" selects every entry, including entries without a split.
std::vector<const store::ManifestEntry*> SelectSplit(const store::Manifest& m,
                                                     const std::string& split) {
  return m.Split(split == "all" ? "" : split);
}

std::map<std::string, const store::ManifestEntry*> IndexById(const store::Manifest& m) {
  std::map<std::string, const store::ManifestEntry*> index;
  for (const store::ManifestEntry& e : m.entries) index[e.id] = &e;
  return index;
}

const store::ManifestEntry& Lookup(
    const std::map<std::string, const store::ManifestEntry*>& index, const std::string& id,
    const std::string& what) {
  const auto it = index.find(id);
  if (it == index.end()) Fail(ErrorKind::kMissingItem, what + " has no item '" + id + "'");
  return *it->second;
}

dsp::FeatureSequence External(const Matrix& frames) {
  return {frames, dsp::kFrameRate, dsp::FeatureKind::kExternal};
}

void WriteReport(const std::string& text, const std::string& out_path, std::ostream& out,
                 const std::string& summary) {
  if (out_path.empty()) {
    out << text;
  } else {
    store::AtomicWriteText(out_path, text);
    out << summary << '\n';
  }
}

imitation::LossSpace BuildLossSpace(const RunConfig& cfg, const store::Manifest& m) {
  switch (imitation::ParseLossSpaceKind(cfg.loss_space)) {
    case imitation::LossSpaceKind::kLogMel80:
      return imitation::LossSpace::LogMel();
    case imitation::LossSpaceKind::kMfcc39:
      return imitation::LossSpace::Mfcc(imitation::FitCorpusCepstralStats(m, "train"));
    case imitation::LossSpaceKind::kFrozenEncoder:
      return imitation::LossSpace::Encoder(imitation::LoadFrozenEncoder(cfg.encoder));
  }
  Fail(ErrorKind::kConfig, "unknown loss space '" + cfg.loss_space + "'");
}

imitation::Synthesizer BuildSynthesizer(const RunConfig& cfg) {
  if (!cfg.synth_is_net()) return imitation::Synthesizer::Analytic();
  return imitation::Synthesizer::Net(
      synth::SynthNetFromCheckpoint(store::ReadCheckpoint(cfg.synth_path())));
}

RunConfig OptionalConfig(const std::string& path) {
  return path.empty() ? RunConfig{} : ReadRunConfig(path);
}

// Subcommand implementations. Each validates every input before it writes.

void ExtractFeatures(const std::string& in, const std::string& kind, const std::string& out_path) {
  const dsp::Waveform w = store::ReadWav(in);
  const dsp::FeatureSequence f = dsp::ParseFeatureKind(kind) == dsp::FeatureKind::kMfcc39
                                     ? dsp::Mfcc39(w)
                                     : dsp::LogMel80(w);
  store::WriteFeatures(out_path, f);
}

void ExtractSourceTrack(const std::string& in, const std::string& out_path) {
  store::WriteFeatures(out_path, External(dsp::ExtractSource(store::ReadWav(in)).frames));
}

void FitGpca(const std::string& manifest, const std::string& spec_path,
             const std::string& split, const std::string& out_path, std::ostream& out) {
  const artic::GuidedPcaSpec spec =
      spec_path.empty()
          ? artic::DefaultGpcaSpec()
          : artic::ParseGpcaSpec(store::ReadFileText(spec_path), spec_path);
  artic::ValidateGpcaSpec(spec);
  const store::Manifest m = LoadManifest(manifest);
  std::optional<artic::EmaRecording> pooled;
  std::vector<Matrix> parts;
  for (const store::ManifestEntry* e : SelectSplit(m, split)) {
    if (!e->has("ema")) continue;
    artic::EmaRecording r = artic::ResampleTo50Hz(store::ReadEma(e->path("ema")));
    if (!pooled) {
      pooled = r;
    } else if (r.channels != pooled->channels) {
      Fail(ErrorKind::kSchema, "item " + e->id + ": EMA channels differ from the first recording");
    }
    parts.push_back(std::move(r.samples));
  }
  if (!pooled) Fail(ErrorKind::kEmptySequence, "no EMA recordings in split '" + split + "'");
  pooled->samples = VStack(parts);
  const artic::GuidedPcaModel model = artic::GpcaFit(*pooled, spec);
  store::WriteCheckpoint(out_path, artic::GpcaToCheckpoint(model));
  out << "fitted " << model.num_stages() << " stages on " << pooled->num_samples()
      << " frames from " << parts.size() << " recordings\n";
}

void ApplyGpca(const std::string& ckpt, const std::string& in, const std::string& out_path) {
  const artic::GuidedPcaModel model = artic::GpcaFromCheckpoint(store::ReadCheckpoint(ckpt));
  const artic::EmaRecording e = artic::ResampleTo50Hz(store::ReadEma(in));
  store::WriteFeatures(out_path, External(artic::GpcaEncode(e, model).frames));
}

void GenSynthetic(const std::string& config, std::optional<std::uint64_t> seed,
                  const std::string& outdir, std::ostream& out) {
  const RunConfig cfg = ReadRunConfig(config);
  synth::CorpusConfig cc;
  cc.speakers = cfg.speakers;
  cc.items_per_speaker = cfg.items_per_speaker;
  cc.train_fraction = cfg.train_fraction;
  cc.valid_fraction = cfg.valid_fraction;
  synth::ValidateCorpusConfig(cc);
  const auto corpus = synth::GenerateCorpus(cc, seed.value_or(cfg.seed));
  synth::WriteCorpus(outdir, corpus, cfg.vtln);
  out << "wrote " << corpus.size() << " utterances to " << (fs::path(outdir) / "manifest.tsv").string()
      << '\n';
}

synth::SynthTrainData SynthData(const store::Manifest& m, const std::string& split) {
  std::vector<Matrix> artic, source, log_mel;
  for (const store::ManifestEntry* e : m.Split(split)) {
    const dsp::FeatureSequence mel = store::ReadFeatures(e->path(e->has("logmel") ? "logmel" : "features"));
    if (mel.kind != dsp::FeatureKind::kLogMel80)
      Fail(ErrorKind::kContract, "item " + e->id + ": synthesizer targets must be log-mel features");
    artic.push_back(store::ReadFeatures(e->path("trajectory")).frames);
    source.push_back(store::ReadFeatures(e->path("source")).frames);
    log_mel.push_back(mel.frames);
    if (artic.back().rows() != mel.num_frames() || source.back().rows() != mel.num_frames())
      Fail(ErrorKind::kDimension, "item " + e->id + ": trajectory, source and log-mel frame counts differ");
  }
  if (artic.empty()) return {Matrix(0, 6), Matrix(0, 2), Matrix(0, 80)};
  return {VStack(artic), VStack(source), VStack(log_mel)};
}

void TrainSynth(const std::string& manifest, const std::string& config,
                const std::string& out_path, std::ostream& out) {
  const RunConfig cfg = OptionalConfig(config);
  synth::SynthTrainConfig sc;
  sc.seed = cfg.seed;
  if (cfg.epochs) sc.epochs = *cfg.epochs;
  if (cfg.batch_size) sc.batch_size = *cfg.batch_size;
  if (cfg.lr) sc.lr = *cfg.lr;
  const store::Manifest m = LoadManifest(manifest);
  const synth::SynthTrainData train = SynthData(m, "train");
  const synth::SynthTrainData valid = SynthData(m, "valid");
  const synth::SynthesizerNet net = synth::TrainSynthesizer(train, valid, sc);
  store::WriteCheckpoint(out_path, synth::SynthNetToCheckpoint(net));
  out << "train_mse,valid_mse\n" << FormatNumber(net.train_loss) << ',' << FormatNumber(net.valid_loss) << '\n';
}

void TrainImitation(const std::string& manifest, const std::string& config,
                    const std::string& out_path, const std::string& log_path, std::ostream& out) {
  const RunConfig cfg = ReadRunConfig(config);
  const store::Manifest m = LoadManifest(manifest);
  imitation::LossSpace space = BuildLossSpace(cfg, m);
  imitation::Synthesizer synth = BuildSynthesizer(cfg);
  imitation::ImitationConfig ic;
  ic.seed = cfg.seed;
  if (cfg.epochs) ic.epochs = *cfg.epochs;
  if (cfg.batch_size) ic.batch_size = *cfg.batch_size;
  if (cfg.lr) ic.lr = *cfg.lr;
  const auto train = imitation::LoadImitationItems(m, "train", space);
  const auto valid = imitation::LoadImitationItems(m, "valid", space);
  const imitation::ImitationRun run = imitation::TrainInverse(train, valid, synth, space, ic);

  store::Checkpoint c = imitation::InverseToCheckpoint(run.model);
  imitation::StoreLossSpace(space, c);
  c.attributes["synthesizer"] = synth.name();
  store::WriteCheckpoint(out_path, c);
  if (!log_path.empty()) store::AtomicWriteText(log_path, imitation::FormatEpochLog(run.log));
  const double train_loss = run.log.empty() ? 0.0 : run.log.back().train_loss;
  const double val_loss = run.log.empty() ? 0.0 : run.log.back().val_loss;
  out << "epochs,train_loss,val_loss,fixed_point_loss,converged\n"
      << run.log.size() << ',' << FormatNumber(train_loss) << ',' << FormatNumber(val_loss) << ','
      << FormatNumber(run.fixed_point_loss) << ',' << (run.converged ? "true" : "false") << '\n';
}

std::string TrajectoryCsv(const Matrix& a) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(6) << "frame";
  for (const std::string& name : artic::kParamNames) s << ',' << name;
  s << '\n';
  for (std::size_t t = 0; t < a.rows(); ++t) {
    s << t;
    for (std::size_t c = 0; c < a.cols(); ++c) s << ',' << a(t, c);
    s << '\n';
  }
  return s.str();
}

void Infer(const std::string& ckpt, const std::string& manifest, const std::string& split,
           const std::string& outdir, std::ostream& out) {
  const store::Checkpoint c = store::ReadCheckpoint(ckpt);
  imitation::InverseModel model = imitation::InverseFromCheckpoint(c);
  imitation::LossSpace space = imitation::LoadLossSpace(c);
  const store::Manifest m = LoadManifest(manifest);
  fs::create_directories(outdir);
  store::Manifest pred;
  pred.base_dir = outdir;
  for (const store::ManifestEntry* e : SelectSplit(m, split)) {
    const dsp::FeatureSequence f = store::ReadFeatures(e->path("features"));
    const dsp::FeatureSequence z{space.RenderInput(f), f.frame_rate, space.feature_kind()};
    const Matrix a = imitation::InverseForward(model, z).frames;
    store::ManifestEntry p = *e;
    for (auto& [key, path] : p.paths) path = fs::absolute(path);
    p.paths["trajectory"] = fs::path(outdir) / (e->id + ".pred.ftr");
    store::WriteFeatures(p.paths["trajectory"], External(a));
    store::AtomicWriteText(fs::path(outdir) / (e->id + ".pred.csv"), TrajectoryCsv(a));
    pred.entries.push_back(std::move(p));
  }
  if (pred.entries.empty()) Fail(ErrorKind::kEmptySequence, "no items in split '" + split + "'");
  store::WriteManifest(fs::path(outdir) / "manifest.tsv", pred);
  out << "wrote " << pred.entries.size() << " trajectories to "
      << (fs::path(outdir) / "manifest.tsv").string() << '\n';
}

void EvalCorr(const std::string& pred_arg, const std::string& truth_arg, const std::string& split,
              const std::string& out_path, std::ostream& out) {
  const store::Manifest pred = LoadManifest(pred_arg);
  const store::Manifest truth = LoadManifest(truth_arg);
  const auto truth_index = IndexById(truth);
  std::vector<Matrix> p, t;
  for (const store::ManifestEntry* e : SelectSplit(pred, split)) {
    p.push_back(store::ReadFeatures(e->path("trajectory")).frames);
    t.push_back(store::ReadFeatures(Lookup(truth_index, e->id, "truth").path("trajectory")).frames);
    if (p.back().rows() != t.back().rows())
      Fail(ErrorKind::kDimension, "item " + e->id + ": prediction has " +
                                      std::to_string(p.back().rows()) + " frames, truth " +
                                      std::to_string(t.back().rows()));
  }
  if (p.empty()) Fail(ErrorKind::kEmptySequence, "no predictions in split '" + split + "'");
  const eval::CorrelationReport r = eval::PearsonPerParam(p, t);
  WriteReport(eval::FormatCorrelation(r), out_path, out, "mean_r," + FormatNumber(r.mean));
}

/// Loads the representation named by `repr` for the entries of a manifest.
class ReprSource {
 public:
  ReprSource(const store::Manifest& m, std::string repr, const std::string& pred_arg)
      : index_(IndexById(m)), repr_(std::move(repr)) {
    if (repr_ == "pred") {
      pred_ = LoadManifest(pred_arg);
      pred_index_ = IndexById(*pred_);
    }
  }

  const Matrix& Frames(const std::string& id) {
    auto it = cache_.find(id);
    if (it != cache_.end()) return it->second;
    Matrix frames;
    if (repr_ == "features") {
      frames = store::ReadFeatures(Lookup(index_, id, "manifest").path("features")).frames;
    } else if (repr_ == "truth") {
      frames = store::ReadFeatures(Lookup(index_, id, "manifest").path("trajectory")).frames;
    } else {
      frames = store::ReadFeatures(Lookup(pred_index_, id, "prediction manifest").path("trajectory")).frames;
    }
    return cache_.emplace(id, std::move(frames)).first->second;
  }

 private:
  std::map<std::string, const store::ManifestEntry*> index_;
  std::string repr_;
  std::optional<store::Manifest> pred_;
  std::map<std::string, const store::ManifestEntry*> pred_index_;
  std::map<std::string, Matrix> cache_;
};

void EvalAbx(const std::string& manifest, const std::string& repr, const std::string& pred_arg,
             const std::string& mode_arg, bool within_speaker, const std::string& config,
             const std::string& split, const std::string& out_path, std::ostream& out,
             std::ostream& err) {
  const RunConfig cfg = OptionalConfig(config);
  const eval::AbxMode mode = within_speaker ? eval::AbxMode::kWithinSpeaker
                             : !mode_arg.empty() ? eval::ParseAbxMode(mode_arg)
                                                 : eval::ParseAbxMode(cfg.abx_mode);
  const store::Manifest m = LoadManifest(manifest);
  ReprSource source(m, repr, pred_arg);
  std::vector<eval::AbxItem> items;
  for (const store::ManifestEntry* e : SelectSplit(m, split)) {
    const auto found = eval::ExtractVcvItems(e->id, e->speaker,
                                             store::ReadAlignments(e->path("alignment")),
                                             DefaultInventory());
    items.insert(items.end(), found.begin(), found.end());
  }
  const eval::AbxTripletSet set = eval::BuildAbxTriplets(items, mode, cfg.caps, cfg.seed);
  for (const std::string& s : set.skipped) err << "warning: " << s << '\n';
  if (set.triplets.empty())
    Fail(ErrorKind::kEmptySequence, "no ABX triplets in split '" + split + "' (" +
                                        std::to_string(items.size()) + " VCV items)");
  const eval::AbxReport report = eval::AbxScore(items, set.triplets, [&](const eval::AbxItem& it) {
    const Matrix& f = source.Frames(it.utterance);
    if (it.end > f.rows())
      Fail(ErrorKind::kDimension, "item " + it.utterance + ": alignment extends past " +
                                      std::to_string(f.rows()) + " frames");
    return f.RowRange(it.start, it.end);
  });
  WriteReport(eval::FormatAbxReport(report), out_path, out,
              "abx," + eval::AbxModeName(mode) + ',' + repr + ',' + std::to_string(report.n) + ',' +
                  FormatNumber(report.score));
}

struct LabeledFrames {
  Matrix features;
  std::vector<std::string> labels;
};

LabeledFrames CollectFrames(const store::Manifest& m, const std::string& split,
                            const std::string& target, ReprSource& source) {
  std::vector<Matrix> parts;
  LabeledFrames out;
  for (const store::ManifestEntry* e : SelectSplit(m, split)) {
    const Matrix& f = source.Frames(e->id);
    std::vector<std::string> labels =
        target == "speaker"
            ? std::vector<std::string>(f.rows(), e->speaker)
            : eval::FrameLabels(store::ReadAlignments(e->path("alignment")), f.rows());
    std::vector<std::size_t> keep;
    for (std::size_t t = 0; t < f.rows(); ++t)
      if (!labels[t].empty()) keep.push_back(t);
    Matrix rows(keep.size(), f.cols());
    for (std::size_t i = 0; i < keep.size(); ++i) {
      for (std::size_t c = 0; c < f.cols(); ++c) rows(i, c) = f(keep[i], c);
      out.labels.push_back(labels[keep[i]]);
    }
    parts.push_back(std::move(rows));
  }
  if (out.labels.empty()) Fail(ErrorKind::kEmptySequence, "no labeled frames in split '" + split + "'");
  out.features = VStack(parts);
  return out;
}

void Probe(const std::string& manifest, const std::string& target, const std::string& repr,
           const std::string& pred_arg, const std::string& config, const std::string& train_split,
           const std::string& test_split, const std::string& out_path, std::ostream& out) {
  const RunConfig cfg = OptionalConfig(config);
  const store::Manifest m = LoadManifest(manifest);
  ReprSource source(m, repr, pred_arg);
  const LabeledFrames train = CollectFrames(m, train_split, target, source);
  const LabeledFrames test = CollectFrames(m, test_split, target, source);
  eval::ProbeConfig pc;
  pc.seed = cfg.seed;
  const eval::ProbeModel model = eval::TrainProbe(train.features, train.labels, pc);
  const double acc = eval::ProbeAccuracy(model, test.features, test.labels);
  std::ostringstream s;
  s << "target,repr,classes,train_frames,test_frames,accuracy\n"
    << target << ',' << repr << ',' << model.classes.size() << ',' << train.labels.size() << ','
    << test.labels.size() << ',' << FormatNumber(acc) << '\n';
  WriteReport(s.str(), out_path, out, "accuracy," + FormatNumber(acc));
}

void WerCommand(const std::string& ref, const std::string& hyp, std::ostream& out) {
  out << FormatNumber(eval::Wer(store::ReadTranscript(ref), store::ReadTranscript(hyp))) << '\n';
}

bool IsUsageKind(ErrorKind kind) {
  return kind == ErrorKind::kConfig || kind == ErrorKind::kUsage;
}

}  // namespace

std::string FormatNumber(double value) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  std::string s(buf, ec == std::errc() ? end : buf);
  if (s.find_first_of(".eni") == std::string::npos) s += ".0";
  return s;
}

int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Articulatory imitation learning toolkit", "artimit"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  const std::vector<std::string> kReprs = {"features", "pred", "truth"};
  const std::vector<std::string> kSplits = {"train", "valid", "test", "all"};

  std::string in, out_path, kind, manifest, spec, ckpt, config, outdir, log_path, pred, truth,
      repr = "features", mode, target, ref, hyp, train_split, test_split;
  std::string fit_split, infer_split, corr_split, abx_split;
  std::optional<std::uint64_t> seed;
  bool within_speaker = false;

  auto* extract = app.add_subcommand("extract-features", "Compute mfcc39 or logmel80 features of a 16 kHz WAV file");
  extract->add_option("--in", in, "Input WAV (16 kHz mono PCM16)")->required();
  extract->add_option("--kind", kind, "Feature kind")->required()->check(CLI::IsMember({"mfcc39", "logmel80"}));
  extract->add_option("--out", out_path, "Output feature file")->required();

  auto* source = app.add_subcommand("extract-source", "Write the pitch-period/harmonicity track of a WAV file");
  source->add_option("--in", in, "Input WAV (16 kHz mono PCM16)")->required();
  source->add_option("--out", out_path, "Output feature file (external, 2 dims)")->required();

  auto* fit = app.add_subcommand("fit-gpca", "Fit guided PCA on the EMA recordings of a manifest");
  fit->add_option("--manifest", manifest, "Manifest file or directory with ema entries")->required();
  fit->add_option("--spec", spec, "Guided PCA stage specification (default: built-in six-stage spec)");
  fit->add_option("--split", fit_split, "Split to fit on")->default_val("all")->check(CLI::IsMember(kSplits));
  fit->add_option("--out", out_path, "Output checkpoint")->required();

  auto* apply = app.add_subcommand("apply-gpca", "Encode an EMA recording into a 50 Hz articulatory trajectory");
  apply->add_option("--ckpt", ckpt, "Guided PCA checkpoint")->required();
  apply->add_option("--in", in, "Input EMA TSV")->required();
  apply->add_option("--out", out_path, "Output trajectory feature file")->required();

  auto* gen = app.add_subcommand("gen-synthetic", "Generate a synthetic VCV corpus with ground-truth trajectories");
  gen->add_option("--config", config, "Run configuration")->required();
  gen->add_option("--seed", seed, "Corpus seed (default: seed from the configuration)");
  gen->add_option("--outdir", outdir, "Output directory")->required();

  auto* tsynth = app.add_subcommand("train-synth", "Train the neural synthesizer on trajectory/log-mel pairs");
  tsynth->add_option("--manifest", manifest, "Manifest file or directory (train and valid splits)")->required();
  tsynth->add_option("--config", config, "Run configuration (seed, epochs, batch_size, lr)");
  tsynth->add_option("--out", out_path, "Output checkpoint")->required();

  auto* timit = app.add_subcommand("train-imitation", "Train the inverse model by imitation through a frozen synthesizer");
  timit->add_option("--manifest", manifest, "Manifest file or directory (train and valid splits)")->required();
  timit->add_option("--config", config, "Run configuration")->required();
  timit->add_option("--out", out_path, "Output checkpoint")->required();
  timit->add_option("--log", log_path, "Per-epoch loss CSV");

  auto* infer = app.add_subcommand("infer", "Predict articulatory trajectories for a manifest");
  infer->add_option("--ckpt", ckpt, "Inverse-model checkpoint")->required();
  infer->add_option("--manifest", manifest, "Manifest file or directory")->required();
  infer->add_option("--split", infer_split, "Split to predict")->default_val("all")->check(CLI::IsMember(kSplits));
  infer->add_option("--outdir", outdir, "Output directory (predictions, CSV dumps, manifest.tsv)")->required();

  auto* corr = app.add_subcommand("eval-corr", "Per-parameter Pearson correlation of predictions against truth");
  corr->add_option("--pred", pred, "Prediction manifest file or directory")->required();
  corr->add_option("--truth", truth, "Ground-truth manifest file or directory")->required();
  corr->add_option("--split", corr_split, "Split to evaluate")->default_val("test")->check(CLI::IsMember(kSplits));
  corr->add_option("--out", out_path, "Write the CSV here instead of standard output");

  auto* abx = app.add_subcommand("eval-abx", "Consonant ABX discriminability of a representation");
  abx->add_option("--manifest", manifest, "Manifest file or directory with alignments")->required();
  abx->add_option("--repr", repr, "Representation")->default_val("features")->check(CLI::IsMember(kReprs));
  abx->add_option("--pred", pred, "Prediction manifest for --repr pred");
  abx->add_option("--mode", mode, "within_speaker or across_context (default: abx_mode from the configuration)")
      ->check(CLI::IsMember({"within_speaker", "across_context"}));
  abx->add_flag("--within-speaker", within_speaker, "Same as --mode within_speaker");
  abx->add_option("--config", config, "Run configuration (seed, caps, abx_mode)");
  abx->add_option("--split", abx_split, "Split to evaluate")->default_val("test")->check(CLI::IsMember(kSplits));
  abx->add_option("--out", out_path, "Write the CSV here instead of standard output");

  auto* probe = app.add_subcommand("probe", "Linear probe accuracy for phone or speaker labels");
  probe->add_option("--manifest", manifest, "Manifest file or directory")->required();
  probe->add_option("--target", target, "Label to predict")->required()->check(CLI::IsMember({"phone", "speaker"}));
  probe->add_option("--repr", repr, "Representation")->default_val("features")->check(CLI::IsMember(kReprs));
  probe->add_option("--pred", pred, "Prediction manifest for --repr pred");
  probe->add_option("--config", config, "Run configuration (seed)");
  probe->add_option("--train-split", train_split, "Split to train on")->default_val("train")->check(CLI::IsMember(kSplits));
  probe->add_option("--test-split", test_split, "Split to evaluate on")->default_val("test")->check(CLI::IsMember(kSplits));
  probe->add_option("--out", out_path, "Write the CSV here instead of standard output");

  auto* wer = app.add_subcommand("wer", "Word error rate of a hypothesis transcript");
  wer->add_option("--ref", ref, "Reference transcript")->required();
  wer->add_option("--hyp", hyp, "Hypothesis transcript")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    std::string message = e.what();
    std::replace(message.begin(), message.end(), '\n', ' ');
    err << "usage: " << message << '\n';
    return kExitUsage;
  }

  try {
    if ((*abx || *probe) && repr == "pred" && pred.empty())
      Fail(ErrorKind::kUsage, "--repr pred requires --pred");
    if (*extract) ExtractFeatures(in, kind, out_path);
    else if (*source) ExtractSourceTrack(in, out_path);
    else if (*fit) FitGpca(manifest, spec, fit_split, out_path, out);
    else if (*apply) ApplyGpca(ckpt, in, out_path);
    else if (*gen) GenSynthetic(config, seed, outdir, out);
    else if (*tsynth) TrainSynth(manifest, config, out_path, out);
    else if (*timit) TrainImitation(manifest, config, out_path, log_path, out);
    else if (*infer) Infer(ckpt, manifest, infer_split, outdir, out);
    else if (*corr) EvalCorr(pred, truth, corr_split, out_path, out);
    else if (*abx) EvalAbx(manifest, repr, pred, mode, within_speaker, config, abx_split, out_path, out, err);
    else if (*probe) Probe(manifest, target, repr, pred, config, train_split, test_split, out_path, out);
    else if (*wer) WerCommand(ref, hyp, out);
  } catch (const Error& e) {
    err << e.code() << ": " << e.what() << '\n';
    return IsUsageKind(e.kind()) ? kExitUsage : kExitFailure;
  } catch (const fs::filesystem_error& e) {
    err << "io: " << e.what() << '\n';
    return kExitFailure;
  } catch (const std::exception& e) {
    err << "internal: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitOk;
}

}  // namespace artimit::cli
