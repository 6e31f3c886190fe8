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

// key=value run configuration shared by the command-line subcommands.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

namespace artimit::cli {

struct RunConfig {
  std::uint64_t seed = 0;
  /// Unset values fall back to the defaults of the command's trainer.
  std::optional<std::size_t> epochs;
  std::optional<std::size_t> batch_size;
  std::optional<double> lr;
  /// logmel80 | mfcc39 | frozen_encoder
  std::string loss_space = "logmel80";
  /// Frozen-encoder checkpoint; required for loss_space=frozen_encoder.
  std::filesystem::path encoder;
  /// "analytic" or "net:<synthesizer checkpoint>".
  std::string synth = "analytic";
  /// Train/valid fractions of synthetic corpora; the rest is test.
  double train_fraction = 0.8;
  double valid_fraction = 0.1;
  /// ABX triplets kept per contrast (0 keeps all).
  std::size_t caps = 0;
  /// Synthetic corpus shape.
  std::size_t speakers = 1;
  std::size_t items_per_speaker = 300;
  /// Write speaker-normalized (VTLN) log-mel as the features of synthetic corpora.
  bool vtln = false;
  /// within_speaker | across_context
  std::string abx_mode = "across_context";

  bool synth_is_net() const { return synth.rfind("net:", 0) == 0; }
  std::filesystem::path synth_path() const { return synth.substr(4); }
};

/// Comment lines start with '#'. Unknown or repeated keys and invalid values
/// raise kConfig naming the line and key. Relative paths resolve against
/// `base_dir`.
RunConfig ParseRunConfig(const std::string& text, const std::string& source,
                         const std::filesystem::path& base_dir);
RunConfig ReadRunConfig(const std::filesystem::path& path);

}  // namespace artimit::cli
