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

// Text formats: alignment TSV, EMA TSV, transcripts and corpus manifests.

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "artimit/artic/ema.hpp"

namespace artimit::store {

struct AlignmentSegment {
  double start_s = 0.0;
  double end_s = 0.0;
  std::string label;
};

/// Lines "start_s<TAB>end_s<TAB>label"; '#' comments and blank lines skipped.
/// Segments must be ordered and non-overlapping; labels must belong to
/// `inventory` when one is given.
std::vector<AlignmentSegment> ParseAlignments(
    const std::string& text, const std::string& source,
    const std::set<std::string>* inventory = nullptr);
std::vector<AlignmentSegment> ReadAlignments(
    const std::filesystem::path& path,
    const std::set<std::string>* inventory = nullptr);
std::string FormatAlignments(const std::vector<AlignmentSegment>& segments);
void WriteAlignments(const std::filesystem::path& path,
                     const std::vector<AlignmentSegment>& segments);

/// "#rate=<hz>" pragma, a header row of channel names, then one tab-separated
/// row of coordinates per sample.
artic::EmaRecording ParseEma(const std::string& text, const std::string& source);
artic::EmaRecording ReadEma(const std::filesystem::path& path);
std::string FormatEma(const artic::EmaRecording& e);
void WriteEma(const std::filesystem::path& path, const artic::EmaRecording& e);

/// Whitespace-delimited tokens of a UTF-8 text file.
std::vector<std::string> Tokenize(const std::string& text);
std::vector<std::string> ReadTranscript(const std::filesystem::path& path);

// Manifest lines: "<id><TAB><speaker>" followed by tab-separated key=value
// fields. Path keys resolve relative to the manifest's directory; "split"
// takes train, valid or test.
inline const std::set<std::string> kManifestPathKeys = {
    "wav",    "features",  "logmel",     "trajectory", "source",
    "alignment", "transcript", "ema"};

struct ManifestEntry {
  std::string id;
  std::string speaker;
  std::map<std::string, std::filesystem::path> paths;
  std::string split;

  bool has(const std::string& key) const { return paths.contains(key); }
  /// Raises kMissingItem naming the entry when `key` is absent.
  const std::filesystem::path& path(const std::string& key) const;
};

struct Manifest {
  std::filesystem::path base_dir;
  std::vector<ManifestEntry> entries;

  std::vector<const ManifestEntry*> Split(const std::string& split) const;
  std::vector<std::string> Speakers() const;
};

Manifest ParseManifest(const std::string& text, const std::string& source,
                       const std::filesystem::path& base_dir,
                       bool check_paths);
Manifest ReadManifest(const std::filesystem::path& path,
                      bool check_paths = true);
/// Paths are written relative to `m.base_dir` when they lie beneath it.
std::string FormatManifest(const Manifest& m);
void WriteManifest(const std::filesystem::path& path, const Manifest& m);

}  // namespace artimit::store
