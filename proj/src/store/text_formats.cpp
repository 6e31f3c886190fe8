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

#include "artimit/store/text_formats.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "artimit/common/error.hpp"
#include "artimit/store/binary.hpp"

namespace artimit::artic {

std::size_t EmaRecording::ChannelIndex(const std::string& name) const {
  auto it = std::find(channels.begin(), channels.end(), name);
  if (it == channels.end())
    Fail(ErrorKind::kSchema, "EMA recording lacks channel '" + name + "'");
  return static_cast<std::size_t>(it - channels.begin());
}

void ValidateEma(const EmaRecording& e) {
  if (!(e.rate > 0.0)) Fail(ErrorKind::kSchema, "EMA rate must be positive");
  if (e.samples.cols() != e.channels.size())
    Fail(ErrorKind::kSchema, "EMA has " + std::to_string(e.channels.size()) +
                                 " names for " +
                                 std::to_string(e.samples.cols()) + " columns");
  std::vector<std::string> sorted = e.channels;
  std::sort(sorted.begin(), sorted.end());
  auto dup = std::adjacent_find(sorted.begin(), sorted.end());
  if (dup != sorted.end())
    Fail(ErrorKind::kSchema, "duplicate EMA channel '" + *dup + "'");
}

}  // namespace artimit::artic

namespace artimit::store {
namespace {

std::vector<std::string> SplitTabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    out.push_back(line.substr(start, tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return out;
}

std::vector<std::string> Lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    out.push_back(line);
  }
  return out;
}

bool Skippable(const std::string& line) {
  return line.find_first_not_of(" \t") == std::string::npos || line[0] == '#';
}

[[noreturn]] void ParseFail(const std::string& source, std::size_t lineno,
                            const std::string& what) {
  Fail(ErrorKind::kParse,
       source + ":" + std::to_string(lineno) + ": " + what);
}

double ParseReal(const std::string& s, const std::string& source,
                 std::size_t lineno) {
  double v = 0.0;
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v))
    ParseFail(source, lineno, "expected a finite number, got '" + s + "'");
  return v;
}

std::string FormatReal(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace

std::vector<AlignmentSegment> ParseAlignments(
    const std::string& text, const std::string& source,
    const std::set<std::string>* inventory) {
  std::vector<AlignmentSegment> out;
  std::size_t prev_line = 0;
  const std::vector<std::string> lines = Lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t lineno = i + 1;
    if (Skippable(lines[i])) continue;
    const std::vector<std::string> f = SplitTabs(lines[i]);
    if (f.size() != 3)
      ParseFail(source, lineno, "expected start_s<TAB>end_s<TAB>label");
    AlignmentSegment s{ParseReal(f[0], source, lineno),
                       ParseReal(f[1], source, lineno), f[2]};
    if (s.label.empty()) ParseFail(source, lineno, "empty label");
    if (s.start_s < 0.0) ParseFail(source, lineno, "negative start time");
    if (!(s.start_s < s.end_s))
      ParseFail(source, lineno, "segment start must precede its end");
    if (inventory != nullptr && !inventory->contains(s.label))
      ParseFail(source, lineno, "unknown phone symbol '" + s.label + "'");
    if (!out.empty() && s.start_s < out.back().end_s)
      Fail(ErrorKind::kParse,
           source + ": segments at lines " + std::to_string(prev_line) +
               " and " + std::to_string(lineno) + " are out of order or overlap");
    out.push_back(std::move(s));
    prev_line = lineno;
  }
  return out;
}

std::vector<AlignmentSegment> ReadAlignments(
    const std::filesystem::path& path, const std::set<std::string>* inventory) {
  return ParseAlignments(ReadFileText(path), path.string(), inventory);
}

std::string FormatAlignments(const std::vector<AlignmentSegment>& segments) {
  std::string out;
  for (const AlignmentSegment& s : segments)
    out += FormatReal(s.start_s) + "\t" + FormatReal(s.end_s) + "\t" + s.label + "\n";
  return out;
}

void WriteAlignments(const std::filesystem::path& path,
                     const std::vector<AlignmentSegment>& segments) {
  AtomicWriteText(path, FormatAlignments(segments));
}

artic::EmaRecording ParseEma(const std::string& text, const std::string& source) {
  artic::EmaRecording e;
  bool have_rate = false, have_header = false;
  std::vector<double> values;
  std::size_t rows = 0;
  const std::vector<std::string> lines = Lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t lineno = i + 1;
    const std::string& line = lines[i];
    if (line.rfind("#rate=", 0) == 0) {
      if (have_header) ParseFail(source, lineno, "rate pragma after header row");
      e.rate = ParseReal(line.substr(6), source, lineno);
      if (!(e.rate > 0.0)) ParseFail(source, lineno, "rate must be positive");
      have_rate = true;
      continue;
    }
    if (Skippable(line)) continue;
    const std::vector<std::string> f = SplitTabs(line);
    if (!have_header) {
      if (!have_rate) ParseFail(source, lineno, "missing #rate= pragma before header");
      for (const std::string& name : f) {
        if (name.empty()) ParseFail(source, lineno, "empty channel name");
        if (std::find(e.channels.begin(), e.channels.end(), name) != e.channels.end())
          ParseFail(source, lineno, "duplicate channel '" + name + "'");
        e.channels.push_back(name);
      }
      have_header = true;
      continue;
    }
    if (f.size() != e.channels.size())
      ParseFail(source, lineno, "ragged row: " + std::to_string(f.size()) +
                                    " fields for " +
                                    std::to_string(e.channels.size()) + " channels");
    for (const std::string& v : f) values.push_back(ParseReal(v, source, lineno));
    ++rows;
  }
  if (!have_header) ParseFail(source, lines.size(), "missing header row");
  e.samples = Matrix::FromData(rows, e.channels.size(), std::move(values));
  return e;
}

artic::EmaRecording ReadEma(const std::filesystem::path& path) {
  return ParseEma(ReadFileText(path), path.string());
}

std::string FormatEma(const artic::EmaRecording& e) {
  artic::ValidateEma(e);
  std::string out = "#rate=" + FormatReal(e.rate) + "\n";
  for (std::size_t c = 0; c < e.channels.size(); ++c)
    out += (c ? "\t" : "") + e.channels[c];
  out += "\n";
  for (std::size_t t = 0; t < e.samples.rows(); ++t) {
    for (std::size_t c = 0; c < e.samples.cols(); ++c)
      out += (c ? "\t" : "") + FormatReal(e.samples(t, c));
    out += "\n";
  }
  return out;
}

void WriteEma(const std::filesystem::path& path, const artic::EmaRecording& e) {
  AtomicWriteText(path, FormatEma(e));
}

std::vector<std::string> Tokenize(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

std::vector<std::string> ReadTranscript(const std::filesystem::path& path) {
  return Tokenize(ReadFileText(path));
}

const std::filesystem::path& ManifestEntry::path(const std::string& key) const {
  auto it = paths.find(key);
  if (it == paths.end())
    Fail(ErrorKind::kMissingItem,
         "manifest entry '" + id + "' has no " + key + " path");
  return it->second;
}

std::vector<const ManifestEntry*> Manifest::Split(const std::string& split) const {
  std::vector<const ManifestEntry*> out;
  for (const ManifestEntry& e : entries)
    if (split.empty() || e.split == split) out.push_back(&e);
  return out;
}

std::vector<std::string> Manifest::Speakers() const {
  std::set<std::string> s;
  for (const ManifestEntry& e : entries) s.insert(e.speaker);
  return {s.begin(), s.end()};
}

Manifest ParseManifest(const std::string& text, const std::string& source,
                       const std::filesystem::path& base_dir, bool check_paths) {
  Manifest m;
  m.base_dir = base_dir;
  std::set<std::string> ids;
  const std::vector<std::string> lines = Lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t lineno = i + 1;
    if (Skippable(lines[i])) continue;
    const std::vector<std::string> f = SplitTabs(lines[i]);
    if (f.size() < 2 || f[0].empty() || f[1].empty())
      ParseFail(source, lineno, "expected <id><TAB><speaker>[<TAB>key=value...]");
    ManifestEntry e{f[0], f[1], {}, ""};
    if (!ids.insert(e.id).second)
      ParseFail(source, lineno, "duplicate utterance id '" + e.id + "'");
    for (std::size_t k = 2; k < f.size(); ++k) {
      const std::size_t eq = f[k].find('=');
      if (eq == std::string::npos || eq == 0 || eq + 1 == f[k].size())
        ParseFail(source, lineno, "expected key=value, got '" + f[k] + "'");
      const std::string key = f[k].substr(0, eq);
      const std::string value = f[k].substr(eq + 1);
      if (key == "split") {
        if (value != "train" && value != "valid" && value != "test")
          ParseFail(source, lineno, "split must be train, valid or test");
        e.split = value;
        continue;
      }
      if (!kManifestPathKeys.contains(key))
        ParseFail(source, lineno, "unknown manifest key '" + key + "'");
      std::filesystem::path p(value);
      if (p.is_relative()) p = base_dir / p;
      if (check_paths && !std::filesystem::exists(p))
        ParseFail(source, lineno, key + " path does not exist: " + p.string());
      if (!e.paths.emplace(key, p).second)
        ParseFail(source, lineno, "duplicate key '" + key + "'");
    }
    m.entries.push_back(std::move(e));
  }
  return m;
}

Manifest ReadManifest(const std::filesystem::path& path, bool check_paths) {
  return ParseManifest(ReadFileText(path), path.string(),
                       path.parent_path().empty() ? "." : path.parent_path(),
                       check_paths);
}

std::string FormatManifest(const Manifest& m) {
  std::string out = "# id\tspeaker\tkey=value...\n";
  for (const ManifestEntry& e : m.entries) {
    out += e.id + "\t" + e.speaker;
    for (const auto& [key, p] : e.paths) {
      std::filesystem::path rel = p.lexically_relative(m.base_dir);
      const bool inside = !rel.empty() && *rel.begin() != "..";
      out += "\t" + key + "=" + (inside ? rel : p).generic_string();
    }
    if (!e.split.empty()) out += "\tsplit=" + e.split;
    out += "\n";
  }
  return out;
}

void WriteManifest(const std::filesystem::path& path, const Manifest& m) {
  AtomicWriteText(path, FormatManifest(m));
}

}  // namespace artimit::store
