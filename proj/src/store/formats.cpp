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

#include "artimit/store/formats.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "artimit/common/error.hpp"

namespace artimit::store {
namespace {

constexpr std::uint16_t kPcmFormat = 1;

std::span<const std::uint8_t> AsSpan(const Bytes& b) { return {b.data(), b.size()}; }

[[noreturn]] void Unsupported(const std::string& source, const std::string& what) {
  Fail(ErrorKind::kUnsupportedFormat, source + ": " + what);
}

}  // namespace

dsp::Waveform DecodeWav(std::span<const std::uint8_t> data,
                        const std::string& source) {
  ByteReader r(data, source);
  if (r.Text(4) != "RIFF") r.FailAt(0, "missing RIFF magic");
  r.U32();
  if (r.Text(4) != "WAVE") r.FailAt(8, "missing WAVE identifier");
  bool have_fmt = false;
  std::uint16_t channels = 0, bits = 0;
  std::uint32_t rate = 0;
  while (r.remaining() >= 8) {
    const std::string id = r.Text(4);
    const std::uint32_t size = r.U32();
    const std::size_t body = r.offset();
    if (id == "fmt ") {
      if (size < 16) r.Fail("fmt chunk shorter than 16 bytes");
      const std::uint16_t format = r.U16();
      channels = r.U16();
      rate = r.U32();
      r.U32();
      r.U16();
      bits = r.U16();
      if (format != kPcmFormat)
        Unsupported(source, "codec " + std::to_string(format) +
                                " is not integer PCM");
      if (channels != 1)
        Unsupported(source, "expected mono audio, got " +
                                std::to_string(channels) + " channels");
      if (rate != dsp::kSampleRate)
        Unsupported(source, "expected 16000 Hz, got " + std::to_string(rate) +
                                " Hz (no resampling is performed)");
      if (bits != 16)
        Unsupported(source, "expected 16-bit samples, got " +
                                std::to_string(bits) + "-bit");
      have_fmt = true;
    } else if (id == "data") {
      if (!have_fmt) r.Fail("data chunk before fmt chunk");
      if (size > r.remaining())
        r.Fail("truncated data chunk: declares " + std::to_string(size) +
               " bytes, " + std::to_string(r.remaining()) + " remain");
      if (size % 2 != 0) r.Fail("odd byte count in 16-bit data chunk");
      dsp::Waveform w;
      w.samples.resize(size / 2);
      for (double& s : w.samples)
        s = static_cast<double>(static_cast<std::int16_t>(r.U16())) / 32768.0;
      if (w.samples.empty()) Fail(ErrorKind::kInputTooShort, source + ": no samples");
      return w;
    }
    r.Seek(std::min(body + size + (size & 1u), data.size()));
  }
  r.Fail(have_fmt ? "missing data chunk" : "missing fmt chunk");
}

dsp::Waveform ReadWav(const std::filesystem::path& path) {
  const Bytes b = ReadFileBytes(path);
  return DecodeWav(AsSpan(b), path.string());
}

Bytes EncodeWav(const dsp::Waveform& w) {
  dsp::ValidateWaveform(w);
  const auto data_bytes = static_cast<std::uint32_t>(2 * w.samples.size());
  ByteWriter out;
  out.Text("RIFF");
  out.U32(36 + data_bytes);
  out.Text("WAVE");
  out.Text("fmt ");
  out.U32(16);
  out.U16(kPcmFormat);
  out.U16(1);
  out.U32(dsp::kSampleRate);
  out.U32(2 * dsp::kSampleRate);
  out.U16(2);
  out.U16(16);
  out.Text("data");
  out.U32(data_bytes);
  for (double s : w.samples) {
    const double q = std::clamp(std::round(s * 32768.0), -32768.0, 32767.0);
    out.U16(static_cast<std::uint16_t>(static_cast<std::int16_t>(q)));
  }
  return std::move(out.bytes());
}

void WriteWav(const std::filesystem::path& path, const dsp::Waveform& w) {
  const Bytes b = EncodeWav(w);
  AtomicWrite(path, AsSpan(b));
}

Bytes EncodeFeatures(const dsp::FeatureSequence& f) {
  dsp::ValidateFeatures(f);
  RequireFinite(f.frames, "feature frames");
  ByteWriter out;
  out.Text("FTR1");
  out.U32(static_cast<std::uint32_t>(f.num_frames()));
  out.U32(static_cast<std::uint32_t>(f.dim()));
  out.F32(static_cast<float>(f.frame_rate));
  out.U32(static_cast<std::uint32_t>(f.kind));
  for (double v : f.frames.values()) out.F32(static_cast<float>(v));
  return std::move(out.bytes());
}

dsp::FeatureSequence DecodeFeatures(std::span<const std::uint8_t> data,
                                    const std::string& source) {
  ByteReader r(data, source);
  if (data.size() < kFeatureHeaderBytes)
    r.FailAt(data.size(), "truncated header: need " +
                              std::to_string(kFeatureHeaderBytes) + " bytes");
  if (r.Text(4) != "FTR1") r.FailAt(0, "bad magic, expected FTR1");
  const std::uint32_t n = r.U32();
  const std::uint32_t dim = r.U32();
  const float rate = r.F32();
  const std::uint32_t code = r.U32();
  if (!(std::isfinite(rate) && rate > 0.0f))
    r.FailAt(12, "frame rate must be positive");
  if (code > 2) r.FailAt(16, "unknown kind code " + std::to_string(code));
  const auto kind = static_cast<dsp::FeatureKind>(code);
  if (kind == dsp::FeatureKind::kMfcc39 && dim != dsp::kMfccDim)
    r.FailAt(8, "kind mfcc39 requires dim 39, header says " + std::to_string(dim));
  if (kind == dsp::FeatureKind::kLogMel80 && dim != dsp::kNumMels)
    r.FailAt(8, "kind logmel80 requires dim 80, header says " + std::to_string(dim));
  if (kind != dsp::FeatureKind::kExternal && rate != dsp::kFrameRate)
    r.FailAt(12, "internal feature kinds require 50 Hz");
  if (dim == 0) r.FailAt(8, "dim must be positive");
  const std::uint64_t body = 4ull * n * dim;
  if (r.remaining() < body)
    r.FailAt(data.size(), "truncated body: expected " + std::to_string(body) +
                              " bytes of frame data, found " +
                              std::to_string(r.remaining()));
  if (r.remaining() > body)
    r.FailAt(kFeatureHeaderBytes + body, "trailing bytes after frame data");
  dsp::FeatureSequence f;
  f.frames = Matrix(n, dim);
  f.frame_rate = rate;
  f.kind = kind;
  for (double& v : f.frames.values()) {
    const std::size_t at = r.offset();
    v = r.F32();
    if (!std::isfinite(v)) r.FailAt(at, "non-finite value");
  }
  return f;
}

void WriteFeatures(const std::filesystem::path& path,
                   const dsp::FeatureSequence& f) {
  const Bytes b = EncodeFeatures(f);
  AtomicWrite(path, AsSpan(b));
}

dsp::FeatureSequence ReadFeatures(const std::filesystem::path& path) {
  const Bytes b = ReadFileBytes(path);
  return DecodeFeatures(AsSpan(b), path.string());
}

const Matrix& Checkpoint::tensor(const std::string& name) const {
  auto it = tensors.find(name);
  if (it == tensors.end())
    Fail(ErrorKind::kFormat, schema + " checkpoint lacks tensor '" + name + "'");
  return it->second;
}

const std::string& Checkpoint::attribute(const std::string& name) const {
  auto it = attributes.find(name);
  if (it == attributes.end())
    Fail(ErrorKind::kFormat, schema + " checkpoint lacks attribute '" + name + "'");
  return it->second;
}

namespace {

bool IsToken(const std::string& s) {
  return !s.empty() && s.find_first_of(" \t\r\n") == std::string::npos;
}

}  // namespace

Bytes EncodeCheckpoint(const Checkpoint& c) {
  if (!kCheckpointSchemas.contains(c.schema))
    Fail(ErrorKind::kFormat, "unknown checkpoint schema '" + c.schema + "'");
  std::ostringstream meta;
  meta << "schema " << c.schema << '\n';
  for (const auto& [k, v] : c.attributes) {
    if (!IsToken(k) || v.find('\n') != std::string::npos)
      Fail(ErrorKind::kFormat, "attribute '" + k + "' is not encodable");
    meta << "attr " << k << ' ' << v << '\n';
  }
  std::size_t offset = 0;
  for (const auto& [name, m] : c.tensors) {
    if (!IsToken(name)) Fail(ErrorKind::kFormat, "tensor name '" + name + "' is not encodable");
    RequireFinite(m, name);
    meta << "tensor " << name << ' ' << m.rows() << ' ' << m.cols() << ' '
         << offset << '\n';
    offset += 4 * m.size();
  }
  const std::string text = meta.str();
  ByteWriter out;
  out.Text("CKP1");
  out.U32(static_cast<std::uint32_t>(text.size()));
  out.Text(text);
  for (const auto& [name, m] : c.tensors)
    for (double v : m.values()) out.F32(static_cast<float>(v));
  return std::move(out.bytes());
}

Checkpoint DecodeCheckpoint(std::span<const std::uint8_t> data,
                            const std::string& source) {
  ByteReader r(data, source);
  if (r.Text(4) != "CKP1") r.FailAt(0, "bad magic, expected CKP1");
  const std::uint32_t meta_len = r.U32();
  if (meta_len > r.remaining())
    r.FailAt(4, "metadata length " + std::to_string(meta_len) +
                    " exceeds file size");
  const std::string text = r.Text(meta_len);
  const std::size_t data_start = r.offset();
  const std::size_t data_size = r.remaining();

  struct Entry {
    std::string name;
    std::size_t rows, cols, offset;
  };
  Checkpoint c;
  std::vector<Entry> entries;
  std::istringstream lines(text);
  std::string line;
  std::size_t lineno = 0;
  auto bad = [&](const std::string& what) {
    Fail(ErrorKind::kFormat,
         source + ": metadata line " + std::to_string(lineno) + ": " + what);
  };
  while (std::getline(lines, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "schema") {
      if (!c.schema.empty()) bad("duplicate schema line");
      ls >> c.schema;
      if (!kCheckpointSchemas.contains(c.schema))
        bad("unknown schema '" + c.schema + "'");
    } else if (tag == "attr") {
      std::string key;
      ls >> key;
      if (key.empty()) bad("attribute without a key");
      std::string value;
      std::getline(ls, value);
      if (!value.empty() && value.front() == ' ') value.erase(0, 1);
      if (!c.attributes.emplace(key, value).second)
        bad("duplicate attribute '" + key + "'");
    } else if (tag == "tensor") {
      Entry e;
      if (!(ls >> e.name >> e.rows >> e.cols >> e.offset))
        bad("malformed tensor entry");
      std::string extra;
      if (ls >> extra) bad("trailing text in tensor entry");
      entries.push_back(e);
    } else {
      bad("unknown record '" + tag + "'");
    }
  }
  if (c.schema.empty()) Fail(ErrorKind::kFormat, source + ": missing schema line");

  std::vector<const Entry*> by_offset;
  for (const Entry& e : entries) by_offset.push_back(&e);
  std::sort(by_offset.begin(), by_offset.end(),
            [](const Entry* a, const Entry* b) { return a->offset < b->offset; });
  std::size_t prev_end = 0;
  std::string prev_name;
  for (const Entry* e : by_offset) {
    const std::size_t bytes = 4 * e->rows * e->cols;
    if (e->offset % 4 != 0)
      r.FailAt(data_start + e->offset, "tensor '" + e->name + "' is misaligned");
    if (e->offset + bytes > data_size)
      r.FailAt(data_start + e->offset,
               "tensor '" + e->name + "' extends past end of data region");
    if (!prev_name.empty() && e->offset < prev_end)
      r.FailAt(data_start + e->offset,
               "tensor '" + e->name + "' overlaps '" + prev_name + "'");
    if (bytes > 0) {
      prev_end = e->offset + bytes;
      prev_name = e->name;
    }
  }
  for (const Entry& e : entries) {
    Matrix m(e.rows, e.cols);
    r.Seek(data_start + e.offset);
    for (double& v : m.values()) {
      const std::size_t at = r.offset();
      v = r.F32();
      if (!std::isfinite(v)) r.FailAt(at, "non-finite value in '" + e.name + "'");
    }
    if (!c.tensors.emplace(e.name, std::move(m)).second)
      Fail(ErrorKind::kFormat, source + ": duplicate tensor '" + e.name + "'");
  }
  return c;
}

void WriteCheckpoint(const std::filesystem::path& path, const Checkpoint& c) {
  const Bytes b = EncodeCheckpoint(c);
  AtomicWrite(path, AsSpan(b));
}

Checkpoint ReadCheckpoint(const std::filesystem::path& path) {
  const Bytes b = ReadFileBytes(path);
  return DecodeCheckpoint(AsSpan(b), path.string());
}

void RequireSchema(const Checkpoint& c, const std::string& schema) {
  if (c.schema != schema)
    Fail(ErrorKind::kFormat,
         "expected a " + schema + " checkpoint, found " + c.schema);
}

void StoreParameters(const ParameterSet& params, const std::string& prefix,
                     Checkpoint& c) {
  for (const auto& [name, p] : params)
    c.tensors[prefix + name] = p.value;
}

void LoadParameters(const Checkpoint& c, const std::string& prefix,
                    ParameterSet& params) {
  for (auto& [name, p] : params) {
    const Matrix& m = c.tensor(prefix + name);
    if (!m.SameShape(p.value))
      Fail(ErrorKind::kFormat, "tensor '" + prefix + name + "' has shape " +
                                   m.ShapeString() + ", expected " +
                                   p.value.ShapeString());
    p.value = m;
  }
}

Matrix RoundToF32(const Matrix& m) {
  Matrix out = m;
  for (double& v : out.values()) v = static_cast<double>(static_cast<float>(v));
  return out;
}

}  // namespace artimit::store
