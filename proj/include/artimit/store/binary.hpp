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

// Little-endian byte buffers and atomic file replacement.

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace artimit::store {

using Bytes = std::vector<std::uint8_t>;

class ByteWriter {
 public:
  void U8(std::uint8_t v) { bytes_.push_back(v); }
  void U16(std::uint16_t v);
  void U32(std::uint32_t v);
  void F32(float v);
  void Raw(std::span<const std::uint8_t> data);
  void Text(const std::string& s);

  std::size_t size() const { return bytes_.size(); }
  Bytes& bytes() { return bytes_; }

 private:
  Bytes bytes_;
};

/// Bounds-checked reader; every failure names `source` and the byte offset.
class ByteReader {
 public:
  ByteReader(std::span<const std::uint8_t> data, std::string source)
      : data_(data), source_(std::move(source)) {}

  std::uint8_t U8();
  std::uint16_t U16();
  std::uint32_t U32();
  float F32();
  std::string Text(std::size_t n);
  void Skip(std::size_t n);
  void Seek(std::size_t offset);

  std::size_t offset() const { return offset_; }
  std::size_t remaining() const { return data_.size() - offset_; }
  const std::string& source() const { return source_; }

  [[noreturn]] void Fail(const std::string& what) const;
  [[noreturn]] void FailAt(std::size_t offset, const std::string& what) const;

 private:
  void Need(std::size_t n) const;

  std::span<const std::uint8_t> data_;
  std::string source_;
  std::size_t offset_ = 0;
};

Bytes ReadFileBytes(const std::filesystem::path& path);
std::string ReadFileText(const std::filesystem::path& path);

/// Writes to a sibling temporary file, then renames over `path`.
void AtomicWrite(const std::filesystem::path& path,
                 std::span<const std::uint8_t> data);
void AtomicWriteText(const std::filesystem::path& path, const std::string& text);

}  // namespace artimit::store
