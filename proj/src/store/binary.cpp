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

#include "artimit/store/binary.hpp"

#include <bit>
#include <fstream>
#include <iterator>
#include <sstream>
#include <unistd.h>

#include "artimit/common/error.hpp"

namespace artimit::store {

void ByteWriter::U16(std::uint16_t v) {
  U8(static_cast<std::uint8_t>(v & 0xff));
  U8(static_cast<std::uint8_t>(v >> 8));
}

void ByteWriter::U32(std::uint32_t v) {
  for (int i = 0; i < 4; ++i) U8(static_cast<std::uint8_t>((v >> (8 * i)) & 0xff));
}

void ByteWriter::F32(float v) { U32(std::bit_cast<std::uint32_t>(v)); }

void ByteWriter::Raw(std::span<const std::uint8_t> data) {
  bytes_.insert(bytes_.end(), data.begin(), data.end());
}

void ByteWriter::Text(const std::string& s) {
  bytes_.insert(bytes_.end(), s.begin(), s.end());
}

void ByteReader::Fail(const std::string& what) const { FailAt(offset_, what); }

void ByteReader::FailAt(std::size_t offset, const std::string& what) const {
  artimit::Fail(ErrorKind::kFormat, source_ + ": byte offset " +
                                        std::to_string(offset) + ": " + what);
}

void ByteReader::Need(std::size_t n) const {
  if (remaining() < n)
    Fail("truncated: need " + std::to_string(n) + " bytes, " +
         std::to_string(remaining()) + " remain");
}

std::uint8_t ByteReader::U8() {
  Need(1);
  return data_[offset_++];
}

std::uint16_t ByteReader::U16() {
  Need(2);
  const auto v = static_cast<std::uint16_t>(data_[offset_] |
                                            (data_[offset_ + 1] << 8));
  offset_ += 2;
  return v;
}

std::uint32_t ByteReader::U32() {
  Need(4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i)
    v |= static_cast<std::uint32_t>(data_[offset_ + i]) << (8 * i);
  offset_ += 4;
  return v;
}

float ByteReader::F32() { return std::bit_cast<float>(U32()); }

std::string ByteReader::Text(std::size_t n) {
  Need(n);
  std::string s(reinterpret_cast<const char*>(data_.data() + offset_), n);
  offset_ += n;
  return s;
}

void ByteReader::Skip(std::size_t n) {
  Need(n);
  offset_ += n;
}

void ByteReader::Seek(std::size_t offset) {
  if (offset > data_.size()) FailAt(offset, "seek past end of data");
  offset_ = offset;
}

Bytes ReadFileBytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorKind::kIo, "cannot open '" + path.string() + "'");
  return Bytes(std::istreambuf_iterator<char>(in),
               std::istreambuf_iterator<char>());
}

std::string ReadFileText(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorKind::kIo, "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void AtomicWrite(const std::filesystem::path& path,
                 std::span<const std::uint8_t> data) {
  std::filesystem::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) Fail(ErrorKind::kIo, "cannot write '" + tmp.string() + "'");
    out.write(reinterpret_cast<const char*>(data.data()),
              static_cast<std::streamsize>(data.size()));
    out.flush();
    if (!out) Fail(ErrorKind::kIo, "write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    Fail(ErrorKind::kIo, "cannot replace '" + path.string() + "'");
  }
}

void AtomicWriteText(const std::filesystem::path& path, const std::string& text) {
  AtomicWrite(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()),
                              text.size()));
}

}  // namespace artimit::store
