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

#include <fstream>
#include <random>

#include "artimit/common/error.hpp"
#include "artimit/store/formats.hpp"
#include "artimit/store/text_formats.hpp"
#include "doctest.h"
#include "unit/test_util.hpp"

namespace artimit::store {
namespace {

std::span<const std::uint8_t> S(const Bytes& b) { return {b.data(), b.size()}; }

// Hand-assembled canonical 44-byte-header PCM file.
Bytes RawWav(std::uint16_t format, std::uint16_t channels, std::uint32_t rate,
             std::uint16_t bits, const std::vector<std::int16_t>& samples) {
  ByteWriter w;
  const auto data_bytes = static_cast<std::uint32_t>(2 * samples.size());
  w.Text("RIFF");
  w.U32(36 + data_bytes);
  w.Text("WAVE");
  w.Text("fmt ");
  w.U32(16);
  w.U16(format);
  w.U16(channels);
  w.U32(rate);
  w.U32(rate * channels * bits / 8);
  w.U16(static_cast<std::uint16_t>(channels * bits / 8));
  w.U16(bits);
  w.Text("data");
  w.U32(data_bytes);
  for (std::int16_t s : samples) w.U16(static_cast<std::uint16_t>(s));
  return w.bytes();
}

ErrorKind KindOf(const std::function<void()>& f, std::string* message = nullptr) {
  try {
    f();
  } catch (const Error& e) {
    if (message) *message = e.what();
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::kUsage;
}

TEST_CASE("read_wav: one second of silence") {
  testing::TempDir dir;
  const Bytes b = RawWav(1, 1, 16000, 16, std::vector<std::int16_t>(16000, 0));
  AtomicWrite(dir / "s.wav", S(b));
  dsp::Waveform w = ReadWav(dir / "s.wav");
  CHECK(w.samples == std::vector<double>(16000, 0.0));
  CHECK(w.sample_rate == 16000);
}

TEST_CASE("read_wav: full-scale square wave scales by 1/32768") {
  std::vector<std::int16_t> sq;
  for (int i = 0; i < 320; ++i) sq.push_back((i / 40) % 2 ? -32767 : 32767);
  dsp::Waveform w = DecodeWav(S(RawWav(1, 1, 16000, 16, sq)), "sq");
  for (std::size_t i = 0; i < sq.size(); ++i)
    CHECK(std::abs(w.samples[i]) == 32767.0 / 32768.0);
}

TEST_CASE("read_wav rejects unsupported layouts explicitly") {
  std::string msg;
  std::vector<std::int16_t> s(64, 0);
  CHECK(KindOf([&] { DecodeWav(S(RawWav(1, 2, 16000, 16, s)), "st"); }, &msg) ==
        ErrorKind::kUnsupportedFormat);
  CHECK(msg.find("channels") != std::string::npos);
  CHECK(KindOf([&] { DecodeWav(S(RawWav(1, 1, 44100, 16, s)), "r"); }, &msg) ==
        ErrorKind::kUnsupportedFormat);
  CHECK(msg.find("44100") != std::string::npos);
  CHECK(KindOf([&] { DecodeWav(S(RawWav(3, 1, 16000, 16, s)), "f"); }) ==
        ErrorKind::kUnsupportedFormat);
  CHECK(KindOf([&] { DecodeWav(S(RawWav(1, 1, 16000, 8, s)), "b"); }) ==
        ErrorKind::kUnsupportedFormat);
  Bytes cut = RawWav(1, 1, 16000, 16, s);
  cut.resize(cut.size() - 10);
  CHECK(KindOf([&] { DecodeWav(S(cut), "cut"); }) == ErrorKind::kFormat);
  Bytes junk = {'R', 'I', 'F', 'X'};
  CHECK(KindOf([&] { DecodeWav(S(junk), "j"); }) == ErrorKind::kFormat);
}

TEST_CASE("wav encode/decode round trip on quantized samples") {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> d(-32768, 32767);
  dsp::Waveform w;
  for (int i = 0; i < 1000; ++i) w.samples.push_back(d(rng) / 32768.0);
  CHECK(DecodeWav(S(EncodeWav(w)), "rt").samples == w.samples);
}

TEST_CASE("feature header layout is exact") {
  dsp::FeatureSequence f{Matrix::FromRows({{1.5, -2.0}}), 50.0,
                         dsp::FeatureKind::kExternal};
  const Bytes b = EncodeFeatures(f);
  REQUIRE(b.size() == kFeatureHeaderBytes + 8);
  const Bytes expected = {'F', 'T', 'R', '1', 1, 0, 0, 0, 2, 0, 0, 0,
                          0, 0, 0x48, 0x42,  // 50.0f
                          2, 0, 0, 0,
                          0, 0, 0xc0, 0x3f,  // 1.5f
                          0, 0, 0, 0xc0};    // -2.0f
  CHECK(b == expected);
}

TEST_CASE("feature files round-trip to f32 precision") {
  testing::TempDir dir;
  std::mt19937_64 rng(2);
  for (auto [kind, dim] : {std::pair{dsp::FeatureKind::kMfcc39, 39},
                           std::pair{dsp::FeatureKind::kLogMel80, 80},
                           std::pair{dsp::FeatureKind::kExternal, 768}}) {
    dsp::FeatureSequence f{testing::RandomMatrix(7, dim, rng, -30, 30), 50.0, kind};
    WriteFeatures(dir / "f.ftr", f);
    dsp::FeatureSequence g = ReadFeatures(dir / "f.ftr");
    CHECK(g.kind == kind);
    CHECK(g.dim() == static_cast<std::size_t>(dim));
    CHECK(g.frame_rate == 50.0);
    CHECK(g.frames == RoundToF32(f.frames));
  }
  for (const auto& entry : std::filesystem::directory_iterator(dir.path()))
    CHECK(entry.path().filename() == "f.ftr");
}

TEST_CASE("feature reader diagnostics carry byte offsets") {
  dsp::FeatureSequence f{Matrix(3, 39, 0.25), 50.0, dsp::FeatureKind::kMfcc39};
  Bytes b = EncodeFeatures(f);
  std::string msg;

  Bytes bad_magic = b;
  bad_magic[0] = 'X';
  CHECK(KindOf([&] { DecodeFeatures(S(bad_magic), "m"); }, &msg) == ErrorKind::kFormat);
  CHECK(msg.find("magic") != std::string::npos);

  Bytes truncated = b;
  truncated.resize(b.size() - 3);
  CHECK(KindOf([&] { DecodeFeatures(S(truncated), "t"); }, &msg) == ErrorKind::kFormat);
  CHECK(msg.find("byte offset " + std::to_string(truncated.size())) != std::string::npos);

  Bytes contradiction = b;
  contradiction[8] = 40;
  CHECK(KindOf([&] { DecodeFeatures(S(contradiction), "k"); }, &msg) == ErrorKind::kFormat);
  CHECK(msg.find("byte offset 8") != std::string::npos);

  Bytes trailing = b;
  trailing.push_back(0);
  CHECK(KindOf([&] { DecodeFeatures(S(trailing), "x"); }) == ErrorKind::kFormat);

  Bytes short_header(b.begin(), b.begin() + 10);
  CHECK(KindOf([&] { DecodeFeatures(S(short_header), "h"); }) == ErrorKind::kFormat);
}

TEST_CASE("checkpoint round trip keeps schema, attributes and tensors") {
  testing::TempDir dir;
  std::mt19937_64 rng(3);
  Checkpoint c;
  c.schema = "probe";
  c.attributes["classes"] = "3";
  c.attributes["note"] = "two words";
  c.tensors["w"] = testing::RandomMatrix(4, 3, rng);
  c.tensors["b"] = testing::RandomMatrix(1, 3, rng);
  c.tensors["empty"] = Matrix(0, 5);
  WriteCheckpoint(dir / "c.ckp", c);
  Checkpoint d = ReadCheckpoint(dir / "c.ckp");
  CHECK(d.schema == "probe");
  CHECK(d.attributes == c.attributes);
  CHECK(d.tensor("w") == RoundToF32(c.tensors["w"]));
  CHECK(d.tensor("b") == RoundToF32(c.tensors["b"]));
  CHECK(d.tensor("empty").rows() == 0);
  CHECK(d.tensor("empty").cols() == 5);
  CHECK_THROWS_AS(RequireSchema(d, "inverse_model"), Error);
}

Bytes HandCheckpoint(const std::string& meta, std::size_t data_bytes) {
  ByteWriter w;
  w.Text("CKP1");
  w.U32(static_cast<std::uint32_t>(meta.size()));
  w.Text(meta);
  for (std::size_t i = 0; i < data_bytes; ++i) w.U8(0);
  return w.bytes();
}

TEST_CASE("checkpoint manifest validation") {
  std::string msg;
  CHECK(KindOf([&] {
          DecodeCheckpoint(S(HandCheckpoint("schema probe\ntensor a 2 2 0\n"
                                            "tensor b 1 2 8\n", 24)), "o");
        }, &msg) == ErrorKind::kFormat);
  CHECK(msg.find("overlaps") != std::string::npos);
  CHECK(KindOf([&] {
          DecodeCheckpoint(S(HandCheckpoint("schema probe\ntensor a 2 2 0\n", 12)), "b");
        }, &msg) == ErrorKind::kFormat);
  CHECK(msg.find("past end") != std::string::npos);
  CHECK(KindOf([&] {
          DecodeCheckpoint(S(HandCheckpoint("schema nonsense\n", 0)), "s");
        }) == ErrorKind::kFormat);
  CHECK(KindOf([&] {
          DecodeCheckpoint(S(HandCheckpoint("tensor a 1 1 0\n", 4)), "n");
        }) == ErrorKind::kFormat);
  Bytes bad = HandCheckpoint("schema probe\n", 0);
  bad[3] = '2';
  CHECK(KindOf([&] { DecodeCheckpoint(S(bad), "m"); }) == ErrorKind::kFormat);
  Checkpoint ok = DecodeCheckpoint(
      S(HandCheckpoint("schema probe\ntensor b 1 1 4\ntensor a 1 1 0\n", 8)), "ok");
  CHECK(ok.tensors.size() == 2);
}

TEST_CASE("parameters load back with shape checks") {
  std::mt19937_64 rng(4);
  ParameterSet p;
  p.Add("w", testing::RandomMatrix(2, 3, rng));
  Checkpoint c;
  c.schema = "probe";
  StoreParameters(p, "m.", c);
  ParameterSet q;
  q.Add("w", Matrix(2, 3));
  LoadParameters(c, "m.", q);
  CHECK(q.at("w").value == p.at("w").value);
  ParameterSet wrong;
  wrong.Add("w", Matrix(3, 2));
  CHECK_THROWS_AS(LoadParameters(c, "m.", wrong), Error);
}

TEST_CASE("alignments: empty, comments and exact round trip") {
  CHECK(ParseAlignments("", "e").empty());
  auto segs = ParseAlignments("# header\n0\t0.1\ta\n\n0.1\t0.22\tp\n", "c");
  REQUIRE(segs.size() == 2);
  CHECK(segs[1].start_s == 0.1);
  CHECK(segs[1].label == "p");

  std::vector<AlignmentSegment> frames;
  for (int k = 0; k < 50; ++k)
    frames.push_back({0.02 * k, 0.02 * (k + 1), k % 2 ? "a" : "t"});
  auto back = ParseAlignments(FormatAlignments(frames), "rt");
  REQUIRE(back.size() == frames.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].start_s == frames[i].start_s);
    CHECK(back[i].end_s == frames[i].end_s);
    CHECK(back[i].label == frames[i].label);
  }
}

TEST_CASE("alignment validation reports line numbers") {
  std::string msg;
  CHECK(KindOf([&] { ParseAlignments("0\t0.2\ta\n# c\n0.1\t0.3\tp\n", "o"); }, &msg) ==
        ErrorKind::kParse);
  CHECK(msg.find("lines 1 and 3") != std::string::npos);
  CHECK(KindOf([&] { ParseAlignments("0.5\t0.6\ta\n0.1\t0.2\tp\n", "r"); }, &msg) ==
        ErrorKind::kParse);
  CHECK(msg.find("lines 1 and 2") != std::string::npos);
  CHECK(KindOf([&] { ParseAlignments("0.2\t0.2\ta\n", "z"); }, &msg) == ErrorKind::kParse);
  CHECK(msg.find("z:1:") != std::string::npos);
  CHECK(KindOf([&] { ParseAlignments("0\tx\ta\n", "n"); }) == ErrorKind::kParse);
  CHECK(KindOf([&] { ParseAlignments("0 0.1 a\n", "t"); }) == ErrorKind::kParse);
  const std::set<std::string> inv = {"a", "p"};
  CHECK(KindOf([&] { ParseAlignments("0\t0.1\ta\n0.1\t0.2\tq\n", "i", &inv); }, &msg) ==
        ErrorKind::kParse);
  CHECK(msg.find("i:2:") != std::string::npos);
  CHECK(ParseAlignments("0\t0.1\ta\n0.1\t0.2\tq\n", "i").size() == 2);
}

TEST_CASE("EMA parse, validation and round trip") {
  const std::string text = "#rate=200\nli_y\tul_x\n1\t2\n3.5\t-4\n";
  artic::EmaRecording e = ParseEma(text, "e");
  CHECK(e.rate == 200.0);
  CHECK(e.channels == std::vector<std::string>{"li_y", "ul_x"});
  CHECK(e.samples == Matrix::FromRows({{1, 2}, {3.5, -4}}));
  CHECK(e.ChannelIndex("ul_x") == 1);
  CHECK_THROWS_AS(e.ChannelIndex("tt_x"), Error);
  CHECK(ParseEma(FormatEma(e), "rt").samples == e.samples);

  std::string msg;
  CHECK(KindOf([&] { ParseEma("#rate=200\na\tb\n1\t2\n3\n", "r"); }, &msg) ==
        ErrorKind::kParse);
  CHECK(msg.find("r:4:") != std::string::npos);
  CHECK(KindOf([&] { ParseEma("a\tb\n1\t2\n", "m"); }) == ErrorKind::kParse);
  CHECK(KindOf([&] { ParseEma("#rate=200\na\ta\n", "d"); }) == ErrorKind::kParse);
}

TEST_CASE("transcripts tokenize on whitespace") {
  CHECK(Tokenize("  the cat\n sat\t") == std::vector<std::string>{"the", "cat", "sat"});
  CHECK(Tokenize("").empty());
}

TEST_CASE("manifest parse, validation and round trip") {
  testing::TempDir dir;
  std::ofstream(dir / "a.ftr") << "x";
  std::ofstream(dir / "a.tsv") << "";
  const std::string text =
      "# comment\nu1\tspk1\tfeatures=a.ftr\talignment=a.tsv\tsplit=train\n"
      "u2\tspk2\tsplit=test\n";
  Manifest m = ParseManifest(text, "m", dir.path(), true);
  REQUIRE(m.entries.size() == 2);
  CHECK(m.entries[0].path("features") == dir / "a.ftr");
  CHECK(m.entries[0].split == "train");
  CHECK(m.Split("test").size() == 1);
  CHECK(m.Speakers() == std::vector<std::string>{"spk1", "spk2"});
  CHECK_THROWS_AS(m.entries[1].path("wav"), Error);

  WriteManifest(dir / "m.tsv", m);
  Manifest back = ReadManifest(dir / "m.tsv");
  REQUIRE(back.entries.size() == 2);
  CHECK(back.entries[0].paths == m.entries[0].paths);

  std::string msg;
  CHECK(KindOf([&] { ParseManifest("u\ts\nu\ts\n", "d", dir.path(), true); }, &msg) ==
        ErrorKind::kParse);
  CHECK(msg.find("d:2:") != std::string::npos);
  CHECK(KindOf([&] { ParseManifest("u\ts\tfoo=bar\n", "k", dir.path(), false); }) ==
        ErrorKind::kParse);
  CHECK(KindOf([&] { ParseManifest("u\ts\twav=missing.wav\n", "p", dir.path(), true); }) ==
        ErrorKind::kParse);
  CHECK(ParseManifest("u\ts\twav=missing.wav\n", "p", dir.path(), false).entries.size() == 1);
  CHECK(KindOf([&] { ParseManifest("u\ts\tsplit=dev\n", "s", dir.path(), false); }) ==
        ErrorKind::kParse);
}

}  // namespace
}  // namespace artimit::store
