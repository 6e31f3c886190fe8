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

#include "artimit/cli/run_config.hpp"

#include <charconv>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "artimit/common/error.hpp"
#include "artimit/store/binary.hpp"

namespace artimit::cli {
namespace {

std::string Trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

template <typename T>
T ParseNumber(const std::string& v, const std::string& where) {
  T out{};
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size())
    Fail(ErrorKind::kConfig, where + "invalid number '" + v + "'");
  return out;
}

}  // namespace

RunConfig ParseRunConfig(const std::string& text, const std::string& source,
                         const std::filesystem::path& base_dir) {
  RunConfig cfg;
  auto path = [&](const std::string& v) {
    std::filesystem::path p(v);
    return p.is_relative() ? base_dir / p : p;
  };
  using Setter = std::function<void(const std::string&, const std::string&)>;
  auto positive = [](double x, const std::string& where) {
    if (!(x > 0.0)) Fail(ErrorKind::kConfig, where + "value must be positive");
    return x;
  };
  const std::map<std::string, Setter> setters = {
      {"seed", [&](const std::string& v, const std::string& w) { cfg.seed = ParseNumber<std::uint64_t>(v, w); }},
      {"epochs", [&](const std::string& v, const std::string& w) { cfg.epochs = ParseNumber<std::size_t>(v, w); }},
      {"batch_size",
       [&](const std::string& v, const std::string& w) {
         cfg.batch_size = ParseNumber<std::size_t>(v, w);
         positive(static_cast<double>(*cfg.batch_size), w);
       }},
      {"lr", [&](const std::string& v, const std::string& w) { cfg.lr = positive(ParseNumber<double>(v, w), w); }},
      {"loss_space",
       [&](const std::string& v, const std::string& w) {
         if (v != "logmel80" && v != "mfcc39" && v != "frozen_encoder")
           Fail(ErrorKind::kConfig, w + "loss_space must be logmel80, mfcc39 or frozen_encoder");
         cfg.loss_space = v;
       }},
      {"encoder", [&](const std::string& v, const std::string&) { cfg.encoder = path(v); }},
      {"synth",
       [&](const std::string& v, const std::string& w) {
         if (v == "analytic") {
           cfg.synth = v;
         } else if (v.rfind("net:", 0) == 0 && v.size() > 4) {
           cfg.synth = "net:" + path(v.substr(4)).string();
         } else {
           Fail(ErrorKind::kConfig, w + "synth must be 'analytic' or 'net:<path>'");
         }
       }},
      {"splits",
       [&](const std::string& v, const std::string& w) {
         const auto comma = v.find(',');
         if (comma == std::string::npos)
           Fail(ErrorKind::kConfig, w + "splits must be '<train>,<valid>' fractions");
         cfg.train_fraction = ParseNumber<double>(Trim(v.substr(0, comma)), w);
         cfg.valid_fraction = ParseNumber<double>(Trim(v.substr(comma + 1)), w);
         if (!(cfg.train_fraction > 0.0) || cfg.valid_fraction < 0.0 ||
             cfg.train_fraction + cfg.valid_fraction > 1.0)
           Fail(ErrorKind::kConfig, w + "split fractions must be positive and sum to at most 1");
       }},
      {"caps", [&](const std::string& v, const std::string& w) { cfg.caps = ParseNumber<std::size_t>(v, w); }},
      {"speakers",
       [&](const std::string& v, const std::string& w) {
         cfg.speakers = ParseNumber<std::size_t>(v, w);
         positive(static_cast<double>(cfg.speakers), w);
       }},
      {"items_per_speaker",
       [&](const std::string& v, const std::string& w) {
         cfg.items_per_speaker = ParseNumber<std::size_t>(v, w);
         positive(static_cast<double>(cfg.items_per_speaker), w);
       }},
      {"vtln",
       [&](const std::string& v, const std::string& w) {
         if (v != "true" && v != "false") Fail(ErrorKind::kConfig, w + "vtln must be true or false");
         cfg.vtln = v == "true";
       }},
      {"abx_mode",
       [&](const std::string& v, const std::string& w) {
         if (v != "within_speaker" && v != "across_context")
           Fail(ErrorKind::kConfig, w + "abx_mode must be within_speaker or across_context");
         cfg.abx_mode = v;
       }},
  };

  std::set<std::string> seen;
  std::istringstream in(text);
  std::string line;
  for (std::size_t n = 1; std::getline(in, line); ++n) {
    const std::string t = Trim(line);
    if (t.empty() || t[0] == '#') continue;
    const std::string where = source + ":" + std::to_string(n) + ": ";
    const auto eq = t.find('=');
    if (eq == std::string::npos) Fail(ErrorKind::kConfig, where + "expected key=value");
    const std::string key = Trim(t.substr(0, eq));
    const std::string value = Trim(t.substr(eq + 1));
    const auto it = setters.find(key);
    if (it == setters.end()) Fail(ErrorKind::kConfig, where + "unknown key '" + key + "'");
    if (!seen.insert(key).second) Fail(ErrorKind::kConfig, where + "repeated key '" + key + "'");
    it->second(value, where + key + ": ");
  }
  if (cfg.loss_space == "frozen_encoder" && cfg.encoder.empty())
    Fail(ErrorKind::kConfig, source + ": loss_space=frozen_encoder requires encoder=<path>");
  if (!cfg.encoder.empty() && !std::filesystem::exists(cfg.encoder))
    Fail(ErrorKind::kConfig, source + ": encoder file " + cfg.encoder.string() + " does not exist");
  if (cfg.synth_is_net() && !std::filesystem::exists(cfg.synth_path()))
    Fail(ErrorKind::kConfig, source + ": synthesizer file " + cfg.synth_path().string() +
                                 " does not exist");
  return cfg;
}

RunConfig ReadRunConfig(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path))
    Fail(ErrorKind::kConfig, "config file " + path.string() + " does not exist");
  return ParseRunConfig(store::ReadFileText(path), path.string(), path.parent_path());
}

}  // namespace artimit::cli
