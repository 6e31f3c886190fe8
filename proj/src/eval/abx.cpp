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

#include "artimit/eval/abx.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <sstream>
#include <tuple>

#include "artimit/common/error.hpp"

namespace artimit::eval {
namespace {

// Path cost and length; ordered by cost, then length.
struct PathCost {
  double cost = std::numeric_limits<double>::infinity();
  std::size_t length = 0;

  bool operator<(const PathCost& o) const {
    return cost < o.cost || (cost == o.cost && length < o.length);
  }
};

bool SameSpeakerRule(const AbxItem& a, const AbxItem& b, const AbxItem& x, AbxMode mode) {
  return mode == AbxMode::kAcrossContext || (a.speaker == b.speaker && x.speaker == a.speaker);
}

}  // namespace

double CosineDistance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size())
    Fail(ErrorKind::kDimension, "cosine distance between " + std::to_string(a.size()) +
                                    "- and " + std::to_string(b.size()) + "-dim vectors");
  double dot = 0.0, aa = 0.0, bb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    aa += a[i] * a[i];
    bb += b[i] * b[i];
  }
  if (aa == 0.0 || bb == 0.0) return 1.0;
  return std::clamp(1.0 - dot / std::sqrt(aa * bb), 0.0, 2.0);
}

double DtwDistance(const Matrix& x, const Matrix& y) {
  if (x.rows() == 0 || y.rows() == 0)
    Fail(ErrorKind::kEmptySequence, "DTW needs non-empty sequences");
  if (x.cols() != y.cols())
    Fail(ErrorKind::kDimension, "DTW between " + std::to_string(x.cols()) + "- and " +
                                    std::to_string(y.cols()) + "-dim frames");
  const std::size_t n = x.rows(), m = y.rows();
  std::vector<PathCost> acc(n * m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      PathCost best;
      if (i == 0 && j == 0) {
        best = {0.0, 0};
      } else {
        if (i > 0) best = std::min(best, acc[(i - 1) * m + j]);
        if (j > 0) best = std::min(best, acc[i * m + j - 1]);
        if (i > 0 && j > 0) best = std::min(best, acc[(i - 1) * m + j - 1]);
      }
      acc[i * m + j] = {best.cost + CosineDistance(x.row(i), y.row(j)), best.length + 1};
    }
  }
  const PathCost& end = acc.back();
  return end.cost / static_cast<double>(end.length);
}

std::vector<AbxItem> ExtractVcvItems(const std::string& utterance, const std::string& speaker,
                                     const std::vector<store::AlignmentSegment>& alignment,
                                     const std::vector<Phone>& inventory, double frame_rate) {
  auto find = [&](const std::string& label) -> const Phone* {
    for (const Phone& p : inventory)
      if (p.symbol == label) return &p;
    return nullptr;
  };
  std::vector<AbxItem> items;
  for (std::size_t k = 0; k + 2 < alignment.size(); ++k) {
    const Phone* v1 = find(alignment[k].label);
    const Phone* c = find(alignment[k + 1].label);
    const Phone* v2 = find(alignment[k + 2].label);
    if (!v1 || !c || !v2) continue;
    if (v1->manner != Manner::kVowel || v2->manner != Manner::kVowel) continue;
    if (c->manner == Manner::kVowel || c->place == Place::kNone) continue;
    AbxItem it;
    it.utterance = utterance;
    it.speaker = speaker;
    it.left_vowel = v1->symbol;
    it.consonant = c->symbol;
    it.right_vowel = v2->symbol;
    it.place = c->place;
    it.manner = c->manner;
    it.start = static_cast<std::size_t>(std::llround(alignment[k].start_s * frame_rate));
    it.end = static_cast<std::size_t>(std::llround(alignment[k + 2].end_s * frame_rate));
    if (it.end > it.start) items.push_back(std::move(it));
  }
  return items;
}

std::string AbxModeName(AbxMode mode) {
  return mode == AbxMode::kWithinSpeaker ? "within_speaker" : "across_context";
}

AbxMode ParseAbxMode(const std::string& name) {
  if (name == "within_speaker") return AbxMode::kWithinSpeaker;
  if (name == "across_context") return AbxMode::kAcrossContext;
  Fail(ErrorKind::kConfig, "unknown ABX mode '" + name + "'");
}

bool TripletValid(const std::vector<AbxItem>& items, const AbxTriplet& t, AbxMode mode) {
  if (t.a >= items.size() || t.b >= items.size() || t.x >= items.size()) return false;
  const AbxItem& a = items[t.a];
  const AbxItem& b = items[t.b];
  const AbxItem& x = items[t.x];
  return t.x != t.a && a.consonant == x.consonant && a.manner == b.manner &&
         a.place != b.place && a.left_vowel == b.left_vowel &&
         a.right_vowel == b.right_vowel && SameSpeakerRule(a, b, x, mode);
}

AbxTripletSet BuildAbxTriplets(const std::vector<AbxItem>& items, AbxMode mode,
                               std::size_t cap_per_contrast, std::uint64_t seed) {
  std::map<std::string, std::vector<std::size_t>> by_consonant;
  for (std::size_t i = 0; i < items.size(); ++i) by_consonant[items[i].consonant].push_back(i);

  AbxTripletSet out;
  bool any_contrast = false;
  for (const auto& [ca, a_items] : by_consonant) {
    for (const auto& [cb, b_items] : by_consonant) {
      const AbxItem& ra = items[a_items.front()];
      const AbxItem& rb = items[b_items.front()];
      if (ra.manner != rb.manner || ra.place == rb.place) continue;
      any_contrast = true;
      if (a_items.size() < 2 || b_items.size() < 2) {
        out.skipped.push_back("contrast " + ca + "-" + cb + ": " +
                              std::to_string(a_items.size()) + " and " +
                              std::to_string(b_items.size()) + " items");
        continue;
      }
      std::vector<AbxTriplet> contrast;
      for (std::size_t a : a_items)
        for (std::size_t b : b_items)
          for (std::size_t x : a_items) {
            const AbxTriplet t{a, b, x};
            if (TripletValid(items, t, mode)) contrast.push_back(t);
          }
      if (contrast.empty()) {
        out.skipped.push_back("contrast " + ca + "-" + cb + ": no triplet satisfies the " +
                              AbxModeName(mode) + " rule");
        continue;
      }
      if (cap_per_contrast > 0 && contrast.size() > cap_per_contrast) {
        std::mt19937_64 rng(seed ^ std::hash<std::string>{}(ca + "/" + cb));
        std::shuffle(contrast.begin(), contrast.end(), rng);
        contrast.resize(cap_per_contrast);
        std::sort(contrast.begin(), contrast.end(), [](const AbxTriplet& l, const AbxTriplet& r) {
          return std::tie(l.a, l.b, l.x) < std::tie(r.a, r.b, r.x);
        });
      }
      out.triplets.insert(out.triplets.end(), contrast.begin(), contrast.end());
    }
  }
  if (!any_contrast)
    out.skipped.push_back("no consonant pair shares a manner with different places");
  return out;
}

AbxReport AbxScore(const std::vector<AbxItem>& items, const std::vector<AbxTriplet>& triplets,
                   const AbxRepresentation& representation) {
  std::map<std::size_t, Matrix> frames;
  auto rendered = [&](std::size_t i) -> const Matrix& {
    auto it = frames.find(i);
    if (it == frames.end()) it = frames.emplace(i, representation(items.at(i))).first;
    return it->second;
  };
  std::map<std::pair<std::size_t, std::size_t>, double> cache;
  auto distance = [&](std::size_t i, std::size_t j) {
    const auto key = std::minmax(i, j);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, DtwDistance(rendered(i), rendered(j))).first;
    return it->second;
  };

  std::map<std::pair<std::string, std::string>, AbxContrastScore> per;
  std::map<std::pair<std::string, std::string>, double> correct;
  AbxReport rep;
  double total = 0.0;
  for (const AbxTriplet& t : triplets) {
    const double dax = distance(t.a, t.x);
    const double dbx = distance(t.b, t.x);
    const auto key = std::make_pair(items.at(t.a).consonant, items.at(t.b).consonant);
    AbxContrastScore& c = per[key];
    c.consonant_a = key.first;
    c.consonant_b = key.second;
    ++c.n;
    double credit = 0.0;
    if (dax < dbx) {
      credit = 1.0;
    } else if (dax == dbx) {
      credit = 0.5;
      ++c.ties;
      ++rep.ties;
    }
    correct[key] += credit;
    total += credit;
  }
  rep.n = triplets.size();
  rep.score = rep.n ? total / static_cast<double>(rep.n) : 0.0;
  for (auto& [key, c] : per) {
    c.score = correct[key] / static_cast<double>(c.n);
    rep.contrasts.push_back(c);
  }
  return rep;
}

std::string FormatAbxReport(const AbxReport& report) {
  std::ostringstream out;
  out.precision(6);
  out << std::fixed << "contrast,n,score\n";
  for (const AbxContrastScore& c : report.contrasts)
    out << c.consonant_a << '-' << c.consonant_b << ',' << c.n << ',' << c.score << '\n';
  out << "overall," << report.n << ',' << report.score << '\n';
  return out.str();
}

}  // namespace artimit::eval
