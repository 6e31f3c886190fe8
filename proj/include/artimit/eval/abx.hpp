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

// Place-of-articulation ABX discrimination over VCV items with DTW-aligned
// cosine distances.

#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "artimit/common/phones.hpp"
#include "artimit/graph/matrix.hpp"
#include "artimit/store/text_formats.hpp"

namespace artimit::eval {

/// 1 - cos(a, b), clamped to [0, 2]; 1 when either vector is zero.
double CosineDistance(std::span<const double> a, std::span<const double> b);

/// Mean framewise cosine distance along the cost-minimal monotone path with
/// steps (1,0), (0,1), (1,1) from (0,0) to (T1-1,T2-1), endpoints included.
/// Among equal-cost paths the shortest wins.
double DtwDistance(const Matrix& x, const Matrix& y);

/// One vowel-consonant-vowel item: frames [start, end) of an utterance.
struct AbxItem {
  std::string utterance;
  std::string speaker;
  std::string left_vowel;
  std::string consonant;
  std::string right_vowel;
  Place place = Place::kNone;
  Manner manner = Manner::kOther;
  std::size_t start = 0;
  std::size_t end = 0;
};

/// Every V-C-V run of consecutive segments (vowel, place-bearing consonant,
/// vowel). Segment boundaries are rounded to frames.
std::vector<AbxItem> ExtractVcvItems(const std::string& utterance,
                                     const std::string& speaker,
                                     const std::vector<store::AlignmentSegment>& alignment,
                                     const std::vector<Phone>& inventory,
                                     double frame_rate = 50.0);

enum class AbxMode {
  /// A, B and X come from one speaker.
  kWithinSpeaker,
  /// Triplets pooled over speakers: A, B and X may come from any speaker.
  kAcrossContext,
};

std::string AbxModeName(AbxMode mode);
AbxMode ParseAbxMode(const std::string& name);

/// Indices into the item list. A and X share the consonant (X != A); B has
/// the manner of A, a different place and the vowel context of A. X may sit
/// in any vowel context.
struct AbxTriplet {
  std::size_t a = 0;
  std::size_t b = 0;
  std::size_t x = 0;
};

struct AbxTripletSet {
  std::vector<AbxTriplet> triplets;
  /// Contrasts skipped for lack of items, one message each.
  std::vector<std::string> skipped;
};

/// All valid triplets, ordered by (A consonant, B consonant, a, b, x).
/// `cap_per_contrast` > 0 keeps a seeded subsample of each contrast.
AbxTripletSet BuildAbxTriplets(const std::vector<AbxItem>& items, AbxMode mode,
                               std::size_t cap_per_contrast = 0,
                               std::uint64_t seed = 0);

/// True when the triplet obeys the contrast rule of `mode`.
bool TripletValid(const std::vector<AbxItem>& items, const AbxTriplet& t, AbxMode mode);

struct AbxContrastScore {
  std::string consonant_a;
  std::string consonant_b;
  std::size_t n = 0;
  std::size_t ties = 0;
  double score = 0.0;
};

struct AbxReport {
  double score = 0.0;
  std::size_t n = 0;
  std::size_t ties = 0;
  std::vector<AbxContrastScore> contrasts;
};

/// Frames of one item in the representation under test; raise kMissingItem
/// when unavailable.
using AbxRepresentation = std::function<Matrix(const AbxItem&)>;

/// Correct when d(A,X) < d(B,X); ties count one half.
AbxReport AbxScore(const std::vector<AbxItem>& items,
                   const std::vector<AbxTriplet>& triplets,
                   const AbxRepresentation& representation);

/// CSV "contrast,n,score" with a final "overall" row.
std::string FormatAbxReport(const AbxReport& report);

}  // namespace artimit::eval
