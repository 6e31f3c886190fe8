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

// Phone inventory shared by the synthetic corpus and the ABX evaluation.

#pragma once

#include <array>
#include <set>
#include <string>
#include <vector>

namespace artimit {

enum class Place { kLabial, kCoronal, kDorsal, kNone };
enum class Manner { kStop, kFricative, kVowel, kOther };

std::string PlaceName(Place p);
std::string MannerName(Manner m);

struct Phone {
  std::string symbol;
  Place place = Place::kNone;
  Manner manner = Manner::kOther;
  /// Articulatory target (JH, TB, TD, TT, LP, LH).
  std::array<double, 6> target{};
};

/// Vowels a, i, u; consonants p f (labial), t s (coronal), k x (dorsal), each
/// place as a stop and a fricative.
const std::vector<Phone>& DefaultInventory();
/// Raises kConfig for an unknown symbol.
const Phone& FindPhone(const std::string& symbol);
std::set<std::string> InventorySymbols();

}  // namespace artimit
