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

#include "artimit/common/phones.hpp"

#include "artimit/common/error.hpp"

namespace artimit {

std::string PlaceName(Place p) {
  switch (p) {
    case Place::kLabial: return "labial";
    case Place::kCoronal: return "coronal";
    case Place::kDorsal: return "dorsal";
    case Place::kNone: return "none";
  }
  return "none";
}

std::string MannerName(Manner m) {
  switch (m) {
    case Manner::kStop: return "stop";
    case Manner::kFricative: return "fricative";
    case Manner::kVowel: return "vowel";
    case Manner::kOther: return "other";
  }
  return "other";
}

const std::vector<Phone>& DefaultInventory() {
  // Labials drive LH/LP, coronals TT, dorsals TD; fricatives are weaker
  // constrictions at the same place.
  static const std::vector<Phone> inventory = {
      {"a", Place::kNone, Manner::kVowel, {1.2, 0.5, -1.0, 0.0, -0.5, 1.0}},
      {"i", Place::kNone, Manner::kVowel, {-0.8, 0.8, 1.3, 0.6, -0.8, 0.6}},
      {"u", Place::kNone, Manner::kVowel, {-0.6, -0.6, -1.3, -0.6, 1.2, 0.2}},
      {"p", Place::kLabial, Manner::kStop, {0.6, 0.0, 0.0, -0.3, 0.9, -1.6}},
      {"f", Place::kLabial, Manner::kFricative, {0.4, 0.0, 0.0, -0.3, 0.6, -0.9}},
      {"t", Place::kCoronal, Manner::kStop, {0.6, 0.0, 0.0, 1.5, -0.3, 0.3}},
      {"s", Place::kCoronal, Manner::kFricative, {0.4, 0.3, 0.0, 1.0, -0.3, 0.5}},
      {"k", Place::kDorsal, Manner::kStop, {0.5, -0.8, 1.5, -0.5, -0.2, 0.3}},
      {"x", Place::kDorsal, Manner::kFricative, {0.3, -0.5, 1.0, -0.5, -0.2, 0.5}},
  };
  return inventory;
}

const Phone& FindPhone(const std::string& symbol) {
  for (const Phone& p : DefaultInventory())
    if (p.symbol == symbol) return p;
  Fail(ErrorKind::kConfig, "unknown phone symbol '" + symbol + "'");
}

std::set<std::string> InventorySymbols() {
  std::set<std::string> out;
  for (const Phone& p : DefaultInventory()) out.insert(p.symbol);
  return out;
}

}  // namespace artimit
