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

#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>

#include "artimit/graph/matrix.hpp"

namespace artimit {

struct Parameter {
  Matrix value;
  Matrix grad;
  // Set once a backward pass (or ZeroGrad) has written the gradient slot;
  // cleared by the optimizer after it consumes the gradient.
  bool grad_ready = false;
  // Frozen parameters are read as constants by the tape and skipped by Adam.
  bool trainable = true;
};

/// Named weights with one gradient slot each. Iteration order is the
/// lexicographic order of names, which keeps every consumer deterministic.
class ParameterSet {
 public:
  using Map = std::map<std::string, Parameter>;

  Parameter& Add(const std::string& name, Matrix value, bool trainable = true);
  Parameter& at(const std::string& name);
  const Parameter& at(const std::string& name) const;
  bool contains(const std::string& name) const {
    return entries_.count(name) != 0;
  }
  std::size_t size() const { return entries_.size(); }
  std::size_t ScalarCount() const;

  Map::iterator begin() { return entries_.begin(); }
  Map::iterator end() { return entries_.end(); }
  Map::const_iterator begin() const { return entries_.begin(); }
  Map::const_iterator end() const { return entries_.end(); }

  void ZeroGrad();
  void SetTrainable(bool trainable);

  /// FNV-1a over names, shapes and the raw bytes of every value.
  std::uint64_t Checksum() const;

 private:
  Map entries_;
};

/// Uniform in [-bound, bound].
Matrix UniformMatrix(std::size_t rows, std::size_t cols, double bound,
                     std::mt19937_64& rng);

}  // namespace artimit
