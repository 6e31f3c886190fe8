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

#include "artimit/graph/parameters.hpp"

#include <cstring>

#include "artimit/common/error.hpp"

namespace artimit {

Parameter& ParameterSet::Add(const std::string& name, Matrix value,
                             bool trainable) {
  if (entries_.count(name) != 0)
    Fail(ErrorKind::kContract, "duplicate parameter name '" + name + "'");
  Parameter p;
  p.grad = Matrix(value.rows(), value.cols());
  p.value = std::move(value);
  p.trainable = trainable;
  return entries_.emplace(name, std::move(p)).first->second;
}

Parameter& ParameterSet::at(const std::string& name) {
  auto it = entries_.find(name);
  if (it == entries_.end())
    Fail(ErrorKind::kSchema, "missing parameter '" + name + "'");
  return it->second;
}

const Parameter& ParameterSet::at(const std::string& name) const {
  auto it = entries_.find(name);
  if (it == entries_.end())
    Fail(ErrorKind::kSchema, "missing parameter '" + name + "'");
  return it->second;
}

std::size_t ParameterSet::ScalarCount() const {
  std::size_t n = 0;
  for (const auto& [name, p] : entries_) n += p.value.size();
  return n;
}

void ParameterSet::ZeroGrad() {
  for (auto& [name, p] : entries_) {
    if (!p.grad.SameShape(p.value)) p.grad = Matrix(p.value.rows(), p.value.cols());
    p.grad.Fill(0.0);
    p.grad_ready = true;
  }
}

void ParameterSet::SetTrainable(bool trainable) {
  for (auto& [name, p] : entries_) p.trainable = trainable;
}

std::uint64_t ParameterSet::Checksum() const {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](const void* data, std::size_t n) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= bytes[i];
      h *= 1099511628211ULL;
    }
  };
  for (const auto& [name, p] : entries_) {
    mix(name.data(), name.size());
    const std::uint64_t shape[2] = {p.value.rows(), p.value.cols()};
    mix(shape, sizeof(shape));
    mix(p.value.data(), p.value.size() * sizeof(double));
  }
  return h;
}

Matrix UniformMatrix(std::size_t rows, std::size_t cols, double bound,
                     std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-bound, bound);
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = dist(rng);
  return m;
}

}  // namespace artimit
