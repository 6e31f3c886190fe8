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

#include <string>
#include <vector>

#include "artimit/graph/matrix.hpp"

namespace artimit::artic {

/// Named EMA coil coordinates: N samples x C channels at `rate` Hz.
struct EmaRecording {
  std::vector<std::string> channels;
  Matrix samples;
  double rate = 200.0;

  std::size_t num_samples() const { return samples.rows(); }
  /// Column of a channel; raises kSchema when absent.
  std::size_t ChannelIndex(const std::string& name) const;
};

/// Unique names, one column per name, positive rate.
void ValidateEma(const EmaRecording& e);

}  // namespace artimit::artic
