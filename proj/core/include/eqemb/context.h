// Copyright 2026 The eqemb Authors. All Rights Reserved.
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

#include <algorithm>
#include <cstdint>
#include <vector>

#include "eqemb/corpus.h"

namespace eqemb {

// A stream entry that survives gap removal, with its original position.
struct EffectiveItem {
  std::uint32_t position = 0;
  Item item;
};

// Windows are measured over the effective sequence: gaps never occupy a
// slot, and equations occupy one only when keep_equations is set.
std::vector<EffectiveItem> effective_sequence(const TokenStream& stream,
                                              bool keep_equations);

// Visits every index in [center - radius, center + radius] other than center,
// clamped to [0, size), in ascending order. Windows truncate at document
// boundaries.
template <typename Fn>
void for_each_in_window(std::size_t center, std::size_t radius,
                        std::size_t size, Fn&& fn) {
  const std::size_t lo = center > radius ? center - radius : 0;
  const std::size_t hi = std::min(size, center + radius + 1);
  for (std::size_t j = lo; j < hi; ++j) {
    if (j != center) fn(j);
  }
}

}  // namespace eqemb
