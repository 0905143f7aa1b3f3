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

#include "eqemb/rng.h"

#include <algorithm>
#include <cmath>

#include "eqemb/error.h"

namespace eqemb {

DiscreteSampler::DiscreteSampler(std::span<const double> weights,
                                 double power) {
  cdf_.reserve(weights.size());
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) {
      throw Error(ErrorKind::kInvalidArgument, "negative sampling weight");
    }
    total += power == 0.0 ? 1.0 : std::pow(w, power);
    cdf_.push_back(total);
  }
  if (!cdf_.empty() && !(total > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "sampling weights sum to zero");
  }
}

std::uint32_t DiscreteSampler::sample(Rng& rng) const {
  const double u = rng.uniform01() * cdf_.back();
  auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  if (it == cdf_.end()) --it;
  return static_cast<std::uint32_t>(it - cdf_.begin());
}

}  // namespace eqemb
