// Copyright 2026 The expmech Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "expmech/rng.h"

#include <cmath>

namespace expmech {

std::uint64_t MixSeed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Rng Rng::Stream(std::uint64_t root, std::uint64_t index) {
  return Rng(MixSeed(MixSeed(root) ^ MixSeed(index + 0x632be59bd9b4e019ULL)));
}

double Rng::UniformOpen() {
  double u = 0.0;
  do {
    u = Uniform();
  } while (u == 0.0);
  return u;
}

std::uint64_t Rng::Below(std::uint64_t bound) {
  // Rejection sampling keeps the draw unbiased for any bound.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t x = 0;
  do {
    x = engine_();
  } while (x >= limit);
  return x % bound;
}

}  // namespace expmech
