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

#ifndef EXPMECH_RNG_H_
#define EXPMECH_RNG_H_

#include <cstdint>
#include <cmath>
#include <random>

namespace expmech {

// Seeded random stream. Uniform variates are formed from the top 53 bits of
// the mt19937_64 output, so draw sequences do not depend on the standard
// library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Independent stream for (root, index), e.g. one per trial or per check.
  static Rng Stream(std::uint64_t root, std::uint64_t index);

  std::uint64_t NextU64() { return engine_(); }

  // Uniform on [0, 1).
  double Uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform on (0, 1).
  double UniformOpen();

  // Uniform integer on [0, bound).
  std::uint64_t Below(std::uint64_t bound);

  double Exponential() { return -std::log(UniformOpen()); }

 private:
  std::mt19937_64 engine_;
};

// SplitMix64 finaliser; used to derive stream seeds.
std::uint64_t MixSeed(std::uint64_t x);

}  // namespace expmech

#endif  // EXPMECH_RNG_H_
