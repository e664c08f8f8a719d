//
// Copyright 2026 The fedlmm Authors
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

#ifndef FEDLMM_RNG_H_
#define FEDLMM_RNG_H_

#include <cstdint>
#include <random>
#include <string_view>

namespace fedlmm {

// Seed derivation. Every random stream in the library is identified by a
// (base seed, stream label) pair so results do not depend on scheduling.
std::uint64_t MixSeed(std::uint64_t base, std::uint64_t stream);
std::uint64_t MixSeed(std::uint64_t base, std::string_view label);

// Portable generator: mt19937_64 has a fully specified output sequence and
// the transforms below are written out here instead of relying on the
// implementation-defined std:: distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t NextU64() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double Uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Standard normal via the Marsaglia polar method.
  double Normal();
  double Normal(double mean, double sd) { return mean + sd * Normal(); }

  // Uniform integer on the closed range [lo, hi].
  std::int64_t UniformInt(std::int64_t lo, std::int64_t hi);

  bool Bernoulli(double p) { return Uniform() < p; }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace fedlmm

#endif  // FEDLMM_RNG_H_
