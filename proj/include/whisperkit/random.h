// Copyright 2026 The whisperkit Authors.
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

#ifndef WHISPERKIT_RANDOM_H_
#define WHISPERKIT_RANDOM_H_

#include <cstdint>
#include <random>

namespace whisperkit {

// Seeded generator whose outputs are identical on every standard library:
// std::mt19937_64 is fully specified, the std distributions are not, so the
// distributions are implemented here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform integer in [lo, hi], inclusive.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

  // Uniform real in [0, 1) with 53 random bits.
  double uniform();

  // Uniform real in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller; no cached second value.
  double normal();

 private:
  std::mt19937_64 engine_;
};

}  // namespace whisperkit

#endif  // WHISPERKIT_RANDOM_H_
