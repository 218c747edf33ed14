// Copyright 2026 The slicekit Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace slicekit {

// Stable 64-bit hash (FNV-1a followed by a splitmix64 finalizer). Used to
// derive per-purpose seeds from the single run seed; stable across
// platforms and releases.
std::uint64_t stable_hash(std::string_view bytes,
                          std::uint64_t basis = 0xcbf29ce484222325ULL) noexcept;
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Seed for a named purpose: derive_seed(seed, "patch-dims").
std::uint64_t derive_seed(std::uint64_t seed, std::string_view label) noexcept;
/// Seed for a named purpose and an integer key (image id, patch index...).
std::uint64_t derive_seed(std::uint64_t seed, std::string_view label,
                          std::uint64_t key) noexcept;

/// Deterministic generator over std::mt19937_64 with hand-rolled
/// distributions that give the same values on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform integer in [lo, hi] (inclusive), unbiased.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
  /// Uniform real in [0, 1).
  double uniform01();
  /// Uniform real in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
  bool bernoulli(double p) { return uniform01() < p; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace slicekit
