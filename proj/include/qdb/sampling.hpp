// Copyright 2026 The QDB Authors.
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

#ifndef QDB_SAMPLING_HPP_
#define QDB_SAMPLING_HPP_

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "qdb/core.hpp"

namespace qdb {

// Seeded 64-bit Mersenne Twister (std::mt19937_64). A given seed always yields
// the same stream with the same standard library; streams are not guaranteed
// to agree across library implementations because gamma variates come from
// std::gamma_distribution.
//
// An Rng is owned by exactly one run. Replication r of a batch is seeded with
// base_seed + r.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }

  // Uniform on [0, 1) with 53 random bits.
  double NextUniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  bool NextBool() { return (engine_() >> 63) != 0; }

  // Uniform on {0, ..., n-1}; n must be positive.
  std::size_t NextIndex(std::size_t n);

  // Unit-scale gamma variate. Any positive shape is accepted; libstdc++
  // handles shape < 1 through the standard boost (shape + 1, then U^{1/shape}).
  double NextGamma(double shape);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

// Inverse-CDF draw of a level.
Level SampleCategorical(std::span<const double> probs, Rng& rng);
Level SampleCategorical(const FeedbackDistribution& dist, Rng& rng);

// Normalized independent gamma variates. Throws InvalidArgument on a
// non-positive or non-finite concentration.
std::vector<double> SampleDirichlet(std::span<const double> alpha, Rng& rng);

// Same as above but reuses `out` (resized to alpha.size()).
void SampleDirichletInto(std::span<const double> alpha, Rng& rng,
                         std::vector<double>& out);

// Counts of `n` categorical draws.
std::vector<std::uint64_t> SampleMultinomial(std::span<const double> probs,
                                             std::uint64_t n, Rng& rng);

}  // namespace qdb

#endif  // QDB_SAMPLING_HPP_
