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

#include "qdb/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qdb {

std::size_t Rng::NextIndex(std::size_t n) {
  if (n == 0) throw InvalidArgument("NextIndex needs a positive range");
  std::uniform_int_distribution<std::size_t> dist(0, n - 1);
  return dist(engine_);
}

double Rng::NextGamma(double shape) {
  if (!(shape > 0.0) || !std::isfinite(shape)) {
    throw InvalidArgument("gamma shape must be positive and finite");
  }
  std::gamma_distribution<double> dist(shape, 1.0);
  return dist(engine_);
}

Level SampleCategorical(std::span<const double> probs, Rng& rng) {
  const double u = rng.NextUniform();
  double cumulative = 0.0;
  Level last_positive = 0;
  for (Level k = 0; k < probs.size(); ++k) {
    if (probs[k] <= 0.0) continue;
    cumulative += probs[k];
    last_positive = k;
    if (u < cumulative) return k;
  }
  // Rounding left u above the final cumulative sum.
  return last_positive;
}

Level SampleCategorical(const FeedbackDistribution& dist, Rng& rng) {
  return SampleCategorical(dist.probs(), rng);
}

void SampleDirichletInto(std::span<const double> alpha, Rng& rng,
                         std::vector<double>& out) {
  out.resize(alpha.size());
  double sum = 0.0;
  for (std::size_t k = 0; k < alpha.size(); ++k) {
    out[k] = rng.NextGamma(alpha[k]);
    sum += out[k];
  }
  if (sum > 0.0) {
    for (double& x : out) x /= sum;
    return;
  }
  // Every variate underflowed (only possible for tiny shapes); the limit of
  // the normalized draw puts its mass on the largest concentration.
  std::fill(out.begin(), out.end(), 0.0);
  out[ArgMax(alpha)] = 1.0;
}

std::vector<double> SampleDirichlet(std::span<const double> alpha, Rng& rng) {
  if (alpha.empty()) throw InvalidArgument("Dirichlet needs at least one level");
  std::vector<double> out;
  SampleDirichletInto(alpha, rng, out);
  return out;
}

std::vector<std::uint64_t> SampleMultinomial(std::span<const double> probs,
                                             std::uint64_t n, Rng& rng) {
  // Sequential binomial decomposition.
  std::vector<std::uint64_t> counts(probs.size(), 0);
  std::uint64_t remaining = n;
  double mass_left = 1.0;
  for (std::size_t k = 0; k + 1 < probs.size() && remaining > 0; ++k) {
    const double p = mass_left > 0.0 ? std::clamp(probs[k] / mass_left, 0.0, 1.0)
                                     : 0.0;
    std::binomial_distribution<std::uint64_t> binom(remaining, p);
    counts[k] = binom(rng.engine());
    remaining -= counts[k];
    mass_left -= probs[k];
  }
  if (!probs.empty()) counts.back() += remaining;
  return counts;
}

}  // namespace qdb
