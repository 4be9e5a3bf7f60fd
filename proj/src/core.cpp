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

#include "qdb/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "qdb/sampling.hpp"

namespace qdb {
namespace {

void CheckSimplex(std::span<const double> probs) {
  if (probs.empty()) {
    throw InvalidArgument("feedback distribution needs at least one level");
  }
  double sum = 0.0;
  for (std::size_t k = 0; k < probs.size(); ++k) {
    if (!(probs[k] >= 0.0) || !std::isfinite(probs[k])) {
      std::ostringstream msg;
      msg << "probability at level " << k << " is not a finite non-negative "
          << "number: " << probs[k];
      throw InvalidArgument(msg.str());
    }
    sum += probs[k];
  }
  if (std::abs(sum - 1.0) > kSimplexTolerance) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "probabilities sum to " << sum << ", expected 1";
    throw InvalidArgument(msg.str());
  }
}

void CheckSameLevels(std::size_t a, std::size_t b) {
  if (a != b) {
    std::ostringstream msg;
    msg << "level count mismatch: " << a << " vs " << b;
    throw InvalidArgument(msg.str());
  }
}

}  // namespace

FeedbackDistribution::FeedbackDistribution(std::vector<double> probs)
    : probs_(std::move(probs)) {
  CheckSimplex(probs_);
}

FeedbackDistribution FeedbackDistribution::Renormalized(
    std::vector<double> probs, double tolerance) {
  double sum = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw InvalidArgument("negative or non-finite probability");
    }
    sum += p;
  }
  if (probs.empty() || std::abs(sum - 1.0) > tolerance) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "probabilities sum to " << sum << ", outside tolerance "
        << tolerance;
    throw InvalidArgument(msg.str());
  }
  // Rows already valid to the strict tolerance are kept bit-for-bit.
  if (std::abs(sum - 1.0) > kSimplexTolerance) {
    for (double& p : probs) p /= sum;
  }
  return FeedbackDistribution(std::move(probs));
}

FeedbackDistribution FeedbackDistribution::Uniform(std::size_t levels) {
  return FeedbackDistribution(
      std::vector<double>(levels, 1.0 / static_cast<double>(levels)));
}

FeedbackDistribution FeedbackDistribution::PointMass(std::size_t levels,
                                                     Level level) {
  if (level >= levels) throw InvalidArgument("point mass level out of range");
  std::vector<double> probs(levels, 0.0);
  probs[level] = 1.0;
  return FeedbackDistribution(std::move(probs));
}

QdbInstance::QdbInstance(std::vector<FeedbackDistribution> arms)
    : arms_(std::move(arms)) {
  if (arms_.size() < 2) throw InvalidArgument("an instance needs K >= 2 arms");
  for (const auto& arm : arms_) CheckSameLevels(arm.levels(), levels());
}

double WinProb(std::span<const double> x, std::span<const double> y) {
  CheckSameLevels(x.size(), y.size());
  // Ties are exactly even; the sum below only gets there up to rounding.
  if (std::equal(x.begin(), x.end(), y.begin())) return 0.5;
  double below = 0.0;  // P[Y < k]
  double total = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    total += x[k] * (below + 0.5 * y[k]);
    below += y[k];
  }
  return total;
}

double WinProb(const FeedbackDistribution& x, const FeedbackDistribution& y) {
  return WinProb(x.probs(), y.probs());
}

std::vector<double> CumulativeWeights(std::span<const double> y) {
  std::vector<double> w(y.size());
  double below = 0.0;
  for (std::size_t k = 0; k < y.size(); ++k) {
    w[k] = below + 0.5 * y[k];
    below += y[k];
  }
  return w;
}

std::vector<double> CumulativeWeights(const FeedbackDistribution& y) {
  return CumulativeWeights(y.probs());
}

void FillWinMatrix(std::span<const std::vector<double>> dists, WinMatrix& out) {
  const std::size_t k = dists.size();
  if (out.size() != k) out = WinMatrix(k);
  for (std::size_t i = 0; i < k; ++i) {
    out(i, i) = 0.5;
    for (std::size_t j = i + 1; j < k; ++j) {
      const double p = WinProb(dists[i], dists[j]);
      out(i, j) = p;
      out(j, i) = 1.0 - p;
    }
  }
}

std::vector<double> BordaScores(const WinMatrix& mu) {
  const std::size_t k = mu.size();
  std::vector<double> borda(k, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      if (j != i) sum += mu(i, j);
    }
    borda[i] = sum / static_cast<double>(k - 1);
  }
  return borda;
}

std::optional<ArmIndex> CondorcetWinner(const WinMatrix& mu) {
  for (std::size_t i = 0; i < mu.size(); ++i) {
    bool beats_all = true;
    for (std::size_t j = 0; j < mu.size() && beats_all; ++j) {
      if (j != i && mu(i, j) < 0.5) beats_all = false;
    }
    if (beats_all) return i;
  }
  return std::nullopt;
}

std::size_t ArgMax(std::span<const double> values) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

PreferenceSummary Summarize(const QdbInstance& instance) {
  const std::size_t k = instance.num_arms();
  std::vector<std::vector<double>> dists;
  dists.reserve(k);
  for (const auto& arm : instance.arms()) {
    dists.emplace_back(arm.probs().begin(), arm.probs().end());
  }

  PreferenceSummary summary;
  summary.mu = WinMatrix(k);
  FillWinMatrix(dists, summary.mu);
  summary.borda = BordaScores(summary.mu);
  summary.borda_winner = ArgMax(summary.borda);
  summary.condorcet = CondorcetWinner(summary.mu);

  summary.gap_borda.resize(k);
  const double best = summary.borda[summary.borda_winner];
  for (std::size_t i = 0; i < k; ++i) {
    summary.gap_borda[i] = best - summary.borda[i];
  }
  if (summary.condorcet) {
    summary.gap_condorcet.resize(k);
    for (std::size_t i = 0; i < k; ++i) {
      summary.gap_condorcet[i] =
          i == *summary.condorcet ? 0.0 : summary.mu(*summary.condorcet, i) - 0.5;
    }
  }
  return summary;
}

DuelOutcome DuelSample(Level first, Level second, Rng& rng) {
  if (first > second) return DuelOutcome::kFirst;
  if (first < second) return DuelOutcome::kSecond;
  return rng.NextBool() ? DuelOutcome::kFirst : DuelOutcome::kSecond;
}

}  // namespace qdb
