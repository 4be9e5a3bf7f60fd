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

#ifndef QDB_CORE_HPP_
#define QDB_CORE_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace qdb {

// Arms and feedback levels are zero-based throughout the library. Level
// L-1 is the most preferred feedback; scales must be encoded worst to best.
using ArmIndex = std::size_t;
using Level = std::size_t;

class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Tolerance on the simplex sum accepted by FeedbackDistribution.
inline constexpr double kSimplexTolerance = 1e-9;

// A categorical distribution over the ordered levels {0, ..., L-1}.
class FeedbackDistribution {
 public:
  // Throws InvalidArgument unless every entry is non-negative, L >= 1 and the
  // entries sum to one within kSimplexTolerance. Entries are stored verbatim.
  explicit FeedbackDistribution(std::vector<double> probs);

  // Divides by the sum when it lies within `tolerance` of one; throws
  // otherwise. Intended for ingestion of external data only.
  static FeedbackDistribution Renormalized(std::vector<double> probs,
                                           double tolerance);

  static FeedbackDistribution Uniform(std::size_t levels);
  static FeedbackDistribution PointMass(std::size_t levels, Level level);

  std::size_t levels() const { return probs_.size(); }
  std::span<const double> probs() const { return probs_; }
  double operator[](Level k) const { return probs_[k]; }

  friend bool operator==(const FeedbackDistribution&,
                         const FeedbackDistribution&) = default;

 private:
  std::vector<double> probs_;
};

// K >= 2 arms sharing one label set.
class QdbInstance {
 public:
  explicit QdbInstance(std::vector<FeedbackDistribution> arms);

  std::size_t num_arms() const { return arms_.size(); }
  std::size_t levels() const { return arms_.front().levels(); }
  const FeedbackDistribution& arm(ArmIndex i) const { return arms_.at(i); }
  const std::vector<FeedbackDistribution>& arms() const { return arms_; }

  friend bool operator==(const QdbInstance&, const QdbInstance&) = default;

 private:
  std::vector<FeedbackDistribution> arms_;
};

// Row-major K x K matrix of pairwise win probabilities.
class WinMatrix {
 public:
  explicit WinMatrix(std::size_t k) : k_(k), data_(k * k, 0.5) {}

  std::size_t size() const { return k_; }
  double operator()(ArmIndex i, ArmIndex j) const { return data_[i * k_ + j]; }
  double& operator()(ArmIndex i, ArmIndex j) { return data_[i * k_ + j]; }

 private:
  std::size_t k_;
  std::vector<double> data_;
};

struct PreferenceSummary {
  WinMatrix mu{0};
  std::vector<double> borda;
  std::optional<ArmIndex> condorcet;
  ArmIndex borda_winner = 0;
  // Empty when no Condorcet winner exists.
  std::vector<double> gap_condorcet;
  std::vector<double> gap_borda;
};

// P[X > Y] + P[X = Y] / 2 for independent X ~ x, Y ~ y.
double WinProb(std::span<const double> x, std::span<const double> y);
double WinProb(const FeedbackDistribution& x, const FeedbackDistribution& y);

// w_k = F_k - y_k / 2 with F the cumulative sum of y, so that
// WinProb(x, y) == dot(x, w).
std::vector<double> CumulativeWeights(std::span<const double> y);
std::vector<double> CumulativeWeights(const FeedbackDistribution& y);

// Fills the win matrix from arbitrary probability vectors; shared by the
// instance summary and the posterior-sample based policies.
void FillWinMatrix(std::span<const std::vector<double>> dists, WinMatrix& out);

// Borda score of every row: mean win probability against the other arms.
std::vector<double> BordaScores(const WinMatrix& mu);

// Lowest-index arm i with mu(i, j) >= 1/2 for all j, if any.
std::optional<ArmIndex> CondorcetWinner(const WinMatrix& mu);

// Lowest index among the maximal entries.
std::size_t ArgMax(std::span<const double> values);

PreferenceSummary Summarize(const QdbInstance& instance);

enum class DuelOutcome { kFirst, kSecond };

class Rng;

// Strict comparison of the two levels; ties are settled by a fair coin.
DuelOutcome DuelSample(Level first, Level second, Rng& rng);

}  // namespace qdb

#endif  // QDB_CORE_HPP_
