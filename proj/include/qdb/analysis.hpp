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

#ifndef QDB_ANALYSIS_HPP_
#define QDB_ANALYSIS_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qdb/core.hpp"
#include "qdb/sampling.hpp"

// Theory toolkit. All logarithms are natural.
namespace qdb::analysis {

class Infeasible : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// KL(p || q) with 0 log 0 = 0. Returns +infinity when q_k = 0 < p_k.
double KlDivergence(std::span<const double> p, std::span<const double> q);
double KlDivergence(const FeedbackDistribution& p,
                    const FeedbackDistribution& q);

// Bernoulli KL d(x, y). Returns +infinity for y in {0, 1} with x != y.
double BinaryKl(double x, double y);

struct PStarResult {
  FeedbackDistribution p_star;
  double kl = 0.0;
  // win_prob(p_i, p_winner) >= 1/2 already; p_star == p_i.
  bool constraint_inactive = false;
  // Mass was placed on a level outside the support of p_i.
  bool used_atom = false;
  int iterations = 0;
};

// argmin_P KL(p_i || P) subject to win_prob(P, p_winner) >= 1/2.
//
// With w = CumulativeWeights(p_winner) the minimizers form the family
// P_k = p_k / (1 + lambda (1/2 - w_k)); lambda is found by bisection on the
// normalization, and when the family cannot reach the constraint before
// lambda hits 1 / (max_k w_k - 1/2) the remaining mass goes to the level
// with the largest weight. Stops once |<P, w> - 1/2| <= tol or after 200
// halvings. Throws Infeasible if no distribution reaches 1/2.
PStarResult PStar(const FeedbackDistribution& p_i,
                  const FeedbackDistribution& p_winner, double tol = 1e-9);

// (2 pi)^{-(L-1)/2} e^{L - 5/6}.
double C1(std::size_t levels);
// 2^L C1(L).
double C1Prime(std::size_t levels);

struct AlphaRecommendation {
  double alpha = 2.0;
  // K = 2 leaves (K-1)/(K-2) undefined; alpha falls back to 2.
  bool formula_undefined = false;
};

// max(2, 3 (1 + 3e')^2 / (2 (1 - e')^2) ((K-1)/(K-2))^2).
AlphaRecommendation RecommendedAlpha(std::size_t num_arms,
                                     double epsilon_prime);

struct Lemma7Value {
  double value = 0.0;
  // (1/eps) log(C/delta) <= 1, so the squared log term is dropped.
  bool degenerate = false;
};

// Sample size beyond which C n^L exp(-n eps) <= delta:
// (1/eps) log(C/delta) + phi (2 L^2 / eps^2) (log((1/eps) log(C/delta)))^2
// with phi the golden ratio.
Lemma7Value Lemma7F(double c, double eps, double delta, std::size_t levels);

struct BoundsConfig {
  double epsilon = 0.05;
  double epsilon_prime = 0.1;
  double delta = 0.15;
  double tolerance = 1e-9;

  void Validate() const;
};

struct ArmBounds {
  ArmIndex arm = 0;
  // Present for every arm when a Condorcet winner exists.
  std::optional<std::vector<double>> p_star;
  double kl_to_p_star = 0.0;
  double kl_to_winner = 0.0;
  double upper_bound_term = 0.0;  // (1+eps) gap / KL(P || P*)
  double lower_bound_term = 0.0;  // min_j (gap_i + gap_j) / d(mu_ij, 1/2)
  std::vector<std::string> flags;
};

struct BoundsReport {
  std::size_t num_arms = 0;
  std::size_t levels = 0;
  BoundsConfig config;
  std::optional<ArmIndex> condorcet_winner;
  ArmIndex borda_winner = 0;
  std::vector<ArmBounds> arms;
  // Leading log T coefficient of the Thompson Condorcet sampling upper bound
  // and the classic dueling-bandit lower bound; absent without a Condorcet
  // winner. +infinity is possible and flagged.
  std::optional<double> thompson_condorcet_constant;
  std::optional<double> duel_lower_bound_constant;
  // (1/90) log(1/(2 delta)) sum_{i != borda winner} 1 / gap_i^2.
  double pac_sample_bound = 0.0;
  // Delta_all * 4 alpha / Delta_min^2 with alpha = recommended_alpha.
  double borda_ucb_log_coefficient = 0.0;
  AlphaRecommendation recommended_alpha;
  double c1 = 0.0;
  double c1_prime = 0.0;
  std::vector<std::string> flags;
};

BoundsReport RegretConstants(const QdbInstance& instance,
                             const BoundsConfig& cfg);

enum class ConcentrationKind {
  kLemma1,      // multinomial, KL(P_hat || P) >= eps
  kLemma2,      // multinomial, |P_hat - P|_1 >= eps
  kLemma3,      // multinomial, max CDF deviation >= eps
  kLemma4,      // Dirichlet(nP + 1), KL(P || theta) >= eps
  kCorollary1,  // Dirichlet(nP + 1), |P - theta|_1 >= eps
};

// Accepts "1", "2", "3", "4", "c1" (and "lemma1" ... "corollary1").
ConcentrationKind ParseConcentrationKind(const std::string& name);
std::string ConcentrationKindName(ConcentrationKind kind);

// The tail bound value for the given kind.
double ConcentrationBound(ConcentrationKind kind, std::size_t levels,
                          std::uint64_t n, double eps);

struct ConcentrationResult {
  ConcentrationKind kind;
  std::uint64_t n = 0;
  double eps = 0.0;
  std::uint64_t trials = 0;
  std::uint64_t exceedances = 0;
  double empirical_tail = 0.0;
  double bound = 0.0;
  // bound <= 1; otherwise the check passes vacuously.
  bool informative = false;
  bool passed = false;
};

// Monte-Carlo frequency of the deviation event against its bound. Requires
// trials >= 10^4.
ConcentrationResult ConcentrationCheck(ConcentrationKind kind,
                                       const FeedbackDistribution& p,
                                       std::uint64_t n, double eps,
                                       std::uint64_t trials, Rng& rng);

}  // namespace qdb::analysis

#endif  // QDB_ANALYSIS_HPP_
