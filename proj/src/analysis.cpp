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

#include "qdb/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

namespace qdb::analysis {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kHalf = 0.5;
constexpr int kMaxBisections = 200;

double Dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double L1Distance(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) d += std::abs(a[k] - b[k]);
  return d;
}

double MaxCdfDeviation(std::span<const double> a, std::span<const double> b) {
  double fa = 0.0, fb = 0.0, worst = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    fa += a[k];
    fb += b[k];
    worst = std::max(worst, std::abs(fa - fb));
  }
  return worst;
}

}  // namespace

double KlDivergence(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) {
    throw InvalidArgument("KL divergence of vectors with different lengths");
  }
  double kl = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (p[k] <= 0.0) continue;
    if (q[k] <= 0.0) return kInf;
    kl += p[k] * std::log(p[k] / q[k]);
  }
  return std::max(kl, 0.0);
}

double KlDivergence(const FeedbackDistribution& p,
                    const FeedbackDistribution& q) {
  return KlDivergence(p.probs(), q.probs());
}

double BinaryKl(double x, double y) {
  if (!(x >= 0.0 && x <= 1.0) || !(y >= 0.0 && y <= 1.0)) {
    throw InvalidArgument("binary KL arguments must lie in [0, 1]");
  }
  if (x == y) return 0.0;
  if (y == 0.0 || y == 1.0) return kInf;
  double d = 0.0;
  if (x > 0.0) d += x * std::log(x / y);
  if (x < 1.0) d += (1.0 - x) * std::log((1.0 - x) / (1.0 - y));
  return std::max(d, 0.0);
}

PStarResult PStar(const FeedbackDistribution& p_i,
                  const FeedbackDistribution& p_winner, double tol) {
  if (p_i.levels() != p_winner.levels()) {
    throw InvalidArgument("P* needs distributions with the same levels");
  }
  const std::size_t levels = p_i.levels();
  const auto p = p_i.probs();
  const std::vector<double> w = CumulativeWeights(p_winner);

  if (Dot(p, w) >= kHalf) {
    return {p_i, 0.0, true, false, 0};
  }

  const double w_max = *std::max_element(w.begin(), w.end());
  if (w_max < kHalf) {
    throw Infeasible("no distribution reaches win probability 1/2");
  }

  // Top-weight level, preferring one inside the support of p.
  std::size_t k_star = levels;
  double w_max_support = -kInf;
  for (std::size_t k = 0; k < levels; ++k) {
    if (p[k] > 0.0) w_max_support = std::max(w_max_support, w[k]);
    if (w[k] == w_max && (k_star == levels || p[k] > 0.0)) k_star = k;
  }

  if (w_max == kHalf) {
    // Only levels with weight exactly 1/2 are allowed.
    std::vector<double> restricted(levels, 0.0);
    double mass = 0.0;
    for (std::size_t k = 0; k < levels; ++k) {
      if (w[k] == w_max) {
        restricted[k] = p[k];
        mass += p[k];
      }
    }
    if (mass > 0.0) {
      for (double& x : restricted) x /= mass;
    } else {
      restricted[k_star] = 1.0;
    }
    FeedbackDistribution solution(std::move(restricted));
    const double kl = KlDivergence(p_i, solution);
    return {std::move(solution), kl, false, mass == 0.0, 0};
  }

  const double lambda_max = 1.0 / (w_max - kHalf);
  auto family = [&](double lambda, std::vector<double>& out) {
    double sum = 0.0;
    for (std::size_t k = 0; k < levels; ++k) {
      out[k] = p[k] > 0.0 ? p[k] / (1.0 + lambda * (kHalf - w[k])) : 0.0;
      sum += out[k];
    }
    return sum;
  };

  std::vector<double> candidate(levels);
  const bool atom_needed =
      w_max_support < w_max && family(lambda_max, candidate) <= 1.0;

  if (atom_needed) {
    // Stationary family at lambda_max plus the residual on k_star.
    const double sum = family(lambda_max, candidate);
    candidate[k_star] += std::max(0.0, 1.0 - sum);
    const double total =
        std::accumulate(candidate.begin(), candidate.end(), 0.0);
    for (double& x : candidate) x /= total;
    FeedbackDistribution solution(candidate);
    const double kl = KlDivergence(p_i, solution);
    return {std::move(solution), kl, false, true, 0};
  }

  // The family's mass dips below one right after lambda = 0 and then grows
  // without bound, so the root is bracketed by (0, lambda_max). The upper
  // end of the bracket is always feasible after normalization.
  double lo = 0.0, hi = lambda_max;
  std::vector<double> best(levels);
  int iterations = 0;
  bool have_best = false;
  while (iterations < kMaxBisections) {
    ++iterations;
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    const double sum = family(mid, candidate);
    if (sum < 1.0) {
      lo = mid;
      continue;
    }
    hi = mid;
    for (std::size_t k = 0; k < levels; ++k) best[k] = candidate[k] / sum;
    have_best = true;
    if (std::abs(Dot(best, w) - kHalf) <= tol) break;
  }
  if (!have_best) {
    const double sum = family(hi, candidate);
    for (std::size_t k = 0; k < levels; ++k) best[k] = candidate[k] / sum;
  }
  FeedbackDistribution solution(best);
  const double kl = KlDivergence(p_i, solution);
  return {std::move(solution), kl, false, false, iterations};
}

double C1(std::size_t levels) {
  const double l = static_cast<double>(levels);
  return std::pow(2.0 * std::numbers::pi, -(l - 1.0) / 2.0) *
         std::exp(l - 5.0 / 6.0);
}

double C1Prime(std::size_t levels) {
  return std::pow(2.0, static_cast<double>(levels)) * C1(levels);
}

AlphaRecommendation RecommendedAlpha(std::size_t num_arms,
                                     double epsilon_prime) {
  if (!(epsilon_prime > 0.0 && epsilon_prime < 1.0)) {
    throw InvalidArgument("epsilon' must lie in (0, 1)");
  }
  if (num_arms < 2) throw InvalidArgument("need at least two arms");
  if (num_arms == 2) return {2.0, true};
  const double k = static_cast<double>(num_arms);
  const double ratio = (k - 1.0) / (k - 2.0);
  const double value = 3.0 * std::pow(1.0 + 3.0 * epsilon_prime, 2) /
                       (2.0 * std::pow(1.0 - epsilon_prime, 2)) * ratio * ratio;
  return {std::max(2.0, value), false};
}

Lemma7Value Lemma7F(double c, double eps, double delta, std::size_t levels) {
  if (!(c > 0.0) || !(eps > 0.0) || !(delta > 0.0 && delta <= 1.0)) {
    throw InvalidArgument("Lemma7F needs C > 0, eps > 0, delta in (0, 1]");
  }
  const double log_ratio = std::log(c / delta);
  const double first = std::max(0.0, log_ratio / eps);
  if (first <= 1.0) return {first, true};
  const double l = static_cast<double>(levels);
  const double inner = std::log(first);
  return {first + std::numbers::phi * (2.0 * l * l / (eps * eps)) * inner * inner,
          false};
}

void BoundsConfig::Validate() const {
  if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be positive");
  if (!(epsilon_prime > 0.0 && epsilon_prime < 1.0)) {
    throw InvalidArgument("epsilon' must lie in (0, 1)");
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    throw InvalidArgument("delta must lie in (0, 1)");
  }
  if (!(tolerance > 0.0)) throw InvalidArgument("tolerance must be positive");
}

BoundsReport RegretConstants(const QdbInstance& instance,
                             const BoundsConfig& cfg) {
  cfg.Validate();
  const PreferenceSummary summary = Summarize(instance);
  const std::size_t k = instance.num_arms();

  BoundsReport report;
  report.num_arms = k;
  report.levels = instance.levels();
  report.config = cfg;
  report.condorcet_winner = summary.condorcet;
  report.borda_winner = summary.borda_winner;
  report.c1 = C1(instance.levels());
  report.c1_prime = C1Prime(instance.levels());
  report.recommended_alpha = RecommendedAlpha(k, cfg.epsilon_prime);
  if (report.recommended_alpha.formula_undefined) {
    report.flags.push_back("alpha_formula_undefined_for_two_arms");
  }

  report.arms.resize(k);
  for (ArmIndex i = 0; i < k; ++i) report.arms[i].arm = i;

  if (summary.condorcet) {
    const ArmIndex winner = *summary.condorcet;
    const auto& gap = summary.gap_condorcet;
    double upper = 0.0, lower = 0.0;
    for (ArmIndex i = 0; i < k; ++i) {
      ArmBounds& arm = report.arms[i];
      arm.kl_to_winner = KlDivergence(instance.arm(i), instance.arm(winner));
      if (i == winner) {
        const auto probs = instance.arm(i).probs();
        arm.p_star = std::vector<double>(probs.begin(), probs.end());
        continue;
      }
      const PStarResult solved =
          PStar(instance.arm(i), instance.arm(winner), cfg.tolerance);
      const auto probs = solved.p_star.probs();
      arm.p_star = std::vector<double>(probs.begin(), probs.end());
      arm.kl_to_p_star = solved.kl;

      if (gap[i] == 0.0) {
        arm.flags.push_back("zero_condorcet_gap");
      } else if (solved.kl == 0.0) {
        arm.upper_bound_term = kInf;
        arm.flags.push_back("zero_kl_to_p_star");
      } else {
        arm.upper_bound_term = (1.0 + cfg.epsilon) * gap[i] / solved.kl;
      }
      upper += arm.upper_bound_term;

      double best = kInf;
      for (ArmIndex j = 0; j < k; ++j) {
        if (j == i || !(summary.mu(i, j) < kHalf)) continue;
        const double d = BinaryKl(summary.mu(i, j), kHalf);
        best = std::min(best, (gap[i] + gap[j]) / d);
      }
      if (best == kInf) arm.flags.push_back("no_losing_opponent");
      arm.lower_bound_term = best;
      lower += best;
    }
    report.thompson_condorcet_constant = upper;
    report.duel_lower_bound_constant = lower;
    if (upper == kInf) report.flags.push_back("thompson_constant_infinite");
    if (lower == kInf) report.flags.push_back("duel_lower_bound_infinite");
  } else {
    report.flags.push_back("no_condorcet_winner");
  }

  double inverse_sq = 0.0;
  double gap_all = 0.0;
  double gap_min = kInf;
  for (ArmIndex i = 0; i < k; ++i) {
    if (i == summary.borda_winner) continue;
    const double g = summary.gap_borda[i];
    inverse_sq += g > 0.0 ? 1.0 / (g * g) : kInf;
    gap_all += g;
    gap_min = std::min(gap_min, g);
  }
  if (inverse_sq == kInf) report.flags.push_back("zero_borda_gap");
  report.pac_sample_bound =
      std::log(1.0 / (2.0 * cfg.delta)) / 90.0 * inverse_sq;
  report.borda_ucb_log_coefficient =
      gap_min > 0.0
          ? gap_all * 4.0 * report.recommended_alpha.alpha / (gap_min * gap_min)
          : kInf;

  bool pac_conditions = k >= 4 && cfg.delta <= 0.15;
  for (ArmIndex i = 0; i < k && pac_conditions; ++i) {
    for (ArmIndex j = 0; j < k; ++j) {
      const double m = summary.mu(i, j);
      if (m < 0.375 || m > 0.625) pac_conditions = false;
    }
  }
  if (!pac_conditions) report.flags.push_back("pac_bound_conditions_unmet");
  return report;
}

ConcentrationKind ParseConcentrationKind(const std::string& name) {
  if (name == "1" || name == "lemma1") return ConcentrationKind::kLemma1;
  if (name == "2" || name == "lemma2") return ConcentrationKind::kLemma2;
  if (name == "3" || name == "lemma3") return ConcentrationKind::kLemma3;
  if (name == "4" || name == "lemma4") return ConcentrationKind::kLemma4;
  if (name == "c1" || name == "corollary1") {
    return ConcentrationKind::kCorollary1;
  }
  throw InvalidArgument("unknown concentration check '" + name + "'");
}

std::string ConcentrationKindName(ConcentrationKind kind) {
  switch (kind) {
    case ConcentrationKind::kLemma1:
      return "lemma1";
    case ConcentrationKind::kLemma2:
      return "lemma2";
    case ConcentrationKind::kLemma3:
      return "lemma3";
    case ConcentrationKind::kLemma4:
      return "lemma4";
    case ConcentrationKind::kCorollary1:
      return "corollary1";
  }
  return "unknown";
}

double ConcentrationBound(ConcentrationKind kind, std::size_t levels,
                          std::uint64_t n, double eps) {
  const double nd = static_cast<double>(n);
  const double l = static_cast<double>(levels);
  switch (kind) {
    case ConcentrationKind::kLemma1:
      return C1(levels) * std::pow(nd, l) * std::exp(-nd * eps);
    case ConcentrationKind::kLemma2:
      return std::pow(2.0, l) * std::exp(-0.5 * nd * eps * eps);
    case ConcentrationKind::kLemma3:
      return 2.0 * std::exp(-2.0 * nd * eps * eps);
    case ConcentrationKind::kLemma4:
      return C1Prime(levels) * std::pow(nd, l) * std::exp(-nd * eps);
    case ConcentrationKind::kCorollary1:
      return C1Prime(levels) * std::pow(nd, l) * std::exp(-2.0 * nd * eps * eps);
  }
  return kInf;
}

ConcentrationResult ConcentrationCheck(ConcentrationKind kind,
                                       const FeedbackDistribution& p,
                                       std::uint64_t n, double eps,
                                       std::uint64_t trials, Rng& rng) {
  if (trials < 10000) {
    throw InvalidArgument("concentration checks need at least 10^4 trials");
  }
  if (n < 1) throw InvalidArgument("sample size must be positive");
  if (!(eps > 0.0)) throw InvalidArgument("eps must be positive");

  const auto probs = p.probs();
  const std::size_t levels = p.levels();
  const double nd = static_cast<double>(n);

  std::vector<double> alpha(levels);
  for (std::size_t k = 0; k < levels; ++k) alpha[k] = nd * probs[k] + 1.0;

  std::vector<double> draw(levels);
  std::uint64_t exceed = 0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    double statistic = 0.0;
    switch (kind) {
      case ConcentrationKind::kLemma1:
      case ConcentrationKind::kLemma2:
      case ConcentrationKind::kLemma3: {
        const auto counts = SampleMultinomial(probs, n, rng);
        for (std::size_t k = 0; k < levels; ++k) {
          draw[k] = static_cast<double>(counts[k]) / nd;
        }
        if (kind == ConcentrationKind::kLemma1) {
          statistic = KlDivergence(draw, probs);
        } else if (kind == ConcentrationKind::kLemma2) {
          statistic = L1Distance(draw, probs);
        } else {
          statistic = MaxCdfDeviation(draw, probs);
        }
        break;
      }
      case ConcentrationKind::kLemma4:
      case ConcentrationKind::kCorollary1:
        SampleDirichletInto(alpha, rng, draw);
        statistic = kind == ConcentrationKind::kLemma4
                        ? KlDivergence(probs, draw)
                        : L1Distance(probs, draw);
        break;
    }
    if (statistic >= eps) ++exceed;
  }

  ConcentrationResult result{kind};
  result.n = n;
  result.eps = eps;
  result.trials = trials;
  result.exceedances = exceed;
  result.empirical_tail =
      static_cast<double>(exceed) / static_cast<double>(trials);
  result.bound = ConcentrationBound(kind, levels, n, eps);
  result.informative = result.bound <= 1.0;
  result.passed = !result.informative || result.empirical_tail <= result.bound;
  return result;
}

}  // namespace qdb::analysis
