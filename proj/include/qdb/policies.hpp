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

#ifndef QDB_POLICIES_HPP_
#define QDB_POLICIES_HPP_

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qdb/core.hpp"
#include "qdb/sampling.hpp"

namespace qdb {

// Per-arm histogram of observed feedback. pulls(i) is the row sum of arm i
// and round() the total number of pulls.
class ObservationCounts {
 public:
  ObservationCounts(std::size_t num_arms, std::size_t levels);

  void Update(ArmIndex arm, Level feedback);

  std::size_t num_arms() const { return pulls_.size(); }
  std::size_t levels() const { return levels_; }
  std::uint64_t count(ArmIndex arm, Level k) const {
    return counts_[arm * levels_ + k];
  }
  std::span<const std::uint64_t> row(ArmIndex arm) const {
    return {counts_.data() + arm * levels_, levels_};
  }
  std::uint64_t pulls(ArmIndex arm) const { return pulls_[arm]; }
  std::span<const std::uint64_t> pulls() const { return pulls_; }
  std::uint64_t round() const { return round_; }

  // C(i) / N(i); arm must have been pulled.
  std::vector<double> Empirical(ArmIndex arm) const;

 private:
  std::size_t levels_;
  std::vector<std::uint64_t> counts_;
  std::vector<std::uint64_t> pulls_;
  std::uint64_t round_ = 0;
};

using PullDirective = std::vector<ArmIndex>;

struct TcsConfig {
  std::uint64_t t0 = 10;
  std::uint64_t resample_cap = 1000;

  void Validate() const;
};

struct BucbConfig {
  double alpha = 2.0;
  std::uint64_t tau = 1;

  void Validate() const;
};

struct PolicyDiagnostics {
  // Thompson Condorcet sampling: decisions that exhausted the resample cap
  // and fell back to the most-wins arm, and the total number of posterior
  // sampling rounds.
  std::uint64_t resample_cap_hits = 0;
  std::uint64_t sampling_rounds = 0;
  std::uint64_t decisions = 0;
};

// Scratch buffers for posterior draws; one per run.
struct PosteriorWorkspace {
  std::vector<std::vector<double>> theta;
  std::vector<double> alpha;
  WinMatrix mu{0};
};

// Draws theta(i) ~ Dir(C(i) + 1) for every arm into ws.theta and fills ws.mu.
void SamplePosteriorWinMatrix(const ObservationCounts& counts, Rng& rng,
                              PosteriorWorkspace& ws);

// Thompson Condorcet sampling decision. Resamples the posteriors until some
// arm beats every other sampled arm with probability >= 1/2 (lowest such
// index wins). After cfg.resample_cap failed rounds it returns the arm with
// the most sampled wins (mu >= 1/2) in the last round.
ArmIndex TcsSelect(const ObservationCounts& counts, const TcsConfig& cfg,
                   Rng& rng, PosteriorWorkspace& ws,
                   PolicyDiagnostics* diagnostics = nullptr);
ArmIndex TcsSelect(const ObservationCounts& counts, const TcsConfig& cfg,
                   Rng& rng);

// Thompson Borda sampling decision: one posterior draw per arm, argmax of the
// sampled Borda scores.
ArmIndex TbsSelect(const ObservationCounts& counts, Rng& rng,
                   PosteriorWorkspace& ws);
ArmIndex TbsSelect(const ObservationCounts& counts, Rng& rng);

// Intermediate quantities of one Borda-UCB decision.
struct ConfidenceWidths {
  // sqrt(alpha log t / N_i).
  std::vector<double> gamma;
  // gamma_i + (sum_{k != i} gamma_k) / (K - 1).
  std::vector<double> width;
};

ConfidenceWidths ComputeConfidenceWidths(std::span<const std::uint64_t> pulls,
                                         std::uint64_t round, double alpha);

struct BucbIndex {
  std::vector<double> estimated_borda;
  std::vector<double> gamma;
  std::vector<double> width;
  ArmIndex ucb_arm = 0;
  std::vector<ArmIndex> most_pulled;
};

// Requires every arm pulled at least once and counts.round() >= 2.
BucbIndex ComputeBucbIndex(const ObservationCounts& counts, double alpha);

// [ucb_arm] when it is among the most pulled arms, otherwise every arm that
// is not among the most pulled, ascending.
PullDirective BucbSelect(const ObservationCounts& counts,
                         const BucbConfig& cfg);

// A sequential decision rule driven by the simulator. The simulator owns the
// observation counts; Observe is called after every single pull.
class Policy {
 public:
  virtual ~Policy() = default;

  virtual std::string name() const = 0;
  // Round-robin pulls per arm performed by the simulator before Select is
  // first called.
  virtual std::uint64_t warmup_pulls() const = 0;
  virtual PullDirective Select(const ObservationCounts& counts, Rng& rng) = 0;
  virtual void Observe(ArmIndex /*arm*/, Level /*feedback*/, Rng& /*rng*/) {}
  virtual PolicyDiagnostics diagnostics() const { return {}; }
};

class ThompsonCondorcetPolicy : public Policy {
 public:
  explicit ThompsonCondorcetPolicy(TcsConfig cfg);

  std::string name() const override { return "tcs"; }
  std::uint64_t warmup_pulls() const override { return cfg_.t0; }
  PullDirective Select(const ObservationCounts& counts, Rng& rng) override;
  PolicyDiagnostics diagnostics() const override { return diagnostics_; }

 private:
  TcsConfig cfg_;
  PosteriorWorkspace ws_;
  PolicyDiagnostics diagnostics_;
};

class ThompsonBordaPolicy : public Policy {
 public:
  explicit ThompsonBordaPolicy(std::uint64_t t0);

  std::string name() const override { return "tbs"; }
  std::uint64_t warmup_pulls() const override { return t0_; }
  PullDirective Select(const ObservationCounts& counts, Rng& rng) override;

 private:
  std::uint64_t t0_;
  PosteriorWorkspace ws_;
};

class BordaUcbPolicy : public Policy {
 public:
  explicit BordaUcbPolicy(BucbConfig cfg);

  std::string name() const override { return "bucb"; }
  std::uint64_t warmup_pulls() const override { return cfg_.tau; }
  PullDirective Select(const ObservationCounts& counts, Rng& rng) override;

 private:
  BucbConfig cfg_;
};

// Pulls the same arm forever. Used as a regret-accounting reference.
class FixedArmPolicy : public Policy {
 public:
  explicit FixedArmPolicy(ArmIndex arm) : arm_(arm) {}

  std::string name() const override { return "fixed"; }
  std::uint64_t warmup_pulls() const override { return 0; }
  PullDirective Select(const ObservationCounts&, Rng&) override {
    return {arm_};
  }

 private:
  ArmIndex arm_;
};

// A classic dueling-bandit algorithm: proposes a pair, learns from the
// outcome of the noisy comparison.
class DuelPolicy {
 public:
  virtual ~DuelPolicy() = default;

  virtual std::pair<ArmIndex, ArmIndex> SelectPair(Rng& rng) = 0;
  virtual void Update(ArmIndex winner, ArmIndex loser) = 0;
};

// Relative upper confidence bound baseline. wins(i, j) counts duels that i
// won against j; u(i, j) = wins(i, j) / n(i, j) + sqrt(alpha log t / n(i, j))
// with u = 1 for unplayed pairs and u(i, i) = 1/2. The candidate is drawn
// uniformly among arms whose bounds are all >= 1/2 (among all arms when
// none qualifies); the opponent maximizes u(j, candidate), lowest index on
// ties, and may be the candidate itself.
class RucbDuelPolicy : public DuelPolicy {
 public:
  explicit RucbDuelPolicy(std::size_t num_arms, double alpha = 0.51);

  std::pair<ArmIndex, ArmIndex> SelectPair(Rng& rng) override;
  void Update(ArmIndex winner, ArmIndex loser) override;

  double UpperBound(ArmIndex i, ArmIndex j) const;
  std::uint64_t wins(ArmIndex i, ArmIndex j) const { return wins_[i * k_ + j]; }
  std::uint64_t duels() const { return duels_; }

 private:
  std::size_t k_;
  double alpha_;
  std::vector<std::uint64_t> wins_;
  std::uint64_t duels_ = 0;
};

// Runs a classic dueling-bandit policy on qualitative feedback: each duel
// pulls both arms (two rounds) and compares the two feedback levels.
class DuelReductionPolicy : public Policy {
 public:
  explicit DuelReductionPolicy(std::unique_ptr<DuelPolicy> duel);

  std::string name() const override { return "duel-reduction"; }
  std::uint64_t warmup_pulls() const override { return 0; }
  PullDirective Select(const ObservationCounts& counts, Rng& rng) override;
  void Observe(ArmIndex arm, Level feedback, Rng& rng) override;

  const DuelPolicy& duel_policy() const { return *duel_; }

 private:
  std::unique_ptr<DuelPolicy> duel_;
  std::optional<std::pair<ArmIndex, ArmIndex>> pending_;
  std::vector<Level> feedback_;
};

}  // namespace qdb

#endif  // QDB_POLICIES_HPP_
