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

#include "qdb/policies.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qdb {

ObservationCounts::ObservationCounts(std::size_t num_arms, std::size_t levels)
    : levels_(levels), counts_(num_arms * levels, 0), pulls_(num_arms, 0) {
  if (num_arms == 0 || levels == 0) {
    throw InvalidArgument("observation counts need at least one arm and level");
  }
}

void ObservationCounts::Update(ArmIndex arm, Level feedback) {
  if (arm >= num_arms() || feedback >= levels_) {
    std::ostringstream msg;
    msg << "update out of range: arm " << arm << " of " << num_arms()
        << ", level " << feedback << " of " << levels_;
    throw InvalidArgument(msg.str());
  }
  ++counts_[arm * levels_ + feedback];
  ++pulls_[arm];
  ++round_;
}

std::vector<double> ObservationCounts::Empirical(ArmIndex arm) const {
  const auto n = static_cast<double>(pulls_.at(arm));
  if (n == 0.0) throw InvalidArgument("empirical distribution of unpulled arm");
  std::vector<double> p(levels_);
  for (Level k = 0; k < levels_; ++k) {
    p[k] = static_cast<double>(count(arm, k)) / n;
  }
  return p;
}

void TcsConfig::Validate() const {
  if (t0 < 1) throw InvalidArgument("t0 must be at least 1");
  if (resample_cap < 1) throw InvalidArgument("resample cap must be at least 1");
}

void BucbConfig::Validate() const {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw InvalidArgument("Borda-UCB alpha must be positive");
  }
  if (tau < 1) throw InvalidArgument("tau must be at least 1");
}

void SamplePosteriorWinMatrix(const ObservationCounts& counts, Rng& rng,
                              PosteriorWorkspace& ws) {
  const std::size_t k = counts.num_arms();
  const std::size_t levels = counts.levels();
  ws.theta.resize(k);
  ws.alpha.resize(levels);
  for (ArmIndex i = 0; i < k; ++i) {
    const auto row = counts.row(i);
    for (Level l = 0; l < levels; ++l) {
      ws.alpha[l] = static_cast<double>(row[l]) + 1.0;
    }
    SampleDirichletInto(ws.alpha, rng, ws.theta[i]);
  }
  FillWinMatrix(ws.theta, ws.mu);
}

ArmIndex TcsSelect(const ObservationCounts& counts, const TcsConfig& cfg,
                   Rng& rng, PosteriorWorkspace& ws,
                   PolicyDiagnostics* diagnostics) {
  if (diagnostics != nullptr) ++diagnostics->decisions;
  for (std::uint64_t attempt = 0; attempt < cfg.resample_cap; ++attempt) {
    SamplePosteriorWinMatrix(counts, rng, ws);
    if (diagnostics != nullptr) ++diagnostics->sampling_rounds;
    if (auto winner = CondorcetWinner(ws.mu)) return *winner;
  }
  if (diagnostics != nullptr) ++diagnostics->resample_cap_hits;

  const std::size_t k = counts.num_arms();
  std::vector<double> wins(k, 0.0);
  for (ArmIndex i = 0; i < k; ++i) {
    for (ArmIndex j = 0; j < k; ++j) {
      if (j != i && ws.mu(i, j) >= 0.5) wins[i] += 1.0;
    }
  }
  return ArgMax(wins);
}

ArmIndex TcsSelect(const ObservationCounts& counts, const TcsConfig& cfg,
                   Rng& rng) {
  PosteriorWorkspace ws;
  return TcsSelect(counts, cfg, rng, ws);
}

ArmIndex TbsSelect(const ObservationCounts& counts, Rng& rng,
                   PosteriorWorkspace& ws) {
  SamplePosteriorWinMatrix(counts, rng, ws);
  const auto borda = BordaScores(ws.mu);
  return ArgMax(borda);
}

ArmIndex TbsSelect(const ObservationCounts& counts, Rng& rng) {
  PosteriorWorkspace ws;
  return TbsSelect(counts, rng, ws);
}

ConfidenceWidths ComputeConfidenceWidths(std::span<const std::uint64_t> pulls,
                                         std::uint64_t round, double alpha) {
  const std::size_t k = pulls.size();
  if (k < 2) throw InvalidArgument("confidence widths need at least two arms");
  ConfidenceWidths out;
  out.gamma.resize(k);
  const double log_t = std::log(static_cast<double>(round));
  double gamma_sum = 0.0;
  for (ArmIndex i = 0; i < k; ++i) {
    if (pulls[i] == 0) throw InvalidArgument("confidence width of unpulled arm");
    out.gamma[i] = std::sqrt(alpha * log_t / static_cast<double>(pulls[i]));
    gamma_sum += out.gamma[i];
  }
  out.width.resize(k);
  for (ArmIndex i = 0; i < k; ++i) {
    out.width[i] =
        out.gamma[i] + (gamma_sum - out.gamma[i]) / static_cast<double>(k - 1);
  }
  return out;
}

BucbIndex ComputeBucbIndex(const ObservationCounts& counts, double alpha) {
  const std::size_t k = counts.num_arms();
  if (counts.round() < 2) {
    throw InvalidArgument("Borda-UCB needs at least two rounds of data");
  }
  std::vector<std::vector<double>> estimates;
  estimates.reserve(k);
  for (ArmIndex i = 0; i < k; ++i) estimates.push_back(counts.Empirical(i));

  WinMatrix mu(k);
  FillWinMatrix(estimates, mu);

  BucbIndex index;
  index.estimated_borda = BordaScores(mu);
  ConfidenceWidths widths =
      ComputeConfidenceWidths(counts.pulls(), counts.round(), alpha);
  index.gamma = std::move(widths.gamma);
  index.width = std::move(widths.width);
  std::vector<double> ucb(k);
  for (ArmIndex i = 0; i < k; ++i) {
    ucb[i] = index.estimated_borda[i] + index.width[i];
  }
  index.ucb_arm = ArgMax(ucb);

  const auto pulls = counts.pulls();
  const std::uint64_t most = *std::max_element(pulls.begin(), pulls.end());
  for (ArmIndex i = 0; i < k; ++i) {
    if (pulls[i] == most) index.most_pulled.push_back(i);
  }
  return index;
}

PullDirective BucbSelect(const ObservationCounts& counts,
                         const BucbConfig& cfg) {
  const BucbIndex index = ComputeBucbIndex(counts, cfg.alpha);
  const auto& top = index.most_pulled;
  if (std::find(top.begin(), top.end(), index.ucb_arm) != top.end()) {
    return {index.ucb_arm};
  }
  PullDirective directive;
  for (ArmIndex i = 0; i < counts.num_arms(); ++i) {
    if (std::find(top.begin(), top.end(), i) == top.end()) {
      directive.push_back(i);
    }
  }
  return directive;
}

ThompsonCondorcetPolicy::ThompsonCondorcetPolicy(TcsConfig cfg) : cfg_(cfg) {
  cfg_.Validate();
}

PullDirective ThompsonCondorcetPolicy::Select(const ObservationCounts& counts,
                                              Rng& rng) {
  return {TcsSelect(counts, cfg_, rng, ws_, &diagnostics_)};
}

ThompsonBordaPolicy::ThompsonBordaPolicy(std::uint64_t t0) : t0_(t0) {
  if (t0_ < 1) throw InvalidArgument("t0 must be at least 1");
}

PullDirective ThompsonBordaPolicy::Select(const ObservationCounts& counts,
                                          Rng& rng) {
  return {TbsSelect(counts, rng, ws_)};
}

BordaUcbPolicy::BordaUcbPolicy(BucbConfig cfg) : cfg_(cfg) { cfg_.Validate(); }

PullDirective BordaUcbPolicy::Select(const ObservationCounts& counts, Rng&) {
  return BucbSelect(counts, cfg_);
}

RucbDuelPolicy::RucbDuelPolicy(std::size_t num_arms, double alpha)
    : k_(num_arms), alpha_(alpha), wins_(num_arms * num_arms, 0) {
  if (num_arms < 2) throw InvalidArgument("RUCB needs at least two arms");
  if (!(alpha > 0.0)) throw InvalidArgument("RUCB alpha must be positive");
}

double RucbDuelPolicy::UpperBound(ArmIndex i, ArmIndex j) const {
  if (i == j) return 0.5;
  const std::uint64_t n = wins(i, j) + wins(j, i);
  if (n == 0) return 1.0;
  const double t = static_cast<double>(duels_ + 1);
  const double nd = static_cast<double>(n);
  return static_cast<double>(wins(i, j)) / nd +
         std::sqrt(alpha_ * std::log(t) / nd);
}

std::pair<ArmIndex, ArmIndex> RucbDuelPolicy::SelectPair(Rng& rng) {
  std::vector<ArmIndex> candidates;
  for (ArmIndex i = 0; i < k_; ++i) {
    bool optimistic = true;
    for (ArmIndex j = 0; j < k_ && optimistic; ++j) {
      if (UpperBound(i, j) < 0.5) optimistic = false;
    }
    if (optimistic) candidates.push_back(i);
  }
  const ArmIndex candidate = candidates.empty()
                                 ? rng.NextIndex(k_)
                                 : candidates[rng.NextIndex(candidates.size())];
  ArmIndex opponent = 0;
  double best = -1.0;
  for (ArmIndex j = 0; j < k_; ++j) {
    const double u = UpperBound(j, candidate);
    if (u > best) {
      best = u;
      opponent = j;
    }
  }
  return {candidate, opponent};
}

void RucbDuelPolicy::Update(ArmIndex winner, ArmIndex loser) {
  if (winner >= k_ || loser >= k_) {
    throw InvalidArgument("duel update out of range");
  }
  ++duels_;
  if (winner != loser) ++wins_[winner * k_ + loser];
}

DuelReductionPolicy::DuelReductionPolicy(std::unique_ptr<DuelPolicy> duel)
    : duel_(std::move(duel)) {
  if (!duel_) throw InvalidArgument("duel reduction needs a duel policy");
}

PullDirective DuelReductionPolicy::Select(const ObservationCounts&, Rng& rng) {
  pending_ = duel_->SelectPair(rng);
  feedback_.clear();
  return {pending_->first, pending_->second};
}

void DuelReductionPolicy::Observe(ArmIndex arm, Level feedback, Rng& rng) {
  if (!pending_) return;
  const ArmIndex expected =
      feedback_.empty() ? pending_->first : pending_->second;
  if (arm != expected) {
    throw InvalidArgument("duel reduction observed an unexpected arm");
  }
  feedback_.push_back(feedback);
  if (feedback_.size() < 2) return;

  const auto [first, second] = *pending_;
  pending_.reset();
  if (DuelSample(feedback_[0], feedback_[1], rng) == DuelOutcome::kFirst) {
    duel_->Update(first, second);
  } else {
    duel_->Update(second, first);
  }
}

}  // namespace qdb
