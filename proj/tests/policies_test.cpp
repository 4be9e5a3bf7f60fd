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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "qdb/instances.hpp"
#include "qdb/policies.hpp"

namespace qdb {
namespace {

// Adds `n` observations per level for arm `arm`.
void Fill(ObservationCounts& counts, ArmIndex arm,
          const std::vector<std::uint64_t>& per_level) {
  for (Level l = 0; l < per_level.size(); ++l) {
    for (std::uint64_t c = 0; c < per_level[l]; ++c) counts.Update(arm, l);
  }
}

// Counts equal to round(scale * P) for every arm.
ObservationCounts ScaledCounts(const QdbInstance& instance, double scale) {
  ObservationCounts counts(instance.num_arms(), instance.levels());
  for (ArmIndex i = 0; i < instance.num_arms(); ++i) {
    std::vector<std::uint64_t> row;
    for (double p : instance.arm(i).probs()) {
      row.push_back(static_cast<std::uint64_t>(std::llround(scale * p)));
    }
    Fill(counts, i, row);
  }
  return counts;
}

TEST_CASE("update_counts") {
  ObservationCounts c(3, 4);
  c.Update(0, 2);
  CHECK(c.count(0, 2) == 1);
  CHECK(c.pulls(0) == 1);
  CHECK(c.round() == 1);
  c.Update(0, 2);
  CHECK(c.count(0, 2) == 2);
  CHECK_THROWS_AS(c.Update(3, 0), InvalidArgument);
  CHECK_THROWS_AS(c.Update(0, 4), InvalidArgument);
  CHECK(c.round() == 2);
}

TEST_CASE("count invariants under random updates") {
  std::mt19937_64 gen(1);
  ObservationCounts c(5, 6);
  for (int t = 0; t < 10000; ++t) c.Update(gen() % 5, gen() % 6);
  std::uint64_t total = 0;
  for (ArmIndex i = 0; i < 5; ++i) {
    const auto row = c.row(i);
    CHECK(std::accumulate(row.begin(), row.end(), std::uint64_t{0}) ==
          c.pulls(i));
    total += c.pulls(i);
  }
  CHECK(total == c.round());
  CHECK(c.round() == 10000);
}

TEST_CASE("config validation") {
  CHECK_THROWS_AS((TcsConfig{0, 10}).Validate(), InvalidArgument);
  CHECK_THROWS_AS((TcsConfig{1, 0}).Validate(), InvalidArgument);
  CHECK_THROWS_AS((BucbConfig{0.0, 1}).Validate(), InvalidArgument);
  CHECK_THROWS_AS((BucbConfig{2.0, 0}).Validate(), InvalidArgument);
}

TEST_CASE("two-arm Thompson Condorcet samples exactly once") {
  ObservationCounts c(2, 3);
  Fill(c, 0, {3, 4, 3});
  Fill(c, 1, {5, 2, 3});
  Rng rng(2);
  PosteriorWorkspace ws;
  PolicyDiagnostics diag;
  for (int i = 0; i < 500; ++i) TcsSelect(c, TcsConfig{}, rng, ws, &diag);
  CHECK(diag.decisions == 500);
  CHECK(diag.sampling_rounds == 500);
  CHECK(diag.resample_cap_hits == 0);
}

TEST_CASE("two-arm Thompson Borda equals Thompson Condorcet") {
  ObservationCounts c(2, 4);
  Fill(c, 0, {3, 4, 3, 1});
  Fill(c, 1, {2, 2, 3, 3});
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    Rng a(seed), b(seed);
    CHECK(TbsSelect(c, a) == TcsSelect(c, TcsConfig{}, b));
  }
}

// Arms 1 and 2 of this instance tie at exactly 1/2, so either can be the
// sampled Condorcet winner; the third arm loses to both by a wide margin.
TEST_CASE("Thompson Condorcet on concentrated Borda-failure posteriors") {
  const ObservationCounts c = ScaledCounts(instances::BordaFailure(), 1e4);
  Rng rng(3);
  std::vector<int> hits(3, 0);
  for (int i = 0; i < 1000; ++i) ++hits[TcsSelect(c, TcsConfig{}, rng)];
  CHECK(hits[2] == 0);
  CHECK(hits[0] + hits[1] == 1000);
  CHECK(hits[0] >= 400);
  CHECK(hits[0] <= 600);
}

TEST_CASE("Thompson Condorcet finds a strict winner") {
  const QdbInstance five = instances::CondorcetFiveArms();
  const auto summary = Summarize(five);
  REQUIRE(summary.condorcet.has_value());
  const ObservationCounts c = ScaledCounts(five, 1e4);
  Rng rng(4);
  int hits = 0;
  for (int i = 0; i < 1000; ++i) {
    hits += TcsSelect(c, TcsConfig{}, rng) == *summary.condorcet;
  }
  CHECK(hits >= 990);
}

TEST_CASE("Thompson Borda on concentrated Borda-failure posteriors") {
  const ObservationCounts c = ScaledCounts(instances::BordaFailure(), 1e4);
  Rng rng(5);
  int hits = 0;
  for (int i = 0; i < 1000; ++i) hits += TbsSelect(c, rng) == 0;
  CHECK(hits >= 990);
}

TEST_CASE("Thompson Condorcet terminates on intransitive posteriors") {
  const ObservationCounts c = ScaledCounts(instances::IntransitiveDice(), 1e4);
  Rng rng(6);
  PosteriorWorkspace ws;
  PolicyDiagnostics diag;
  const TcsConfig cfg{10, 50};
  for (int i = 0; i < 20; ++i) {
    const ArmIndex a = TcsSelect(c, cfg, rng, ws, &diag);
    CHECK(a < 3);
  }
  CHECK(diag.resample_cap_hits == 20);
  CHECK(diag.sampling_rounds == 20 * 50);
}

// Arms 1 and 2 pinned by enormous counts; arm 3's posterior sits on the decoy.
TEST_CASE("Thompson Borda prefers arm 2 when arm 3 looks like the decoy") {
  const double eps = 0.05;
  const QdbInstance trap = instances::ThompsonBordaTrap(eps);
  const FeedbackDistribution decoy = instances::ThompsonBordaTrapDecoy(eps);
  ObservationCounts c(3, 5);
  for (ArmIndex i = 0; i < 2; ++i) {
    std::vector<std::uint64_t> row;
    for (double p : trap.arm(i).probs()) {
      row.push_back(static_cast<std::uint64_t>(std::llround(2e6 * p)));
    }
    Fill(c, i, row);
  }
  std::vector<std::uint64_t> row;
  for (double p : decoy.probs()) {
    row.push_back(static_cast<std::uint64_t>(std::llround(2e6 * p)));
  }
  Fill(c, 2, row);
  Rng rng(7);
  int hits = 0;
  for (int i = 0; i < 1000; ++i) hits += TbsSelect(c, rng) == 1;
  CHECK(hits >= 990);
}

TEST_CASE("posterior means") {
  ObservationCounts c(2, 3);
  Fill(c, 0, {6, 1, 13});
  Fill(c, 1, {1, 1, 1});
  Rng rng(8);
  PosteriorWorkspace ws;
  const int draws = 100000;
  std::vector<double> sum(3, 0.0);
  for (int d = 0; d < draws; ++d) {
    SamplePosteriorWinMatrix(c, rng, ws);
    for (Level k = 0; k < 3; ++k) sum[k] += ws.theta[0][k];
  }
  const double n = 20.0, levels = 3.0;
  const std::vector<double> counts{6, 1, 13};
  for (Level k = 0; k < 3; ++k) {
    const double mean = (counts[k] + 1.0) / (n + levels);
    const double var = mean * (1 - mean) / (n + levels + 1);
    CHECK(std::abs(sum[k] / draws - mean) <= 3.0 * std::sqrt(var / draws));
  }
}

TEST_CASE("confidence width arithmetic") {
  const std::vector<std::uint64_t> pulls{10, 10};
  const auto w = ComputeConfidenceWidths(pulls, 100, 2.0);
  const double gamma = std::sqrt(2.0 * std::log(100.0) / 10.0);
  CHECK(std::abs(w.gamma[0] - 0.9597052) < 1e-7);
  CHECK(std::abs(w.gamma[1] - gamma) < 1e-15);
  CHECK(std::abs(w.width[0] - 1.9194104) < 1e-7);
  CHECK(std::abs(w.width[1] - 2.0 * gamma) < 1e-15);

  const std::vector<std::uint64_t> three{4, 9, 16};
  const auto w3 = ComputeConfidenceWidths(three, 29, 3.0);
  const double l = std::log(29.0);
  const double g[3] = {std::sqrt(3 * l / 4), std::sqrt(3 * l / 9),
                       std::sqrt(3 * l / 16)};
  CHECK(std::abs(w3.width[0] - (g[0] + (g[1] + g[2]) / 2)) < 1e-14);
  CHECK(std::abs(w3.width[2] - (g[2] + (g[0] + g[1]) / 2)) < 1e-14);
}

TEST_CASE("Borda-UCB directives") {
  SUBCASE("equal pulls force the single ucb arm") {
    ObservationCounts c(3, 2);
    Fill(c, 0, {3, 2});
    Fill(c, 1, {1, 4});
    Fill(c, 2, {4, 1});
    const auto index = ComputeBucbIndex(c, 2.0);
    CHECK(index.most_pulled.size() == 3);
    CHECK(BucbSelect(c, BucbConfig{2.0, 1}) == PullDirective{index.ucb_arm});
  }
  SUBCASE("N = (10, 10, 4), ucb arm outside the most-pulled set") {
    ObservationCounts c(3, 2);
    Fill(c, 0, {5, 5});
    Fill(c, 1, {5, 5});
    Fill(c, 2, {2, 2});
    const auto index = ComputeBucbIndex(c, 2.0);
    REQUIRE(index.ucb_arm == 2);
    CHECK(index.most_pulled == std::vector<ArmIndex>{0, 1});
    CHECK(BucbSelect(c, BucbConfig{2.0, 1}) == PullDirective{2});
  }
  SUBCASE("N = (10, 4, 4), ucb arm is the most pulled") {
    ObservationCounts c(3, 2);
    Fill(c, 0, {0, 10});
    Fill(c, 1, {4, 0});
    Fill(c, 2, {4, 0});
    const auto index = ComputeBucbIndex(c, 0.01);
    REQUIRE(index.ucb_arm == 0);
    CHECK(BucbSelect(c, BucbConfig{0.01, 1}) == PullDirective{0});
  }
  SUBCASE("N = (10, 4, 4), ucb arm elsewhere pulls every other arm") {
    ObservationCounts c(3, 2);
    Fill(c, 0, {5, 5});
    Fill(c, 1, {2, 2});
    Fill(c, 2, {2, 2});
    const auto index = ComputeBucbIndex(c, 2.0);
    REQUIRE(index.ucb_arm == 1);
    CHECK(BucbSelect(c, BucbConfig{2.0, 1}) == (PullDirective{1, 2}));
  }
  SUBCASE("needs data") {
    ObservationCounts c(2, 2);
    c.Update(0, 0);
    CHECK_THROWS_AS(ComputeBucbIndex(c, 2.0), InvalidArgument);
    c.Update(0, 1);
    CHECK_THROWS_AS(ComputeBucbIndex(c, 2.0), InvalidArgument);
  }
}

TEST_CASE("policy outputs stay in range on random states") {
  std::mt19937_64 gen(9);
  Rng rng(10);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t k = 2 + gen() % 5;
    const std::size_t levels = 1 + gen() % 5;
    ObservationCounts c(k, levels);
    for (ArmIndex i = 0; i < k; ++i) {
      const std::uint64_t pulls = 1 + gen() % 30;
      for (std::uint64_t p = 0; p < pulls; ++p) c.Update(i, gen() % levels);
    }
    CHECK(TcsSelect(c, TcsConfig{1, 20}, rng) < k);
    CHECK(TbsSelect(c, rng) < k);
    const auto d = BucbSelect(c, BucbConfig{2.0, 1});
    CHECK_FALSE(d.empty());
    CHECK(std::set<ArmIndex>(d.begin(), d.end()).size() == d.size());
    CHECK(std::is_sorted(d.begin(), d.end()));
    for (ArmIndex a : d) CHECK(a < k);
  }
}

TEST_CASE("Borda-UCB is equivariant under arm relabeling") {
  std::mt19937_64 gen(11);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t k = 3 + gen() % 3;
    std::vector<std::vector<std::uint64_t>> rows(k);
    for (auto& row : rows) {
      row = {gen() % 20, gen() % 20, 1 + gen() % 20};
    }
    std::vector<ArmIndex> perm(k);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), gen);

    ObservationCounts original(k, 3), permuted(k, 3);
    for (ArmIndex i = 0; i < k; ++i) {
      Fill(original, i, rows[i]);
      Fill(permuted, perm[i], rows[i]);
    }
    const auto a = ComputeBucbIndex(original, 2.0);
    const auto b = ComputeBucbIndex(permuted, 2.0);
    // Skip states whose ucb argmax is tied; tie-breaks are by index.
    std::vector<double> ucb(k);
    for (ArmIndex i = 0; i < k; ++i) ucb[i] = a.estimated_borda[i] + a.width[i];
    std::sort(ucb.begin(), ucb.end());
    if (ucb[k - 1] - ucb[k - 2] < 1e-9) continue;

    CHECK(b.ucb_arm == perm[a.ucb_arm]);
    auto d = BucbSelect(original, BucbConfig{2.0, 1});
    for (ArmIndex& x : d) x = perm[x];
    std::sort(d.begin(), d.end());
    CHECK(d == BucbSelect(permuted, BucbConfig{2.0, 1}));
  }
}

TEST_CASE("Thompson Borda is equivariant in distribution") {
  ObservationCounts original(3, 3), permuted(3, 3);
  const std::vector<std::vector<std::uint64_t>> rows{
      {4, 3, 5}, {2, 6, 4}, {5, 5, 2}};
  const std::vector<ArmIndex> perm{2, 0, 1};
  for (ArmIndex i = 0; i < 3; ++i) {
    Fill(original, i, rows[i]);
    Fill(permuted, perm[i], rows[i]);
  }
  Rng rng(12);
  const int n = 40000;
  std::vector<double> fa(3, 0.0), fb(3, 0.0);
  for (int t = 0; t < n; ++t) {
    fa[perm[TbsSelect(original, rng)]] += 1.0 / n;
    fb[TbsSelect(permuted, rng)] += 1.0 / n;
  }
  for (ArmIndex i = 0; i < 3; ++i) {
    const double sd = std::sqrt(2.0 * fa[i] * (1 - fa[i]) / n);
    CHECK(std::abs(fa[i] - fb[i]) <= 4.0 * sd + 1e-9);
  }
}

TEST_CASE("Borda-UCB exploits a dominant most-pulled arm") {
  ObservationCounts c(4, 3);
  Fill(c, 0, {0, 0, 20});
  Fill(c, 1, {10, 0, 0});
  Fill(c, 2, {0, 10, 0});
  Fill(c, 3, {5, 5, 0});
  const auto index = ComputeBucbIndex(c, 0.5);
  for (ArmIndex i = 1; i < 4; ++i) {
    CHECK(index.estimated_borda[0] + index.width[0] >
          index.estimated_borda[i] + index.width[i]);
  }
  CHECK(BucbSelect(c, BucbConfig{0.5, 1}) == PullDirective{0});
}

class ScriptedDuel : public DuelPolicy {
 public:
  std::pair<ArmIndex, ArmIndex> SelectPair(Rng&) override { return pair; }
  void Update(ArmIndex winner, ArmIndex loser) override {
    results.emplace_back(winner, loser);
  }
  std::pair<ArmIndex, ArmIndex> pair{1, 4};
  std::vector<std::pair<ArmIndex, ArmIndex>> results;
};

TEST_CASE("duel reduction wiring") {
  auto owned = std::make_unique<ScriptedDuel>();
  ScriptedDuel* script = owned.get();
  DuelReductionPolicy policy(std::move(owned));
  ObservationCounts c(5, 4);
  Rng rng(13);

  CHECK(policy.Select(c, rng) == PullDirective{1, 4});
  policy.Observe(1, 3, rng);
  CHECK(script->results.empty());
  policy.Observe(4, 0, rng);
  REQUIRE(script->results.size() == 1);
  CHECK(script->results[0] == std::pair<ArmIndex, ArmIndex>{1, 4});

  policy.Select(c, rng);
  CHECK_THROWS_AS(policy.Observe(4, 0, rng), InvalidArgument);

  script->results.clear();
  const int n = 20000;
  int first = 0;
  for (int t = 0; t < n; ++t) {
    policy.Select(c, rng);
    policy.Observe(1, 2, rng);
    policy.Observe(4, 2, rng);
  }
  for (const auto& r : script->results) first += r.first == 1;
  CHECK(script->results.size() == static_cast<std::size_t>(n));
  CHECK(std::abs(first / double(n) - 0.5) <= 3.0 * std::sqrt(0.25 / n));
}

TEST_CASE("duel reduction outcomes follow the win probability") {
  auto owned = std::make_unique<ScriptedDuel>();
  ScriptedDuel* script = owned.get();
  script->pair = {0, 1};
  DuelReductionPolicy policy(std::move(owned));
  const auto x = FeedbackDistribution({0.3, 0.2, 0.5});
  const auto y = FeedbackDistribution({0.1, 0.5, 0.4});
  ObservationCounts c(2, 3);
  Rng rng(14);
  const int n = 100000;
  for (int t = 0; t < n; ++t) {
    policy.Select(c, rng);
    policy.Observe(0, SampleCategorical(x, rng), rng);
    policy.Observe(1, SampleCategorical(y, rng), rng);
  }
  int wins = 0;
  for (const auto& r : script->results) wins += r.first == 0;
  const double mu = WinProb(x, y);
  CHECK(std::abs(wins / double(n) - mu) <= 3.0 * std::sqrt(mu * (1 - mu) / n));
}

TEST_CASE("RUCB bounds and bookkeeping") {
  RucbDuelPolicy rucb(3);
  for (ArmIndex i = 0; i < 3; ++i) {
    for (ArmIndex j = 0; j < 3; ++j) {
      CHECK(rucb.UpperBound(i, j) == (i == j ? 0.5 : 1.0));
    }
  }
  std::mt19937_64 gen(15);
  std::uint64_t self = 0;
  for (int t = 0; t < 1000; ++t) {
    const ArmIndex a = gen() % 3, b = gen() % 3;
    self += a == b;
    rucb.Update(a, b);
  }
  std::uint64_t total = 0;
  for (ArmIndex i = 0; i < 3; ++i) {
    CHECK(rucb.wins(i, i) == 0);
    for (ArmIndex j = 0; j < 3; ++j) total += rucb.wins(i, j);
  }
  CHECK(total + self == rucb.duels());
  CHECK(rucb.duels() == 1000);
  CHECK_THROWS_AS(rucb.Update(3, 0), InvalidArgument);
}

TEST_CASE("RUCB settles on the better of two arms") {
  RucbDuelPolicy rucb(2);
  for (int t = 0; t < 900; ++t) rucb.Update(0, 1);
  for (int t = 0; t < 100; ++t) rucb.Update(1, 0);
  Rng rng(16);
  int first = 0;
  for (int t = 0; t < 1000; ++t) first += rucb.SelectPair(rng).first == 0;
  CHECK(first == 1000);
}

}  // namespace
}  // namespace qdb
