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

#ifndef QDB_SIMULATOR_HPP_
#define QDB_SIMULATOR_HPP_

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "qdb/core.hpp"
#include "qdb/policies.hpp"

namespace qdb {

class UnsupportedMetric : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class PolicyKind { kTcs, kTbs, kBucb, kDuelReduction, kFixedArm };

// Parses "tcs", "tbs", "bucb", "duel-reduction"; throws InvalidArgument.
PolicyKind ParsePolicyKind(const std::string& name);
std::string PolicyKindName(PolicyKind kind);

struct PolicySpec {
  PolicyKind kind = PolicyKind::kTcs;
  TcsConfig tcs;  // t0 is shared with Thompson Borda sampling
  BucbConfig bucb;
  double rucb_alpha = 0.51;
  ArmIndex fixed_arm = 0;
};

std::unique_ptr<Policy> MakePolicy(const PolicySpec& spec,
                                   std::size_t num_arms);

struct RunConfig {
  QdbInstance instance;
  PolicySpec policy;
  std::uint64_t horizon = 0;
  std::uint64_t base_seed = 0;
  std::size_t replications = 1;
  // Strictly increasing rounds in [1, horizon].
  std::vector<std::uint64_t> checkpoints;
  // Raise UnsupportedMetric when the instance has no Condorcet winner.
  bool require_condorcet = false;
  // Worker threads for RunMany; 0 means all hardware threads.
  std::size_t threads = 0;

  void Validate() const;
};

struct RegretTrace {
  std::uint64_t seed = 0;
  std::vector<std::uint64_t> checkpoints;
  // Cumulative regret at each checkpoint. regret_condorcet is empty when the
  // instance has no Condorcet winner.
  std::vector<double> regret_condorcet;
  std::vector<double> regret_borda;
  // N_i at the horizon.
  std::vector<std::uint64_t> pulls;
  PolicyDiagnostics diagnostics;
};

// Runs `policy` for `horizon` rounds: round-robin warm-up, then the policy
// loop. A directive cut off by the horizon is truncated.
RegretTrace Simulate(const QdbInstance& instance,
                     const PreferenceSummary& summary, Policy& policy,
                     std::uint64_t horizon,
                     const std::vector<std::uint64_t>& checkpoints, Rng& rng);

// Replication r uses seed base_seed + r.
RegretTrace RunOnce(const RunConfig& cfg, std::size_t replication);

struct RegretAggregate {
  std::string policy;
  std::vector<std::uint64_t> checkpoints;
  bool has_condorcet = false;
  std::size_t runs = 0;
  std::vector<double> condorcet_mean;
  std::vector<double> condorcet_std;
  std::vector<double> borda_mean;
  std::vector<double> borda_std;
  // Per-replication traces ordered by replication index.
  std::vector<RegretTrace> traces;
};

// Mean and sample standard deviation (n - 1 denominator; 0 for a single
// run), summed in replication order so results do not depend on scheduling.
RegretAggregate Aggregate(std::string policy, std::vector<RegretTrace> traces);

RegretAggregate RunMany(const RunConfig& cfg);

// `count` log-spaced rounds from `first` to `last`, rounded, deduplicated,
// always ending at `last`.
std::vector<std::uint64_t> LogSpacedCheckpoints(std::uint64_t first,
                                                std::uint64_t last,
                                                std::size_t count);

}  // namespace qdb

#endif  // QDB_SIMULATOR_HPP_
