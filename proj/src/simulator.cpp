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

#include "qdb/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "qdb/sampling.hpp"

namespace qdb {

PolicyKind ParsePolicyKind(const std::string& name) {
  if (name == "tcs") return PolicyKind::kTcs;
  if (name == "tbs") return PolicyKind::kTbs;
  if (name == "bucb") return PolicyKind::kBucb;
  if (name == "duel-reduction") return PolicyKind::kDuelReduction;
  throw InvalidArgument("unknown policy '" + name + "'");
}

std::string PolicyKindName(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::kTcs:
      return "tcs";
    case PolicyKind::kTbs:
      return "tbs";
    case PolicyKind::kBucb:
      return "bucb";
    case PolicyKind::kDuelReduction:
      return "duel-reduction";
    case PolicyKind::kFixedArm:
      return "fixed";
  }
  return "unknown";
}

std::unique_ptr<Policy> MakePolicy(const PolicySpec& spec,
                                   std::size_t num_arms) {
  switch (spec.kind) {
    case PolicyKind::kTcs:
      return std::make_unique<ThompsonCondorcetPolicy>(spec.tcs);
    case PolicyKind::kTbs:
      return std::make_unique<ThompsonBordaPolicy>(spec.tcs.t0);
    case PolicyKind::kBucb:
      return std::make_unique<BordaUcbPolicy>(spec.bucb);
    case PolicyKind::kDuelReduction:
      return std::make_unique<DuelReductionPolicy>(
          std::make_unique<RucbDuelPolicy>(num_arms, spec.rucb_alpha));
    case PolicyKind::kFixedArm:
      if (spec.fixed_arm >= num_arms) {
        throw InvalidArgument("fixed arm out of range");
      }
      return std::make_unique<FixedArmPolicy>(spec.fixed_arm);
  }
  throw InvalidArgument("unknown policy kind");
}

void RunConfig::Validate() const {
  if (replications < 1) throw InvalidArgument("replications must be >= 1");
  if (horizon < 1) throw InvalidArgument("horizon must be >= 1");
  const auto policy_ptr = MakePolicy(policy, instance.num_arms());
  const std::uint64_t warmup = policy_ptr->warmup_pulls() * instance.num_arms();
  if (horizon < warmup) {
    std::ostringstream msg;
    msg << "horizon " << horizon << " is shorter than the " << warmup
        << " warm-up pulls";
    throw InvalidArgument(msg.str());
  }
  if (checkpoints.empty()) throw InvalidArgument("no checkpoints given");
  for (std::size_t c = 0; c < checkpoints.size(); ++c) {
    if (checkpoints[c] < 1 || checkpoints[c] > horizon) {
      throw InvalidArgument("checkpoint outside [1, horizon]");
    }
    if (c > 0 && checkpoints[c] <= checkpoints[c - 1]) {
      throw InvalidArgument("checkpoints must be strictly increasing");
    }
  }
}

RegretTrace Simulate(const QdbInstance& instance,
                     const PreferenceSummary& summary, Policy& policy,
                     std::uint64_t horizon,
                     const std::vector<std::uint64_t>& checkpoints, Rng& rng) {
  const std::size_t k = instance.num_arms();
  const bool has_condorcet = summary.condorcet.has_value();

  RegretTrace trace;
  trace.seed = rng.seed();
  trace.checkpoints = checkpoints;
  trace.regret_borda.reserve(checkpoints.size());
  if (has_condorcet) trace.regret_condorcet.reserve(checkpoints.size());

  ObservationCounts counts(k, instance.levels());
  double regret_condorcet = 0.0;
  double regret_borda = 0.0;
  std::size_t next_checkpoint = 0;

  auto pull = [&](ArmIndex arm) {
    if (arm >= k) throw InvalidArgument("policy selected an invalid arm");
    const Level feedback = SampleCategorical(instance.arm(arm), rng);
    counts.Update(arm, feedback);
    policy.Observe(arm, feedback, rng);
    regret_borda += summary.gap_borda[arm];
    if (has_condorcet) regret_condorcet += summary.gap_condorcet[arm];
    while (next_checkpoint < checkpoints.size() &&
           checkpoints[next_checkpoint] == counts.round()) {
      trace.regret_borda.push_back(regret_borda);
      if (has_condorcet) trace.regret_condorcet.push_back(regret_condorcet);
      ++next_checkpoint;
    }
  };

  for (std::uint64_t w = 0; w < policy.warmup_pulls(); ++w) {
    for (ArmIndex arm = 0; arm < k && counts.round() < horizon; ++arm) {
      pull(arm);
    }
  }
  while (counts.round() < horizon) {
    const PullDirective directive = policy.Select(counts, rng);
    if (directive.empty()) throw InvalidArgument("policy returned no arms");
    for (ArmIndex arm : directive) {
      if (counts.round() >= horizon) break;
      pull(arm);
    }
  }

  trace.pulls.assign(counts.pulls().begin(), counts.pulls().end());
  trace.diagnostics = policy.diagnostics();
  return trace;
}

RegretTrace RunOnce(const RunConfig& cfg, std::size_t replication) {
  cfg.Validate();
  const PreferenceSummary summary = Summarize(cfg.instance);
  if (cfg.require_condorcet && !summary.condorcet) {
    throw UnsupportedMetric(
        "Condorcet regret requested but the instance has no Condorcet winner");
  }
  auto policy = MakePolicy(cfg.policy, cfg.instance.num_arms());
  Rng rng(cfg.base_seed + replication);
  return Simulate(cfg.instance, summary, *policy, cfg.horizon, cfg.checkpoints,
                  rng);
}

RegretAggregate Aggregate(std::string policy, std::vector<RegretTrace> traces) {
  if (traces.empty()) throw InvalidArgument("nothing to aggregate");
  RegretAggregate agg;
  agg.policy = std::move(policy);
  agg.checkpoints = traces.front().checkpoints;
  agg.has_condorcet = !traces.front().regret_condorcet.empty();
  agg.runs = traces.size();

  const std::size_t m = agg.checkpoints.size();
  auto moments = [&](auto member, std::vector<double>& mean,
                     std::vector<double>& std_dev) {
    mean.assign(m, 0.0);
    std_dev.assign(m, 0.0);
    const double n = static_cast<double>(traces.size());
    for (std::size_t c = 0; c < m; ++c) {
      double sum = 0.0;
      for (const auto& trace : traces) sum += (trace.*member)[c];
      mean[c] = sum / n;
      if (traces.size() < 2) continue;
      double sq = 0.0;
      for (const auto& trace : traces) {
        const double d = (trace.*member)[c] - mean[c];
        sq += d * d;
      }
      std_dev[c] = std::sqrt(sq / (n - 1.0));
    }
  };
  moments(&RegretTrace::regret_borda, agg.borda_mean, agg.borda_std);
  if (agg.has_condorcet) {
    moments(&RegretTrace::regret_condorcet, agg.condorcet_mean,
            agg.condorcet_std);
  }
  agg.traces = std::move(traces);
  return agg;
}

RegretAggregate RunMany(const RunConfig& cfg) {
  cfg.Validate();
  const PreferenceSummary summary = Summarize(cfg.instance);
  if (cfg.require_condorcet && !summary.condorcet) {
    throw UnsupportedMetric(
        "Condorcet regret requested but the instance has no Condorcet winner");
  }

  std::vector<RegretTrace> traces(cfg.replications);
  std::size_t workers = cfg.threads;
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, cfg.replications);

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (std::size_t r = next++; r < cfg.replications; r = next++) {
      try {
        auto policy = MakePolicy(cfg.policy, cfg.instance.num_arms());
        Rng rng(cfg.base_seed + r);
        traces[r] = Simulate(cfg.instance, summary, *policy, cfg.horizon,
                             cfg.checkpoints, rng);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);

  auto policy = MakePolicy(cfg.policy, cfg.instance.num_arms());
  return Aggregate(policy->name(), std::move(traces));
}

std::vector<std::uint64_t> LogSpacedCheckpoints(std::uint64_t first,
                                                std::uint64_t last,
                                                std::size_t count) {
  if (last < 1) throw InvalidArgument("last checkpoint must be positive");
  first = std::clamp<std::uint64_t>(first, 1, last);
  std::vector<std::uint64_t> out;
  if (count <= 1 || first == last) return {last};
  const double lo = std::log(static_cast<double>(first));
  const double hi = std::log(static_cast<double>(last));
  for (std::size_t i = 0; i < count; ++i) {
    const double x = lo + (hi - lo) * static_cast<double>(i) /
                              static_cast<double>(count - 1);
    auto t = static_cast<std::uint64_t>(std::llround(std::exp(x)));
    t = std::clamp<std::uint64_t>(t, first, last);
    if (out.empty() || t > out.back()) out.push_back(t);
  }
  if (out.back() != last) out.push_back(last);
  return out;
}

}  // namespace qdb
