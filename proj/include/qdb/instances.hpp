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

#ifndef QDB_INSTANCES_HPP_
#define QDB_INSTANCES_HPP_

#include <string>
#include <utility>
#include <vector>

#include "qdb/core.hpp"

namespace qdb::instances {

// Three arms on five levels where Thompson Borda sampling is lured away
// from the Borda winner (arm 0) by a pessimistic estimate of arm 2:
//   (e, e, 1-4e, e, e), (e, 1/4+e, 1/2-4e, 1/4+e, e), (1/2, 1/4, e, 1/4-2e, e).
// Requires 0 < e < 1/8.
QdbInstance ThompsonBordaTrap(double eps);

// The pessimistic third-arm distribution (1/2, 1/4-2e, e, 1/4, e) used with
// ThompsonBordaTrap.
FeedbackDistribution ThompsonBordaTrapDecoy(double eps);

// K = 3, L = 4 instance on which Thompson Borda sampling shows polynomial
// regret: (0,0,1,0), (0,.5,0,.5), (.2,.4,.3,.1).
QdbInstance BordaFailure();

// Pair of three-arm instances (gamma, theta) that differ only in the third
// arm; theta's Borda gap for arm 1 is e/8. The fourth coordinates are
// 1/4 - 2e (theta) and 1/4 (gamma) so both rows sum to one.
struct InstancePair {
  QdbInstance gamma;
  QdbInstance theta;
};
InstancePair BordaLowerBoundPair(double eps);

// Two medicines on the side-effect scale severe < moderate < none:
// A = (0.002, 0.003, 0.995), B = (0.003, 0.002, 0.995).
QdbInstance Medicine();

// Intransitive dice: three arms uniform on faces {2,4,9}, {1,6,8}, {3,5,7}
// of a nine-level scale. No Condorcet winner.
QdbInstance IntransitiveDice();

// Five-arm, four-level instance with a Condorcet winner (arm 0) used for
// desk-scale Condorcet regret experiments.
QdbInstance CondorcetFiveArms();

// Two-level pair (winner, challenger) with winner = (e^{-1/e'}, 1 - e^{-1/e'})
// and challenger = (e', 1 - e'), where beating the winner needs far more
// evidence than the duel outcome suggests. Requires 0 < e' <= 1/2.
std::pair<FeedbackDistribution, FeedbackDistribution> KlGapPair(
    double eps_prime);

// Names accepted by Builtin: thm2, borda-failure, thm5-gamma, thm5-theta,
// medicine, dice, condorcet5. `eps` parameterizes thm2 and thm5-*.
std::vector<std::string> BuiltinNames();
QdbInstance Builtin(const std::string& name, double eps = 0.05);

// {"L": int, "arms": [[p_1, ..., p_L], ...]}. Rows within 1e-6 of summing
// to one are renormalized; anything else is rejected.
QdbInstance FromJson(const std::string& text);
std::string ToJson(const QdbInstance& instance);

}  // namespace qdb::instances

#endif  // QDB_INSTANCES_HPP_
