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

#include "qdb/instances.hpp"

#include <cmath>
#include <sstream>

#include "json.hpp"

namespace qdb::instances {
namespace {

void CheckEps(double eps) {
  if (!(eps > 0.0 && eps < 0.125)) {
    throw InvalidArgument("eps must lie in (0, 1/8)");
  }
}

constexpr double kJsonTolerance = 1e-6;

}  // namespace

QdbInstance ThompsonBordaTrap(double eps) {
  CheckEps(eps);
  const double e = eps;
  return QdbInstance({
      FeedbackDistribution({e, e, 1.0 - 4.0 * e, e, e}),
      FeedbackDistribution({e, 0.25 + e, 0.5 - 4.0 * e, 0.25 + e, e}),
      FeedbackDistribution({0.5, 0.25, e, 0.25 - 2.0 * e, e}),
  });
}

FeedbackDistribution ThompsonBordaTrapDecoy(double eps) {
  CheckEps(eps);
  return FeedbackDistribution({0.5, 0.25 - 2.0 * eps, eps, 0.25, eps});
}

QdbInstance BordaFailure() {
  return QdbInstance({
      FeedbackDistribution({0.0, 0.0, 1.0, 0.0}),
      FeedbackDistribution({0.0, 0.5, 0.0, 0.5}),
      FeedbackDistribution({0.2, 0.4, 0.3, 0.1}),
  });
}

InstancePair BordaLowerBoundPair(double eps) {
  QdbInstance theta = ThompsonBordaTrap(eps);
  QdbInstance gamma({theta.arm(0), theta.arm(1), ThompsonBordaTrapDecoy(eps)});
  return {std::move(gamma), std::move(theta)};
}

QdbInstance Medicine() {
  return QdbInstance({
      FeedbackDistribution({0.002, 0.003, 0.995}),
      FeedbackDistribution({0.003, 0.002, 0.995}),
  });
}

QdbInstance IntransitiveDice() {
  auto die = [](std::initializer_list<int> faces) {
    std::vector<double> probs(9, 0.0);
    for (int face : faces) probs[static_cast<std::size_t>(face - 1)] = 1.0 / 3.0;
    return FeedbackDistribution(std::move(probs));
  };
  return QdbInstance({die({2, 4, 9}), die({1, 6, 8}), die({3, 5, 7})});
}

QdbInstance CondorcetFiveArms() {
  return QdbInstance({
      FeedbackDistribution({0.10, 0.15, 0.30, 0.45}),
      FeedbackDistribution({0.15, 0.20, 0.35, 0.30}),
      FeedbackDistribution({0.05, 0.40, 0.35, 0.20}),
      FeedbackDistribution({0.30, 0.20, 0.20, 0.30}),
      FeedbackDistribution({0.25, 0.30, 0.30, 0.15}),
  });
}

std::pair<FeedbackDistribution, FeedbackDistribution> KlGapPair(
    double eps_prime) {
  if (!(eps_prime > 0.0 && eps_prime <= 0.5)) {
    throw InvalidArgument("eps' must lie in (0, 1/2]");
  }
  const double tail = std::exp(-1.0 / eps_prime);
  return {FeedbackDistribution({tail, 1.0 - tail}),
          FeedbackDistribution({eps_prime, 1.0 - eps_prime})};
}

std::vector<std::string> BuiltinNames() {
  return {"thm2",     "borda-failure", "thm5-gamma", "thm5-theta",
          "medicine", "dice",          "condorcet5"};
}

QdbInstance Builtin(const std::string& name, double eps) {
  if (name == "thm2") return ThompsonBordaTrap(eps);
  if (name == "borda-failure") return BordaFailure();
  if (name == "thm5-gamma") return BordaLowerBoundPair(eps).gamma;
  if (name == "thm5-theta") return BordaLowerBoundPair(eps).theta;
  if (name == "medicine") return Medicine();
  if (name == "dice") return IntransitiveDice();
  if (name == "condorcet5") return CondorcetFiveArms();
  throw InvalidArgument("unknown built-in instance '" + name + "'");
}

QdbInstance FromJson(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidArgument(std::string("instance JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("arms") || !doc["arms"].is_array()) {
    throw InvalidArgument("instance JSON needs an \"arms\" array");
  }
  std::size_t levels = 0;
  if (doc.contains("L")) {
    if (!doc["L"].is_number_integer() || doc["L"].get<long long>() < 1) {
      throw InvalidArgument("instance JSON \"L\" must be a positive integer");
    }
    levels = doc["L"].get<std::size_t>();
  }
  std::vector<FeedbackDistribution> arms;
  std::size_t index = 0;
  for (const auto& row : doc["arms"]) {
    if (!row.is_array()) throw InvalidArgument("each arm must be an array");
    std::vector<double> probs;
    for (const auto& v : row) {
      if (!v.is_number()) throw InvalidArgument("probabilities must be numbers");
      probs.push_back(v.get<double>());
    }
    if (levels != 0 && probs.size() != levels) {
      std::ostringstream msg;
      msg << "arm " << index << " has " << probs.size() << " levels, expected "
          << levels;
      throw InvalidArgument(msg.str());
    }
    try {
      arms.push_back(
          FeedbackDistribution::Renormalized(std::move(probs), kJsonTolerance));
    } catch (const InvalidArgument& e) {
      std::ostringstream msg;
      msg << "arm " << index << ": " << e.what();
      throw InvalidArgument(msg.str());
    }
    ++index;
  }
  return QdbInstance(std::move(arms));
}

std::string ToJson(const QdbInstance& instance) {
  nlohmann::json doc;
  doc["L"] = instance.levels();
  doc["arms"] = nlohmann::json::array();
  for (const auto& arm : instance.arms()) {
    doc["arms"].push_back(
        std::vector<double>(arm.probs().begin(), arm.probs().end()));
  }
  return doc.dump(2);
}

}  // namespace qdb::instances
