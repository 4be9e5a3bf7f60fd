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

#include "qdb/cli.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "qdb/instances.hpp"
#include "qdb/letor.hpp"

namespace qdb::cli {
namespace {

using nlohmann::json;

std::string FormatReal(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.15g", x);
  return buf;
}

json Real(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

QdbInstance LoadInstance(const std::string& spec, double eps) {
  for (const auto& name : instances::BuiltinNames()) {
    if (spec == name) return instances::Builtin(spec, eps);
  }
  std::ifstream in(spec);
  if (!in) {
    throw InvalidArgument("'" + spec +
                          "' is neither a built-in instance nor a readable file");
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return instances::FromJson(buffer.str());
}

std::vector<double> ParseProbabilityList(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw InvalidArgument("bad number '" + item + "' in list");
    }
  }
  return out;
}

std::size_t ThreadsFromEnv() {
  const char* value = std::getenv("QDB_THREADS");
  if (value == nullptr || *value == '\0') return 0;
  char* end = nullptr;
  const long n = std::strtol(value, &end, 10);
  if (*end != '\0' || n < 0) {
    throw InvalidArgument("QDB_THREADS must be a non-negative integer");
  }
  return static_cast<std::size_t>(n);
}

// Writes `content` to `path` through a temporary file so that a failure
// never leaves a partial file behind. An empty path means `out`.
void Deliver(const std::string& path, const std::string& content,
             std::ostream& out) {
  if (path.empty()) {
    out << content;
    return;
  }
  const std::string tmp = path + ".tmp";
  {
    std::ofstream file(tmp, std::ios::binary | std::ios::trunc);
    if (!file) throw InvalidArgument("cannot write '" + tmp + "'");
    file << content;
    file.flush();
    if (!file) {
      std::filesystem::remove(tmp);
      throw InvalidArgument("failed writing '" + tmp + "'");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw InvalidArgument("cannot move output into '" + path +
                          "': " + ec.message());
  }
}

struct RunOptions {
  std::string instance;
  double instance_eps = 0.05;
  std::string policy;
  std::uint64_t horizon = 0;
  std::size_t runs = 1;
  std::uint64_t seed = 0;
  std::vector<std::uint64_t> checkpoints;
  std::uint64_t t0 = 10;
  std::uint64_t resample_cap = 1000;
  std::uint64_t tau = 1;
  std::optional<double> alpha;
  double epsilon_prime = 0.1;
  double rucb_alpha = 0.51;
  std::string out;
};

struct BoundsOptions {
  std::string instance;
  double instance_eps = 0.05;
  analysis::BoundsConfig cfg;
  std::string out;
};

struct IngestOptions {
  std::string letor;
  std::vector<int> features;
  std::optional<std::size_t> levels;
  std::vector<int> ascending;
  std::string out;
};

struct ValidateOptions {
  std::vector<std::string> lemmas{"1", "2", "3", "4", "c1"};
  std::vector<std::uint64_t> n{50, 100, 200};
  std::vector<double> eps{0.1, 0.2, 0.4};
  std::uint64_t trials = 100000;
  std::string dist = "0.2,0.3,0.5";
  std::uint64_t seed = 0;
  std::string out;
};

std::string DoRun(const RunOptions& o) {
  QdbInstance instance = LoadInstance(o.instance, o.instance_eps);
  PolicySpec spec;
  spec.kind = ParsePolicyKind(o.policy);
  spec.tcs.t0 = o.t0;
  spec.tcs.resample_cap = o.resample_cap;
  spec.bucb.tau = o.tau;
  spec.bucb.alpha =
      o.alpha ? *o.alpha
              : analysis::RecommendedAlpha(instance.num_arms(), o.epsilon_prime)
                    .alpha;
  spec.rucb_alpha = o.rucb_alpha;

  const std::uint64_t warmup =
      MakePolicy(spec, instance.num_arms())->warmup_pulls();
  std::vector<std::uint64_t> checkpoints = o.checkpoints;
  if (checkpoints.empty()) {
    const std::uint64_t first =
        std::max<std::uint64_t>(1, warmup * instance.num_arms());
    checkpoints = LogSpacedCheckpoints(first, o.horizon, 30);
  }

  const RunConfig cfg{.instance = std::move(instance),
                      .policy = spec,
                      .horizon = o.horizon,
                      .base_seed = o.seed,
                      .replications = o.runs,
                      .checkpoints = std::move(checkpoints),
                      .require_condorcet = spec.kind == PolicyKind::kTcs,
                      .threads = ThreadsFromEnv()};
  return EmitCsv(RunMany(cfg));
}

std::string DoBounds(const BoundsOptions& o) {
  const QdbInstance instance = LoadInstance(o.instance, o.instance_eps);
  return BoundsReportJson(analysis::RegretConstants(instance, o.cfg));
}

std::string DoIngest(const IngestOptions& o, std::ostream& err) {
  const letor::LetorDataset dataset = letor::ParseFile(o.letor);
  letor::BuildOptions build;
  build.feature_ids = o.features;
  build.levels = o.levels;
  build.ascending.insert(o.ascending.begin(), o.ascending.end());
  const letor::BuildResult result = letor::BuildInstance(dataset, build);
  for (const auto& warning : result.warnings) {
    err << "warning: " << warning << "\n";
  }
  return instances::ToJson(result.instance) + "\n";
}

std::string DoValidate(const ValidateOptions& o, bool& all_passed) {
  const FeedbackDistribution p =
      FeedbackDistribution::Renormalized(ParseProbabilityList(o.dist), 1e-6);
  Rng rng(o.seed);
  std::ostringstream table;
  table << "check,L,n,eps,trials,empirical_tail,bound,informative,result\n";
  all_passed = true;
  for (const auto& name : o.lemmas) {
    const auto kind = analysis::ParseConcentrationKind(name);
    for (std::uint64_t n : o.n) {
      for (double eps : o.eps) {
        const auto r =
            analysis::ConcentrationCheck(kind, p, n, eps, o.trials, rng);
        all_passed = all_passed && r.passed;
        table << analysis::ConcentrationKindName(kind) << ',' << p.levels()
              << ',' << n << ',' << FormatReal(eps) << ',' << r.trials << ','
              << FormatReal(r.empirical_tail) << ',' << FormatReal(r.bound)
              << ',' << (r.informative ? "yes" : "no") << ','
              << (r.passed ? "pass" : "FAIL") << '\n';
      }
    }
  }
  return table.str();
}

std::string DoInstances() {
  std::ostringstream table;
  table << "name,K,L,condorcet_winner,borda_winner\n";
  for (const auto& name : instances::BuiltinNames()) {
    const QdbInstance instance = instances::Builtin(name);
    const PreferenceSummary summary = Summarize(instance);
    table << name << ',' << instance.num_arms() << ',' << instance.levels()
          << ','
          << (summary.condorcet ? std::to_string(*summary.condorcet) : "")
          << ',' << summary.borda_winner << '\n';
  }
  return table.str();
}

}  // namespace

std::string EmitCsv(const RegretAggregate& aggregate) {
  std::ostringstream csv;
  csv << "t,policy,regret_condorcet_mean,regret_condorcet_std,"
         "regret_borda_mean,regret_borda_std,runs\n";
  for (std::size_t c = 0; c < aggregate.checkpoints.size(); ++c) {
    csv << aggregate.checkpoints[c] << ',' << aggregate.policy << ',';
    if (aggregate.has_condorcet) {
      csv << FormatReal(aggregate.condorcet_mean[c]) << ','
          << FormatReal(aggregate.condorcet_std[c]);
    } else {
      csv << ',';
    }
    csv << ',' << FormatReal(aggregate.borda_mean[c]) << ','
        << FormatReal(aggregate.borda_std[c]) << ',' << aggregate.runs << '\n';
  }
  return csv.str();
}

std::string BoundsReportJson(const analysis::BoundsReport& report) {
  json doc;
  doc["log"] = "natural";
  doc["K"] = report.num_arms;
  doc["L"] = report.levels;
  doc["config"] = {{"epsilon", report.config.epsilon},
                   {"epsilon_prime", report.config.epsilon_prime},
                   {"delta", report.config.delta},
                   {"tolerance", report.config.tolerance}};
  doc["condorcet_winner"] = report.condorcet_winner
                                ? json(*report.condorcet_winner)
                                : json(nullptr);
  doc["borda_winner"] = report.borda_winner;
  doc["c1"] = Real(report.c1);
  doc["c1_prime"] = Real(report.c1_prime);
  doc["recommended_alpha"] = Real(report.recommended_alpha.alpha);
  doc["thompson_condorcet_constant"] =
      report.thompson_condorcet_constant
          ? Real(*report.thompson_condorcet_constant)
          : json(nullptr);
  doc["duel_lower_bound_constant"] =
      report.duel_lower_bound_constant ? Real(*report.duel_lower_bound_constant)
                                       : json(nullptr);
  doc["pac_sample_bound"] = Real(report.pac_sample_bound);
  doc["borda_ucb_log_coefficient"] = Real(report.borda_ucb_log_coefficient);
  doc["flags"] = report.flags;
  doc["arms"] = json::array();
  for (const auto& arm : report.arms) {
    json a;
    a["arm"] = arm.arm;
    a["p_star"] = arm.p_star ? json(*arm.p_star) : json(nullptr);
    a["kl_to_p_star"] = Real(arm.kl_to_p_star);
    a["kl_to_winner"] = Real(arm.kl_to_winner);
    a["upper_bound_term"] = Real(arm.upper_bound_term);
    a["lower_bound_term"] = Real(arm.lower_bound_term);
    a["flags"] = arm.flags;
    doc["arms"].push_back(std::move(a));
  }
  return doc.dump(2) + "\n";
}

int Execute(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Qualitative dueling bandit engine"};
  app.require_subcommand(1, 1);

  RunOptions run;
  auto* run_cmd = app.add_subcommand("run", "simulate a policy, emit CSV");
  run_cmd->add_option("--instance", run.instance, "built-in name or JSON file")
      ->required();
  run_cmd->add_option("--instance-eps", run.instance_eps,
                      "eps for thm2 / thm5-* built-ins");
  run_cmd->add_option("--policy", run.policy)
      ->required()
      ->check(CLI::IsMember({"tcs", "tbs", "bucb", "duel-reduction"}));
  run_cmd->add_option("--horizon", run.horizon)->required();
  run_cmd->add_option("--runs", run.runs);
  run_cmd->add_option("--seed", run.seed);
  run_cmd->add_option("--checkpoints", run.checkpoints)->delimiter(',');
  run_cmd->add_option("--t0", run.t0);
  run_cmd->add_option("--resample-cap", run.resample_cap);
  run_cmd->add_option("--tau", run.tau);
  run_cmd->add_option("--alpha", run.alpha);
  run_cmd->add_option("--epsilon-prime", run.epsilon_prime);
  run_cmd->add_option("--rucb-alpha", run.rucb_alpha);
  run_cmd->add_option("--out", run.out);

  BoundsOptions bounds;
  auto* bounds_cmd = app.add_subcommand("bounds", "bound constants as JSON");
  bounds_cmd->add_option("--instance", bounds.instance)->required();
  bounds_cmd->add_option("--instance-eps", bounds.instance_eps);
  bounds_cmd->add_option("--delta", bounds.cfg.delta);
  bounds_cmd->add_option("--epsilon", bounds.cfg.epsilon);
  bounds_cmd->add_option("--epsilon-prime", bounds.cfg.epsilon_prime);
  bounds_cmd->add_option("--tolerance", bounds.cfg.tolerance);
  bounds_cmd->add_option("--out", bounds.out);

  IngestOptions ingest;
  auto* ingest_cmd =
      app.add_subcommand("ingest", "LETOR file to instance JSON");
  ingest_cmd->add_option("--letor", ingest.letor)->required();
  ingest_cmd->add_option("--features", ingest.features)
      ->required()
      ->delimiter(',');
  ingest_cmd->add_option("--levels", ingest.levels);
  ingest_cmd->add_option("--ascending", ingest.ascending)->delimiter(',');
  ingest_cmd->add_option("--out", ingest.out);

  ValidateOptions validate;
  auto* validate_cmd =
      app.add_subcommand("validate", "Monte-Carlo concentration checks");
  validate_cmd->add_option("--lemma", validate.lemmas)
      ->delimiter(',')
      ->check(CLI::IsMember({"1", "2", "3", "4", "c1"}));
  validate_cmd->add_option("--n", validate.n)->delimiter(',');
  validate_cmd->add_option("--eps", validate.eps)->delimiter(',');
  validate_cmd->add_option("--trials", validate.trials);
  validate_cmd->add_option("--dist", validate.dist,
                           "comma-separated probabilities");
  validate_cmd->add_option("--seed", validate.seed);
  validate_cmd->add_option("--out", validate.out);

  auto* instances_cmd = app.add_subcommand("instances", "list built-ins");

  std::vector<std::string> argv(args.rbegin(), args.rend());
  try {
    app.parse(argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return e.get_exit_code() == 0 ? 2 : e.get_exit_code();
  }

  try {
    if (run_cmd->parsed()) {
      Deliver(run.out, DoRun(run), out);
    } else if (bounds_cmd->parsed()) {
      Deliver(bounds.out, DoBounds(bounds), out);
    } else if (ingest_cmd->parsed()) {
      Deliver(ingest.out, DoIngest(ingest, err), out);
    } else if (validate_cmd->parsed()) {
      bool all_passed = false;
      Deliver(validate.out, DoValidate(validate, all_passed), out);
      if (!all_passed) {
        err << "error: at least one concentration check failed\n";
        return 1;
      }
    } else if (instances_cmd->parsed()) {
      out << DoInstances();
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace qdb::cli
