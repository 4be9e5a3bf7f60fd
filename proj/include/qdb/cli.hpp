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

#ifndef QDB_CLI_HPP_
#define QDB_CLI_HPP_

#include <ostream>
#include <string>
#include <vector>

#include "qdb/analysis.hpp"
#include "qdb/simulator.hpp"

namespace qdb::cli {

// Header plus one row per checkpoint:
// t,policy,regret_condorcet_mean,regret_condorcet_std,regret_borda_mean,
// regret_borda_std,runs
// Condorcet columns are empty when the instance has no Condorcet winner.
std::string EmitCsv(const RegretAggregate& aggregate);

// Non-finite values are written as null; the flags say why.
std::string BoundsReportJson(const analysis::BoundsReport& report);

// Runs one subcommand (run, bounds, ingest, validate, instances). `args`
// excludes the program name. Results go to `out` unless --out names a file,
// which is written atomically. Diagnostics go to `err`. Returns the process
// exit status.
int Execute(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace qdb::cli

#endif  // QDB_CLI_HPP_
