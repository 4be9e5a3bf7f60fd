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

#ifndef QDB_LETOR_HPP_
#define QDB_LETOR_HPP_

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "qdb/core.hpp"

namespace qdb::letor {

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what);

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

struct LetorRecord {
  int relevance = 0;
  std::int64_t query_id = 0;
  std::map<int, double> features;

  friend bool operator==(const LetorRecord&, const LetorRecord&) = default;
};

struct QueryGroup {
  std::int64_t query_id = 0;
  // File order.
  std::vector<LetorRecord> documents;

  friend bool operator==(const QueryGroup&, const QueryGroup&) = default;
};

struct LetorDataset {
  // Ordered by first appearance of each qid.
  std::vector<QueryGroup> queries;
  // max relevance + 1.
  std::size_t label_levels = 0;
  std::set<int> feature_ids;

  friend bool operator==(const LetorDataset&, const LetorDataset&) = default;
};

// Parses "<rel> qid:<q> <fid>:<val> ... # comment" lines. Blank lines and
// whole-line comments are skipped; anything after '#' is ignored. Throws
// ParseError carrying the 1-based line number.
LetorDataset Parse(std::istream& in);
LetorDataset ParseFile(const std::string& path);

struct BuildOptions {
  std::vector<int> feature_ids;
  // Must exceed the largest relevance label when set.
  std::optional<std::size_t> levels;
  // Features ranked by ascending value; all others rank descending.
  std::set<int> ascending;
};

struct BuildResult {
  QdbInstance instance;
  std::vector<std::string> warnings;
};

// One arm per feature: the distribution, over queries, of the relevance of
// the document that ranks first under that feature alone. Relevance r maps
// to level r, so the most relevant label is the top level. Documents without
// the feature do not compete; a query where no document has the feature is
// skipped for that arm with a warning. Ties go to the earliest document.
BuildResult BuildInstance(const LetorDataset& dataset,
                          const BuildOptions& options);

}  // namespace qdb::letor

#endif  // QDB_LETOR_HPP_
