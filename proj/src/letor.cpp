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

#include "qdb/letor.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string_view>
#include <unordered_map>

namespace qdb::letor {
namespace {

std::string_view Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> SplitWhitespace(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

template <typename T>
bool ParseNumber(std::string_view token, T& out) {
  const char* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, out);
  return ec == std::errc() && ptr == end;
}

LetorRecord ParseLine(std::string_view body, std::size_t line) {
  const auto tokens = SplitWhitespace(body);
  if (tokens.size() < 2) {
    throw ParseError(line, "expected '<relevance> qid:<id> ...'");
  }
  LetorRecord record;
  if (!ParseNumber(tokens[0], record.relevance) || record.relevance < 0) {
    throw ParseError(line, "relevance label '" + std::string(tokens[0]) +
                               "' is not a non-negative integer");
  }
  if (tokens[1].substr(0, 4) != "qid:" ||
      !ParseNumber(tokens[1].substr(4), record.query_id)) {
    throw ParseError(line, "expected qid:<integer>, got '" +
                               std::string(tokens[1]) + "'");
  }
  for (std::size_t t = 2; t < tokens.size(); ++t) {
    const auto token = tokens[t];
    const auto colon = token.find(':');
    int id = 0;
    double value = 0.0;
    if (colon == std::string_view::npos ||
        !ParseNumber(token.substr(0, colon), id) ||
        !ParseNumber(token.substr(colon + 1), value) || !std::isfinite(value)) {
      throw ParseError(line, "malformed feature '" + std::string(token) + "'");
    }
    if (id < 1) {
      throw ParseError(line, "feature ids start at 1, got " + std::to_string(id));
    }
    if (!record.features.emplace(id, value).second) {
      throw ParseError(line, "duplicate feature " + std::to_string(id));
    }
  }
  return record;
}

}  // namespace

ParseError::ParseError(std::size_t line, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ": " + what),
      line_(line) {}

LetorDataset Parse(std::istream& in) {
  LetorDataset dataset;
  std::unordered_map<std::int64_t, std::size_t> group_of;
  int max_label = -1;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string_view body = raw;
    if (const auto hash = body.find('#'); hash != std::string_view::npos) {
      body = body.substr(0, hash);
    }
    body = Trim(body);
    if (body.empty()) continue;

    LetorRecord record = ParseLine(body, line);
    max_label = std::max(max_label, record.relevance);
    for (const auto& [id, value] : record.features) {
      dataset.feature_ids.insert(id);
    }
    auto [it, inserted] =
        group_of.emplace(record.query_id, dataset.queries.size());
    if (inserted) dataset.queries.push_back({record.query_id, {}});
    dataset.queries[it->second].documents.push_back(std::move(record));
  }
  if (dataset.queries.empty()) throw ParseError(line, "no records found");
  dataset.label_levels = static_cast<std::size_t>(max_label + 1);
  return dataset;
}

LetorDataset ParseFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open LETOR file '" + path + "'");
  return Parse(in);
}

BuildResult BuildInstance(const LetorDataset& dataset,
                          const BuildOptions& options) {
  if (options.feature_ids.size() < 2) {
    throw InvalidArgument("need at least two features (one arm each)");
  }
  std::size_t levels = dataset.label_levels;
  if (options.levels) {
    if (*options.levels < dataset.label_levels) {
      std::ostringstream msg;
      msg << "level override " << *options.levels
          << " is below the label range " << dataset.label_levels;
      throw InvalidArgument(msg.str());
    }
    levels = *options.levels;
  }

  std::vector<std::string> warnings;
  std::vector<FeedbackDistribution> arms;
  for (int feature : options.feature_ids) {
    if (!dataset.feature_ids.contains(feature)) {
      throw InvalidArgument("feature " + std::to_string(feature) +
                            " does not appear in the dataset");
    }
    const bool ascending = options.ascending.contains(feature);
    std::vector<double> histogram(levels, 0.0);
    std::size_t used = 0;
    for (const auto& query : dataset.queries) {
      const LetorRecord* top = nullptr;
      double top_value = 0.0;
      for (const auto& doc : query.documents) {
        const auto it = doc.features.find(feature);
        if (it == doc.features.end()) continue;
        const bool better = ascending ? it->second < top_value
                                      : it->second > top_value;
        if (top == nullptr || better) {
          top = &doc;
          top_value = it->second;
        }
      }
      if (top == nullptr) {
        warnings.push_back("feature " + std::to_string(feature) +
                           " missing from every document of query " +
                           std::to_string(query.query_id) + "; skipped");
        continue;
      }
      histogram[static_cast<std::size_t>(top->relevance)] += 1.0;
      ++used;
    }
    if (used == 0) {
      throw InvalidArgument("feature " + std::to_string(feature) +
                            " is missing from every query");
    }
    for (double& h : histogram) h /= static_cast<double>(used);
    arms.push_back(FeedbackDistribution::Renormalized(std::move(histogram),
                                                      kSimplexTolerance));
  }
  return {QdbInstance(std::move(arms)), std::move(warnings)};
}

}  // namespace qdb::letor
