// Copyright 2026 The hyperens Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "hyperens/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "hyperens/error.hpp"

namespace hyperens {

std::vector<UserHits> count_hits(const RankingList& lists, const HeldOut& held_out) {
  if (lists.rows.size() != held_out.size()) {
    throw DataError(lists.model_name + ": lists cover " + std::to_string(lists.rows.size()) +
                    " users but " + std::to_string(held_out.size()) + " users are evaluated");
  }
  std::vector<UserHits> out(held_out.size());
  for (std::size_t u = 0; u < held_out.size(); ++u) {
    if (held_out[u].empty()) {
      throw DataError("user " + std::to_string(u) + " has no held-out items");
    }
    if (lists.rows[u].empty()) {
      throw DataError(lists.model_name + ": user " + std::to_string(u) + " has an empty list");
    }
    auto truth = held_out[u];
    std::sort(truth.begin(), truth.end());
    int hits = 0;
    for (const auto& r : lists.rows[u]) {
      if (std::binary_search(truth.begin(), truth.end(), r.item)) ++hits;
    }
    out[u] = {hits, static_cast<int>(truth.size()), static_cast<int>(lists.rows[u].size())};
  }
  return out;
}

namespace {

double mean_ratio(const std::vector<UserHits>& hits, bool by_relevant) {
  double total = 0.0;
  for (const auto& h : hits) {
    total += static_cast<double>(h.hits) / (by_relevant ? h.relevant : h.recommended);
  }
  return hits.empty() ? 0.0 : total / static_cast<double>(hits.size());
}

}  // namespace

double precision_at_k(const RankingList& lists, const HeldOut& held_out) {
  return mean_ratio(count_hits(lists, held_out), false);
}

double recall_at_k(const RankingList& lists, const HeldOut& held_out) {
  return mean_ratio(count_hits(lists, held_out), true);
}

double f1_at_k(double precision, double recall) {
  // The harmonic mean of two equal values is that value; the general formula
  // can be off by an ulp.
  if (precision == recall) return precision;
  const double sum = precision + recall;
  return sum > 0.0 ? 2.0 * precision * recall / sum : 0.0;
}

EvalReport evaluate(const RankingList& lists, const HeldOut& held_out) {
  EvalReport r;
  r.model_name = lists.model_name;
  r.k = lists.k;
  r.per_user = count_hits(lists, held_out);
  r.precision = mean_ratio(r.per_user, false);
  r.recall = mean_ratio(r.per_user, true);
  r.f1 = f1_at_k(r.precision, r.recall);
  return r;
}

std::string reports_json(const std::vector<EvalReport>& reports) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : reports) {
    arr.push_back({{"model", r.model_name},
                   {"k", r.k},
                   {"precision", r.precision},
                   {"recall", r.recall},
                   {"f1", r.f1},
                   {"users", r.per_user.size()}});
  }
  return nlohmann::json{{"results", arr}}.dump(2) + "\n";
}

std::string reports_table(const std::vector<EvalReport>& reports) {
  std::size_t width = 5;
  for (const auto& r : reports) width = std::max(width, r.model_name.size());
  const int k = reports.empty() ? 10 : reports.front().k;
  std::ostringstream os;
  os << std::left << std::setw(static_cast<int>(width)) << "model" << "  "
     << std::setw(12) << ("precision@" + std::to_string(k)) << "  "
     << std::setw(12) << ("recall@" + std::to_string(k)) << "  "
     << ("F1@" + std::to_string(k)) << '\n';
  for (const auto& r : reports) {
    os << std::left << std::setw(static_cast<int>(width)) << r.model_name << "  " << std::fixed
       << std::setprecision(4) << std::setw(12) << r.precision << "  " << std::setw(12)
       << r.recall << "  " << r.f1 << '\n';
  }
  return os.str();
}

}  // namespace hyperens
