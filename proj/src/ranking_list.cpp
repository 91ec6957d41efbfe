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

#include "hyperens/ranking_list.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "hyperens/error.hpp"
#include "text_io.hpp"

namespace hyperens {

std::vector<ItemIndex> RankingList::items_of(UserIndex u) const {
  std::vector<ItemIndex> out;
  out.reserve(rows.at(u).size());
  for (const auto& r : rows[u]) out.push_back(r.item);
  return out;
}

std::vector<RankedItem> top_k(std::span<const double> scores, std::span<const ItemIndex> masked,
                              int k) {
  std::vector<ItemIndex> candidates;
  candidates.reserve(scores.size());
  auto m = masked.begin();
  for (ItemIndex i = 0; i < static_cast<ItemIndex>(scores.size()); ++i) {
    while (m != masked.end() && *m < i) ++m;
    if (m != masked.end() && *m == i) continue;
    candidates.push_back(i);
  }
  if (k < 0 || static_cast<std::size_t>(k) > candidates.size()) {
    throw ConfigError("k=" + std::to_string(k) + " exceeds the " +
                      std::to_string(candidates.size()) + " items left after masking");
  }
  const auto better = [&](ItemIndex a, ItemIndex b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a < b;
  };
  std::partial_sort(candidates.begin(), candidates.begin() + k, candidates.end(), better);
  std::vector<RankedItem> out;
  out.reserve(k);
  for (int r = 0; r < k; ++r) out.push_back({candidates[r], scores[candidates[r]]});
  return out;
}

int max_feasible_k(const InteractionDataset& fit) {
  return fit.num_items() - static_cast<int>(fit.max_profile_size());
}

void validate_ranking_list(const RankingList& list, const InteractionDataset& fit) {
  const auto where = [&](UserIndex u) {
    return list.model_name + ": user '" + fit.users().id(u) + "'";
  };
  if (static_cast<std::int32_t>(list.rows.size()) != fit.num_users()) {
    throw DataError(list.model_name + ": ranking covers " + std::to_string(list.rows.size()) +
                    " users, dataset has " + std::to_string(fit.num_users()));
  }
  for (UserIndex u = 0; u < fit.num_users(); ++u) {
    const auto& row = list.rows[u];
    if (static_cast<int>(row.size()) != list.k) {
      throw DataError(where(u) + " has " + std::to_string(row.size()) + " entries, expected " +
                      std::to_string(list.k));
    }
    auto items = list.items_of(u);
    for (std::size_t r = 0; r < row.size(); ++r) {
      if (row[r].item < 0 || row[r].item >= fit.num_items()) {
        throw DataError(where(u) + " has an out-of-range item");
      }
      if (r > 0 && row[r].score > row[r - 1].score) {
        throw DataError(where(u) + " has increasing scores");
      }
      if (fit.contains(u, row[r].item)) {
        throw DataError(where(u) + " leaks training item '" + fit.items().id(row[r].item) + "'");
      }
    }
    std::sort(items.begin(), items.end());
    if (std::adjacent_find(items.begin(), items.end()) != items.end()) {
      throw DataError(where(u) + " lists an item twice");
    }
  }
}

void write_rankings(std::ostream& out, const RankingList& list, const InteractionDataset& ids) {
  out << "user_id,item_id,rank,score\n";
  char score[64];
  for (UserIndex u = 0; u < static_cast<UserIndex>(list.rows.size()); ++u) {
    const auto& row = list.rows[u];
    for (std::size_t r = 0; r < row.size(); ++r) {
      std::snprintf(score, sizeof score, "%.17g", row[r].score);
      out << ids.users().id(u) << ',' << ids.items().id(row[r].item) << ',' << (r + 1) << ','
          << score << '\n';
    }
  }
}

void write_rankings(const std::filesystem::path& path, const RankingList& list,
                    const InteractionDataset& ids) {
  std::ostringstream os;
  write_rankings(os, list, ids);
  detail::write_text_file(path, os.str());
}

namespace {

struct RawEntry {
  std::int64_t line;
  ItemIndex item;
  double value;
  std::optional<double> score;
};

}  // namespace

RankingList read_rankings(std::istream& in, const InteractionDataset& fit, int k,
                          const std::string& model_name, RankColumn column,
                          std::string_view source) {
  if (k < 1) throw ConfigError("rankings: k must be >= 1");
  const auto fail = [&](std::int64_t line, const std::string& msg) {
    std::ostringstream os;
    os << source << ":" << line << ": " << msg;
    throw DataError(os.str());
  };

  std::vector<std::vector<RawEntry>> per_user(fit.num_users());
  std::string line;
  std::int64_t line_no = 0;
  char delimiter = 0;
  bool first = true;
  bool all_integral = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    if (delimiter == 0) delimiter = line.find('\t') != std::string::npos ? '\t' : ',';
    const auto fields = detail::split_fields(line, delimiter);
    if (first) {
      first = false;
      if (fields.size() >= 3 && !detail::is_numeric(fields[2])) {
        if (column == RankColumn::autodetect) {
          column = fields[2] == "score" ? RankColumn::score : RankColumn::rank;
        }
        continue;
      }
    }
    if (fields.size() < 3) fail(line_no, "expected user_id,item_id,rank");
    const auto user = fit.users().find(fields[0]);
    if (!user) fail(line_no, "unknown user '" + std::string(fields[0]) + "'");
    const auto item = fit.items().find(fields[1]);
    if (!item) fail(line_no, "unknown item '" + std::string(fields[1]) + "'");
    const auto value = detail::parse_double(fields[2]);
    if (!value || !std::isfinite(*value)) fail(line_no, "non-numeric rank/score");
    std::optional<double> score;
    if (fields.size() >= 4) {
      score = detail::parse_double(fields[3]);
      if (!score || !std::isfinite(*score)) fail(line_no, "non-numeric score");
    }
    if (*value != std::floor(*value) || *value < 1 || *value > k) all_integral = false;
    per_user[*user].push_back({line_no, *item, *value, score});
  }
  if (column == RankColumn::autodetect) {
    column = all_integral ? RankColumn::rank : RankColumn::score;
  }

  RankingList list;
  list.model_name = model_name;
  list.k = k;
  list.rows.resize(fit.num_users());
  for (UserIndex u = 0; u < fit.num_users(); ++u) {
    auto& entries = per_user[u];
    if (static_cast<int>(entries.size()) != k) {
      std::ostringstream os;
      os << source << ": user '" << fit.users().id(u) << "' has " << entries.size()
         << " entries, expected " << k;
      throw DataError(os.str());
    }
    for (const auto& e : entries) {
      if (fit.contains(u, e.item)) {
        fail(e.line, "item '" + fit.items().id(e.item) + "' is a training item of user '" +
                         fit.users().id(u) + "' (external model must mask it)");
      }
    }
    if (column == RankColumn::rank) {
      std::sort(entries.begin(), entries.end(),
                [](const RawEntry& a, const RawEntry& b) { return a.value < b.value; });
      for (int r = 0; r < k; ++r) {
        if (entries[r].value != r + 1) {
          fail(entries[r].line, "ranks of user '" + fit.users().id(u) + "' are not 1.." +
                                    std::to_string(k));
        }
        const double score = entries[r].score.value_or(static_cast<double>(k - r));
        list.rows[u].push_back({entries[r].item, score});
      }
    } else {
      std::sort(entries.begin(), entries.end(), [](const RawEntry& a, const RawEntry& b) {
        if (a.value != b.value) return a.value > b.value;
        return a.item < b.item;
      });
      for (const auto& e : entries) list.rows[u].push_back({e.item, e.value});
    }
  }
  validate_ranking_list(list, fit);
  return list;
}

RankingList load_external_rankings(const std::filesystem::path& path,
                                   const InteractionDataset& fit, int k,
                                   const std::string& model_name, RankColumn column) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open rankings file " + path.string());
  return read_rankings(in, fit, k, model_name, column, path.string());
}

}  // namespace hyperens
