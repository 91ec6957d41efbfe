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

#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "hyperens/dataset.hpp"

namespace hyperens {

struct RankedItem {
  ItemIndex item = 0;
  double score = 0.0;

  friend bool operator==(const RankedItem&, const RankedItem&) = default;
};

/// Per-user top-k lists of one recommender. rows[u] holds k distinct items
/// with non-increasing scores, none of them in u's fit profile.
struct RankingList {
  std::string model_name;
  int k = 0;
  std::vector<std::vector<RankedItem>> rows;

  std::vector<ItemIndex> items_of(UserIndex u) const;

  friend bool operator==(const RankingList&, const RankingList&) = default;
};

/// Top-k entries of `scores`, skipping the sorted `masked` items. Order is
/// descending score with ties broken by ascending item index.
std::vector<RankedItem> top_k(std::span<const double> scores,
                              std::span<const ItemIndex> masked, int k);

/// Largest k every user can be served after masking their profile.
int max_feasible_k(const InteractionDataset& fit);

/// Throws DataError if any RankingList invariant fails against `fit`.
void validate_ranking_list(const RankingList& list, const InteractionDataset& fit);

/// How the third column of a rankings file is interpreted.
enum class RankColumn { autodetect, rank, score };

/// Writes `user_id,item_id,rank,score` rows with a header line.
void write_rankings(std::ostream& out, const RankingList& list, const InteractionDataset& ids);
void write_rankings(const std::filesystem::path& path, const RankingList& list,
                    const InteractionDataset& ids);

/// Reads a delimiter-separated `user_id,item_id,rank` (or score) file and
/// validates it against the fit profiles: every user must have exactly k
/// entries, ids must resolve, and no fit item may appear.
RankingList read_rankings(std::istream& in, const InteractionDataset& fit, int k,
                          const std::string& model_name,
                          RankColumn column = RankColumn::autodetect,
                          std::string_view source = "<stream>");
RankingList load_external_rankings(const std::filesystem::path& path,
                                   const InteractionDataset& fit, int k,
                                   const std::string& model_name,
                                   RankColumn column = RankColumn::autodetect);

}  // namespace hyperens
