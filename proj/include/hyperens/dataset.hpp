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

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/SparseCore>

namespace hyperens {

using UserIndex = std::int32_t;
using ItemIndex = std::int32_t;

/// Bidirectional map between external identifiers and contiguous indices,
/// ordered by first appearance.
class IdMap {
 public:
  /// Returns the index of `id`, assigning the next free one if unseen.
  std::int32_t intern(std::string_view id);
  std::optional<std::int32_t> find(std::string_view id) const;
  const std::string& id(std::int32_t index) const { return ids_.at(index); }
  std::int32_t size() const { return static_cast<std::int32_t>(ids_.size()); }
  const std::vector<std::string>& ids() const { return ids_; }

 private:
  std::vector<std::string> ids_;
  std::unordered_map<std::string, std::int32_t> index_;
};

/// Binary user-item interaction matrix with its identifier maps.
/// Each user's profile is kept sorted and duplicate free.
class InteractionDataset {
 public:
  InteractionDataset() = default;
  InteractionDataset(IdMap users, IdMap items,
                     std::vector<std::vector<ItemIndex>> profiles);

  /// Records an interaction; duplicates collapse. Returns false on a duplicate.
  bool add(std::string_view user_id, std::string_view item_id);

  const IdMap& users() const { return users_; }
  const IdMap& items() const { return items_; }
  std::int32_t num_users() const { return users_.size(); }
  std::int32_t num_items() const { return items_.size(); }
  std::int64_t num_interactions() const;
  /// |interactions| / (|U| * |I|).
  double sparsity() const;

  std::span<const ItemIndex> profile(UserIndex u) const;
  bool contains(UserIndex u, ItemIndex i) const;
  std::size_t max_profile_size() const;

 private:
  IdMap users_;
  IdMap items_;
  std::vector<std::vector<ItemIndex>> profiles_;
};

enum class FileFormat { csv, tsv };
enum class HeaderMode { autodetect, present, absent };

struct LoadOptions {
  FileFormat format = FileFormat::csv;
  /// When set, a row counts only if its rating column is >= this value.
  std::optional<double> min_rating;
  HeaderMode header = HeaderMode::autodetect;
};

struct DatasetStats {
  std::int64_t rows_read = 0;
  std::int64_t rows_kept = 0;
  std::int32_t num_users = 0;
  std::int32_t num_items = 0;
  std::int64_t num_interactions = 0;
  double sparsity = 0.0;
};

FileFormat parse_file_format(std::string_view name);

InteractionDataset load_interactions(const std::filesystem::path& path,
                                     const LoadOptions& options,
                                     DatasetStats* stats = nullptr);
InteractionDataset parse_interactions(std::istream& in, const LoadOptions& options,
                                      std::string_view source = "<stream>",
                                      DatasetStats* stats = nullptr);

DatasetStats compute_stats(const InteractionDataset& ds);

struct SplitParams {
  int n_test = 10;
  int n_val = 5;
  int min_train = 5;
};

/// Which held-out part a pipeline pass targets. Validation passes fit on
/// the train part only; test passes fit on train plus validation.
enum class Phase { validation, test };

const char* phase_name(Phase phase);

/// Per-user holdout split. Users that were too sparse are dropped and the
/// rest are re-indexed in their original order; the item space is kept.
struct SplitDataset {
  InteractionDataset train;
  std::vector<std::vector<ItemIndex>> validation;
  std::vector<std::vector<ItemIndex>> test;
  SplitParams params;
  std::uint64_t seed = 0;

  std::int32_t num_users() const { return train.num_users(); }
  std::int32_t num_items() const { return train.num_items(); }

  /// Interactions a model may be trained on for the given phase.
  InteractionDataset fit_set(Phase phase) const;
  const std::vector<std::vector<ItemIndex>>& targets(Phase phase) const;
};

SplitDataset split(const InteractionDataset& ds, const SplitParams& params,
                   std::uint64_t seed);

/// Row `u` of the binary interaction matrix.
Eigen::SparseVector<double> interaction_row(const InteractionDataset& ds, UserIndex u);

/// Split manifest: seed, parameters, item list and per-user train,
/// validation and test item lists, all by external identifier.
std::string split_manifest_json(const SplitDataset& split);
SplitDataset parse_split_manifest(std::string_view json_text);
void write_split_manifest(const std::filesystem::path& path, const SplitDataset& split);
SplitDataset read_split_manifest(const std::filesystem::path& path);

std::string stats_json(const DatasetStats& stats);

}  // namespace hyperens
