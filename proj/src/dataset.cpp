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

#include "hyperens/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "hyperens/error.hpp"
#include "text_io.hpp"

namespace hyperens {

using nlohmann::json;

std::int32_t IdMap::intern(std::string_view id) {
  auto it = index_.find(std::string(id));
  if (it != index_.end()) return it->second;
  const auto next = static_cast<std::int32_t>(ids_.size());
  ids_.emplace_back(id);
  index_.emplace(ids_.back(), next);
  return next;
}

std::optional<std::int32_t> IdMap::find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

InteractionDataset::InteractionDataset(IdMap users, IdMap items,
                                       std::vector<std::vector<ItemIndex>> profiles)
    : users_(std::move(users)), items_(std::move(items)), profiles_(std::move(profiles)) {
  if (profiles_.size() != static_cast<std::size_t>(users_.size())) {
    throw DataError("profile count does not match user count");
  }
  for (auto& p : profiles_) {
    std::sort(p.begin(), p.end());
    if (std::adjacent_find(p.begin(), p.end()) != p.end()) {
      throw DataError("duplicate interaction in profile");
    }
    if (!p.empty() && (p.front() < 0 || p.back() >= items_.size())) {
      throw DataError("item index out of range in profile");
    }
  }
}

bool InteractionDataset::add(std::string_view user_id, std::string_view item_id) {
  const auto u = users_.intern(user_id);
  const auto i = items_.intern(item_id);
  if (static_cast<std::size_t>(u) >= profiles_.size()) profiles_.resize(u + 1);
  auto& p = profiles_[u];
  auto pos = std::lower_bound(p.begin(), p.end(), i);
  if (pos != p.end() && *pos == i) return false;
  p.insert(pos, i);
  return true;
}

std::int64_t InteractionDataset::num_interactions() const {
  std::int64_t total = 0;
  for (const auto& p : profiles_) total += static_cast<std::int64_t>(p.size());
  return total;
}

double InteractionDataset::sparsity() const {
  const double cells = static_cast<double>(num_users()) * static_cast<double>(num_items());
  return cells > 0 ? static_cast<double>(num_interactions()) / cells : 0.0;
}

std::span<const ItemIndex> InteractionDataset::profile(UserIndex u) const {
  if (u < 0 || u >= num_users()) {
    throw ConfigError("user index " + std::to_string(u) + " out of range");
  }
  return profiles_[u];
}

bool InteractionDataset::contains(UserIndex u, ItemIndex i) const {
  const auto p = profile(u);
  return std::binary_search(p.begin(), p.end(), i);
}

std::size_t InteractionDataset::max_profile_size() const {
  std::size_t m = 0;
  for (const auto& p : profiles_) m = std::max(m, p.size());
  return m;
}

FileFormat parse_file_format(std::string_view name) {
  if (name == "csv") return FileFormat::csv;
  if (name == "tsv") return FileFormat::tsv;
  throw ConfigError("unknown dataset format '" + std::string(name) + "' (expected csv or tsv)");
}

namespace {

std::string located(std::string_view source, std::int64_t line, std::string_view msg) {
  std::ostringstream os;
  os << source << ":" << line << ": " << msg;
  return os.str();
}

// A first row is a header if its rating column is non-numeric, or if one of
// its id columns is non-numeric where the following row has a number.
bool looks_like_header(const std::vector<std::string_view>& first,
                       const std::vector<std::string_view>* second) {
  if (first.size() >= 3 && !detail::is_numeric(first[2])) return true;
  if (second == nullptr) return false;
  for (std::size_t c = 0; c < 2 && c < first.size() && c < second->size(); ++c) {
    if (!detail::is_numeric(first[c]) && detail::is_numeric((*second)[c])) return true;
  }
  return false;
}

}  // namespace

InteractionDataset parse_interactions(std::istream& in, const LoadOptions& options,
                                      std::string_view source, DatasetStats* stats) {
  const char delimiter = options.format == FileFormat::tsv ? '\t' : ',';
  std::vector<std::pair<std::int64_t, std::string>> rows;
  std::string line;
  std::int64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    rows.emplace_back(line_no, std::move(line));
  }
  if (rows.empty()) throw DataError(std::string(source) + ": empty interaction file");

  std::size_t first_data = 0;
  if (options.header == HeaderMode::present) {
    first_data = 1;
  } else if (options.header == HeaderMode::autodetect) {
    const auto first = detail::split_fields(rows[0].second, delimiter);
    std::vector<std::string_view> second;
    if (rows.size() > 1) second = detail::split_fields(rows[1].second, delimiter);
    if (looks_like_header(first, rows.size() > 1 ? &second : nullptr)) first_data = 1;
  }
  if (first_data >= rows.size()) throw DataError(std::string(source) + ": empty interaction file");

  InteractionDataset ds;
  DatasetStats local;
  for (std::size_t r = first_data; r < rows.size(); ++r) {
    const auto& [number, text] = rows[r];
    const auto fields = detail::split_fields(text, delimiter);
    if (fields.size() < 2 || fields[0].empty() || fields[1].empty()) {
      throw DataError(located(source, number, "malformed row, expected user_id" +
                                                  std::string(1, delimiter) + "item_id"));
    }
    ++local.rows_read;
    if (options.min_rating) {
      if (fields.size() < 3) {
        throw DataError(located(source, number, "missing rating column"));
      }
      const auto rating = detail::parse_double(fields[2]);
      if (!rating) throw DataError(located(source, number, "non-numeric rating"));
      if (*rating < *options.min_rating) continue;
    }
    ++local.rows_kept;
    ds.add(fields[0], fields[1]);
  }
  if (ds.num_users() == 0) {
    throw DataError(std::string(source) + ": no interactions left after filtering");
  }
  if (stats) {
    const auto computed = compute_stats(ds);
    *stats = computed;
    stats->rows_read = local.rows_read;
    stats->rows_kept = local.rows_kept;
  }
  return ds;
}

InteractionDataset load_interactions(const std::filesystem::path& path,
                                     const LoadOptions& options, DatasetStats* stats) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open interaction file " + path.string());
  return parse_interactions(in, options, path.string(), stats);
}

DatasetStats compute_stats(const InteractionDataset& ds) {
  DatasetStats s;
  s.num_users = ds.num_users();
  s.num_items = ds.num_items();
  s.num_interactions = ds.num_interactions();
  s.sparsity = ds.sparsity();
  s.rows_read = s.rows_kept = s.num_interactions;
  return s;
}

const char* phase_name(Phase phase) {
  return phase == Phase::validation ? "validation" : "test";
}

InteractionDataset SplitDataset::fit_set(Phase phase) const {
  if (phase == Phase::validation) return train;
  std::vector<std::vector<ItemIndex>> merged(num_users());
  for (UserIndex u = 0; u < num_users(); ++u) {
    const auto p = train.profile(u);
    merged[u].assign(p.begin(), p.end());
    merged[u].insert(merged[u].end(), validation[u].begin(), validation[u].end());
  }
  return InteractionDataset(train.users(), train.items(), std::move(merged));
}

const std::vector<std::vector<ItemIndex>>& SplitDataset::targets(Phase phase) const {
  return phase == Phase::validation ? validation : test;
}

SplitDataset split(const InteractionDataset& ds, const SplitParams& params, std::uint64_t seed) {
  if (params.n_test < 0 || params.n_val < 0 || params.min_train < 0) {
    throw ConfigError("split sizes must be non-negative");
  }
  const auto held_out = static_cast<std::size_t>(params.n_test + params.n_val);
  const auto required = held_out + static_cast<std::size_t>(params.min_train);

  std::mt19937_64 rng(seed);
  IdMap users;
  std::vector<std::vector<ItemIndex>> train_profiles;
  SplitDataset out;
  out.params = params;
  out.seed = seed;

  for (UserIndex u = 0; u < ds.num_users(); ++u) {
    const auto profile = ds.profile(u);
    if (profile.size() < required) continue;
    std::vector<ItemIndex> items(profile.begin(), profile.end());
    // Partial Fisher-Yates: the first `held_out` slots become a uniform
    // sample without replacement.
    for (std::size_t j = 0; j < held_out; ++j) {
      std::uniform_int_distribution<std::size_t> pick(j, items.size() - 1);
      std::swap(items[j], items[pick(rng)]);
    }
    const auto test_end = items.begin() + params.n_test;
    const auto val_end = test_end + params.n_val;
    std::vector<ItemIndex> test(items.begin(), test_end);
    std::vector<ItemIndex> val(test_end, val_end);
    std::vector<ItemIndex> train(val_end, items.end());
    std::sort(test.begin(), test.end());
    std::sort(val.begin(), val.end());
    std::sort(train.begin(), train.end());

    users.intern(ds.users().id(u));
    train_profiles.push_back(std::move(train));
    out.validation.push_back(std::move(val));
    out.test.push_back(std::move(test));
  }
  if (users.size() == 0) throw DataError("dataset too sparse for protocol");
  out.train = InteractionDataset(std::move(users), ds.items(), std::move(train_profiles));
  return out;
}

Eigen::SparseVector<double> interaction_row(const InteractionDataset& ds, UserIndex u) {
  const auto p = ds.profile(u);
  Eigen::SparseVector<double> row(ds.num_items());
  row.reserve(static_cast<Eigen::Index>(p.size()));
  for (ItemIndex i : p) row.insert(i) = 1.0;
  return row;
}

namespace {

json item_ids(const InteractionDataset& ds, std::span<const ItemIndex> items) {
  json arr = json::array();
  for (ItemIndex i : items) arr.push_back(ds.items().id(i));
  return arr;
}

std::vector<ItemIndex> resolve_items(const IdMap& items, const json& arr,
                                     const std::string& user) {
  std::vector<ItemIndex> out;
  for (const auto& v : arr) {
    const auto idx = items.find(v.get<std::string>());
    if (!idx) throw DataError("manifest: unknown item '" + v.get<std::string>() + "' for user " + user);
    out.push_back(*idx);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

std::string split_manifest_json(const SplitDataset& s) {
  json j;
  j["format"] = "hyperens-split";
  j["version"] = 1;
  j["seed"] = s.seed;
  j["params"] = {{"n_test", s.params.n_test},
                 {"n_val", s.params.n_val},
                 {"min_train", s.params.min_train}};
  j["items"] = s.train.items().ids();
  json users = json::array();
  for (UserIndex u = 0; u < s.num_users(); ++u) {
    users.push_back({{"id", s.train.users().id(u)},
                     {"train", item_ids(s.train, s.train.profile(u))},
                     {"validation", item_ids(s.train, s.validation[u])},
                     {"test", item_ids(s.train, s.test[u])}});
  }
  j["users"] = std::move(users);
  return j.dump(1) + "\n";
}

SplitDataset parse_split_manifest(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw DataError(std::string("manifest: invalid JSON: ") + e.what());
  }
  try {
    if (j.at("format") != "hyperens-split") throw DataError("manifest: unexpected format tag");
    SplitDataset s;
    s.seed = j.at("seed").get<std::uint64_t>();
    const auto& p = j.at("params");
    s.params = {p.at("n_test").get<int>(), p.at("n_val").get<int>(), p.at("min_train").get<int>()};
    IdMap items;
    for (const auto& id : j.at("items")) items.intern(id.get<std::string>());
    IdMap users;
    std::vector<std::vector<ItemIndex>> train;
    for (const auto& entry : j.at("users")) {
      const auto id = entry.at("id").get<std::string>();
      if (users.find(id)) throw DataError("manifest: duplicate user '" + id + "'");
      users.intern(id);
      train.push_back(resolve_items(items, entry.at("train"), id));
      s.validation.push_back(resolve_items(items, entry.at("validation"), id));
      s.test.push_back(resolve_items(items, entry.at("test"), id));
      std::vector<ItemIndex> all = train.back();
      all.insert(all.end(), s.validation.back().begin(), s.validation.back().end());
      all.insert(all.end(), s.test.back().begin(), s.test.back().end());
      std::sort(all.begin(), all.end());
      if (std::adjacent_find(all.begin(), all.end()) != all.end()) {
        throw DataError("manifest: overlapping split parts for user '" + id + "'");
      }
    }
    s.train = InteractionDataset(std::move(users), std::move(items), std::move(train));
    return s;
  } catch (const json::exception& e) {
    throw DataError(std::string("manifest: ") + e.what());
  }
}

void write_split_manifest(const std::filesystem::path& path, const SplitDataset& split) {
  detail::write_text_file(path, split_manifest_json(split));
}

SplitDataset read_split_manifest(const std::filesystem::path& path) {
  return parse_split_manifest(detail::read_text_file(path));
}

std::string stats_json(const DatasetStats& s) {
  json j = {{"rows_read", s.rows_read},
            {"rows_kept", s.rows_kept},
            {"num_users", s.num_users},
            {"num_items", s.num_items},
            {"num_interactions", s.num_interactions},
            {"sparsity", s.sparsity}};
  return j.dump(2) + "\n";
}

}  // namespace hyperens
