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

#include "hyperens/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "hyperens/error.hpp"
#include "hyperens/parallel.hpp"

namespace hyperens {

double WeightPolicy::model_weight(const std::string& model) const {
  if (decay_per_rank == 0.0 && model_ranks.empty()) return w_m_base;
  const auto it = model_ranks.find(model);
  if (it == model_ranks.end()) throw ConfigError("weight policy has no rank for model '" + model + "'");
  const double w = w_m_base * (1.0 - decay_per_rank * (it->second - 1));
  if (!(w > 0.0)) {
    throw ConfigError("model '" + model + "' at rank " + std::to_string(it->second) +
                      " gets non-positive weight");
  }
  return w;
}

void WeightPolicy::validate() const {
  if (!(w_ui > 0.0) || !(w_uu > 0.0) || !(w_m_base > 0.0)) {
    throw ConfigError("hyperedge weights must be positive");
  }
  if (!(decay_per_rank >= 0.0 && decay_per_rank < 1.0)) {
    throw ConfigError("decay_per_rank must be in [0, 1)");
  }
  std::set<int> seen;
  for (const auto& [name, rank] : model_ranks) {
    if (rank < 1 || rank > static_cast<int>(model_ranks.size()) || !seen.insert(rank).second) {
      throw ConfigError("model ranks must be a permutation of 1..|M|");
    }
  }
  for (const auto& [name, rank] : model_ranks) model_weight(name);
}

WeightPolicy uniform_policy() {
  WeightPolicy p;
  p.w_ui = p.w_uu = p.w_m_base = 1.0;
  p.decay_per_rank = 0.0;
  return p;
}

WeightPolicy weighted_policy(const std::map<std::string, int>& ranks, const WeightPolicy& shape) {
  WeightPolicy p = shape;
  p.model_ranks = ranks;
  p.validate();
  return p;
}

std::map<std::string, int> rank_models(std::span<const RankingList> lists,
                                       const HeldOut& validation) {
  if (validation.empty()) throw DataError("rank_models: empty validation split");
  std::vector<std::pair<double, std::string>> scored;
  for (const auto& list : lists) scored.emplace_back(precision_at_k(list, validation), list.model_name);
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  std::map<std::string, int> ranks;
  for (std::size_t r = 0; r < scored.size(); ++r) {
    if (!ranks.emplace(scored[r].second, static_cast<int>(r) + 1).second) {
      throw DataError("rank_models: duplicate model '" + scored[r].second + "'");
    }
  }
  return ranks;
}

ScoreSource score_source(const FactorModel& model) {
  return {model.name, [&model](UserIndex u) { return model.score_items(u); }};
}

ScoreSource score_source(const RankingList& list, std::int32_t num_items) {
  return {list.model_name, [&list, num_items](UserIndex u) {
            Eigen::VectorXd s = Eigen::VectorXd::Zero(num_items);
            const auto& row = list.rows.at(u);
            for (std::size_t j = 0; j < row.size(); ++j) {
              s[row[j].item] = static_cast<double>(row.size() - j);
            }
            return s;
          }};
}

Eigen::VectorXd hybrid_scores(std::span<const ScoreSource> sources, std::span<const double> weights,
                              const InteractionDataset& fit, UserIndex u) {
  if (sources.empty()) throw ConfigError("hybrid needs at least one model");
  if (sources.size() != weights.size()) throw ConfigError("one hybrid weight per model required");
  double weight_sum = 0.0;
  for (double w : weights) {
    if (!(w > 0.0)) throw ConfigError("hybrid weights must be positive");
    weight_sum += w;
  }
  const auto masked = fit.profile(u);
  const auto n = fit.num_items();
  std::vector<char> is_masked(n, 0);
  for (ItemIndex i : masked) is_masked[i] = 1;

  Eigen::VectorXd total = Eigen::VectorXd::Zero(n);
  for (std::size_t m = 0; m < sources.size(); ++m) {
    const Eigen::VectorXd s = sources[m].scores(u);
    if (s.size() != n) throw DataError(sources[m].name + ": score vector has the wrong length");
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (ItemIndex i = 0; i < n; ++i) {
      if (is_masked[i]) continue;
      lo = std::min(lo, s[i]);
      hi = std::max(hi, s[i]);
    }
    const double range = hi - lo;
    for (ItemIndex i = 0; i < n; ++i) {
      if (is_masked[i]) continue;
      const double normalized = range > 0.0 ? (s[i] - lo) / range : 0.5;
      total[i] += weights[m] * normalized;
    }
  }
  total /= weight_sum;
  for (ItemIndex i : masked) total[i] = -std::numeric_limits<double>::infinity();
  return total;
}

RankingList hybrid_rank(std::span<const ScoreSource> sources, std::span<const double> weights,
                        const InteractionDataset& fit, int k, unsigned threads,
                        const std::string& name) {
  if (k < 1 || k > max_feasible_k(fit)) throw ConfigError("hybrid: k too large after masking");
  RankingList list;
  list.model_name = name;
  list.k = k;
  list.rows.resize(fit.num_users());
  parallel_for(fit.num_users(), threads, [&](std::int64_t uu) {
    const auto u = static_cast<UserIndex>(uu);
    const Eigen::VectorXd s = hybrid_scores(sources, weights, fit, u);
    list.rows[u] = top_k(std::span<const double>(s.data(), s.size()), fit.profile(u), k);
  });
  return list;
}

}  // namespace hyperens
