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

#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "hyperens/factor_model.hpp"
#include "hyperens/metrics.hpp"
#include "hyperens/ranking_list.hpp"
#include "hyperens/weight_policy.hpp"

namespace hyperens {

/// Orders models by descending precision@k on `validation`, ties by name.
/// Rank 1 is the best model.
std::map<std::string, int> rank_models(std::span<const RankingList> lists,
                                       const HeldOut& validation);

/// Full item score vector of one model for one user.
struct ScoreSource {
  std::string name;
  std::function<Eigen::VectorXd(UserIndex)> scores;
};

ScoreSource score_source(const FactorModel& model);
/// Sources that only publish lists score their j-th entry k - j + 1 and
/// every unlisted item 0.
ScoreSource score_source(const RankingList& list, std::int32_t num_items);

/// Weighted average of per-model scores, each min-max normalized to [0,1]
/// over u's unmasked items (a constant vector becomes 0.5). Masked items
/// come back as -infinity.
Eigen::VectorXd hybrid_scores(std::span<const ScoreSource> sources, std::span<const double> weights,
                              const InteractionDataset& fit, UserIndex u);

RankingList hybrid_rank(std::span<const ScoreSource> sources, std::span<const double> weights,
                        const InteractionDataset& fit, int k, unsigned threads = 1,
                        const std::string& name = "Hybrid");

}  // namespace hyperens
