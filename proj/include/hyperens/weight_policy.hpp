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

#include <map>
#include <string>

namespace hyperens {

/// Hyperedge weights by edge family. A recommender's edges get
/// w_m_base * (1 - decay_per_rank * (rank - 1)), rank 1 being the best model
/// on validation.
struct WeightPolicy {
  double w_ui = 1.0;
  double w_uu = 1.0;
  double w_m_base = 0.5;
  double decay_per_rank = 0.10;
  std::map<std::string, int> model_ranks;

  /// Weight of the edges contributed by `model`. Without decay every model
  /// gets w_m_base; otherwise the model must be ranked.
  double model_weight(const std::string& model) const;
  /// Throws ConfigError on non-positive weights, decay outside [0,1) or
  /// ranks that are not a permutation of 1..|M|.
  void validate() const;

  friend bool operator==(const WeightPolicy&, const WeightPolicy&) = default;
};

/// Every edge family at weight 1, no decay.
WeightPolicy uniform_policy();

/// Real links at full weight, recommender links at the decayed base weight.
/// `shape` supplies w_ui, w_uu, w_m_base and decay_per_rank.
WeightPolicy weighted_policy(const std::map<std::string, int>& ranks,
                             const WeightPolicy& shape = WeightPolicy{});

}  // namespace hyperens
