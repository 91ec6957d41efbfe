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
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "hyperens/factor_model.hpp"

namespace hyperens {

struct ParamRange {
  double lo = 0.0;
  double hi = 1.0;
  bool integer = false;
  /// Sample uniformly in log space (lo must be > 0).
  bool log_scale = false;

  friend bool operator==(const ParamRange&, const ParamRange&) = default;
};

using SearchSpace = std::map<std::string, ParamRange>;

struct Trial {
  ParamMap params;
  double score = 0.0;
  /// The objective threw a NumericError (divergence, no convergence).
  bool failed = false;
  std::string error;
};

struct TuneResult {
  ParamMap best;
  double best_score = 0.0;
  std::size_t best_index = 0;
  std::vector<Trial> trials;
};

/// Default search ranges for a built-in model (iterations, latent factors,
/// regularization and, for the SGD models, learning rate).
SearchSpace default_search_space(ModelKind kind);

ParamMap sample_params(const SearchSpace& space, std::mt19937_64& rng);

/// Random search: draws `budget` points, evaluates each with `objective`
/// (higher is better) and keeps the first best. Every trial is logged; a
/// trial whose objective throws NumericError is marked failed and skipped.
/// Throws NumericError if every trial failed.
TuneResult tune(const SearchSpace& space, int budget, std::uint64_t seed,
                const std::function<double(const ParamMap&)>& objective);

std::string tune_result_json(const TuneResult& result);

/// Stable per-purpose seed derived from a base seed and a label.
std::uint64_t derive_seed(std::uint64_t base, std::string_view label, std::uint64_t index = 0);

}  // namespace hyperens
