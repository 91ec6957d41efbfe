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
#include <map>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "hyperens/dataset.hpp"
#include "hyperens/ranking_list.hpp"

namespace hyperens {

using FactorMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Named numeric hyperparameters, as sampled by the tuner or read from config.
using ParamMap = std::map<std::string, double>;

/// Bayesian personalized ranking, trained by SGD on (u, i+, i-) triplets.
/// One iteration draws as many triplets as there are interactions.
struct BprParams {
  int factors = 64;
  int iterations = 100;
  double learning_rate = 0.05;
  double regularization = 0.01;
  bool item_bias = true;
};

/// WARP pairwise ranking with per-entry AdaGrad steps. One iteration visits
/// every positive once.
struct WarpParams {
  int factors = 32;
  int iterations = 50;
  double learning_rate = 0.05;
  double regularization = 1e-5;
  int max_sampled = 100;
  double margin = 1.0;
  bool item_bias = true;
};

/// Implicit-feedback matrix factorization (confidence 1 + alpha * z_ui)
/// fit by alternating least squares. One iteration is a user and an item sweep.
struct WrmfParams {
  int factors = 64;
  int iterations = 15;
  double regularization = 0.01;
  double alpha = 40.0;
};

using ModelParams = std::variant<BprParams, WarpParams, WrmfParams>;

/// Built-in model families, keyed by their canonical names.
enum class ModelKind { bpr, warp, wrmf };

ModelKind parse_model_kind(std::string_view name);
const char* model_kind_name(ModelKind kind);

/// Applies named overrides (factors, iterations, learning_rate,
/// regularization, alpha, max_sampled, margin, item_bias) to the defaults of
/// `kind`. Unknown names are a ConfigError.
ModelParams make_params(ModelKind kind, const ParamMap& overrides);
ParamMap params_to_map(const ModelParams& params);

/// Scores are user_factors.row(u) . item_factors.row(i). With an item bias
/// the last user column is pinned to 1 and the last item column holds the bias.
struct FactorModel {
  std::string name;
  FactorMatrix user_factors;
  FactorMatrix item_factors;
  ModelParams params;
  /// Per-iteration training loss: sampled pairwise loss for BPR/WARP, the
  /// full weighted objective for WRMF.
  std::vector<double> loss_history;

  double score(UserIndex u, ItemIndex i) const;
  Eigen::VectorXd score_items(UserIndex u) const;
  bool all_finite() const;
};

FactorModel train_bpr(const InteractionDataset& train, const BprParams& hp, std::uint64_t seed);
FactorModel train_warp(const InteractionDataset& train, const WarpParams& hp, std::uint64_t seed);
FactorModel train_wrmf(const InteractionDataset& train, const WrmfParams& hp, std::uint64_t seed,
                       unsigned threads = 1);
FactorModel train_model(const InteractionDataset& train, const ModelParams& hp,
                        std::uint64_t seed, unsigned threads = 1);

/// WARP rank estimate after `samples_drawn` draws found a violator:
/// floor((num_items - 1) / samples_drawn).
std::int64_t warp_rank_estimate(std::int64_t num_items, int samples_drawn);
/// Phi(rank) = sum_{j=1..rank} 1/j.
double warp_loss_weight(std::int64_t rank);

/// One WARP step for the positive pair (u, pos), from fresh AdaGrad sums.
/// Returns false when no margin violator was found within the sampling
/// budget (no update).
bool warp_update(FactorModel& model, const InteractionDataset& train, UserIndex u,
                 ItemIndex pos, const WarpParams& hp, std::mt19937_64& rng);

/// sum_{u,i} c_ui (z_ui - x_u.y_i)^2 + lambda (|X|^2 + |Y|^2).
double wrmf_objective(const FactorModel& model, const InteractionDataset& train,
                      const WrmfParams& hp);

/// Top-k unseen items per user by factor score.
RankingList rank_topk(const FactorModel& model, const InteractionDataset& fit, int k = 10,
                      unsigned threads = 1);

void write_factor_model(const std::filesystem::path& path, const FactorModel& model);
FactorModel read_factor_model(const std::filesystem::path& path);

}  // namespace hyperens
