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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hyperens/dataset.hpp"
#include "hyperens/factor_model.hpp"
#include "hyperens/ranking_list.hpp"
#include "hyperens/tuning.hpp"
#include "hyperens/weight_policy.hpp"

namespace hyperens {

struct ModelConfig {
  std::string name;  // BPR, WARP or WRMF
  /// Fixed hyperparameters; when absent the model is tuned over `search`.
  std::optional<ParamMap> hyperparams;
  SearchSpace search;
  int budget = 30;
};

/// Rankings produced elsewhere: one file fit on the train part (scored on
/// validation) and one fit on train + validation (scored on test).
struct ExternalModelConfig {
  std::string name;
  std::filesystem::path validation;
  std::filesystem::path test;
  RankColumn column = RankColumn::autodetect;
};

struct HybridConfig {
  bool enabled = true;
  std::optional<std::map<std::string, double>> weights;
  ParamRange range{0.01, 0.99};
  int budget = 30;
};

struct RankerTuning {
  std::optional<double> vartheta;
  ParamRange range{0.01, 0.99};
  int budget = 30;
  double tol = 1e-8;
  int max_iter = 1000;
};

struct RunConfig {
  std::filesystem::path dataset;
  LoadOptions load;
  SplitParams split;
  std::uint64_t seed = 42;
  int k = 10;
  int k_nn = 10;
  unsigned threads = 0;
  std::vector<ModelConfig> models;
  std::vector<ExternalModelConfig> external;
  HybridConfig hybrid;
  /// Shape of the weighted policy (w_ui, w_uu, w_m_base, decay_per_rank).
  WeightPolicy weights;
  RankerTuning ranker;
  std::filesystem::path output = "hyperens-out";
};

/// BPR, WARP and WRMF over their default search spaces.
RunConfig default_config();

/// Parses a JSON config on top of the defaults. Relative paths resolve
/// against `base_dir`. Unknown keys are a ConfigError.
RunConfig parse_config(std::string_view json_text, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);
std::string config_to_json(const RunConfig& cfg);

/// Value checks (k, k_nn, split sizes, weights, ranges).
void validate_config(const RunConfig& cfg);
/// Input files that must exist before a stage runs.
void check_dataset_path(const RunConfig& cfg);
void check_external_paths(const RunConfig& cfg);

}  // namespace hyperens
