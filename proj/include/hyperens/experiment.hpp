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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hyperens/config.hpp"
#include "hyperens/dataset.hpp"
#include "hyperens/error.hpp"
#include "hyperens/factor_model.hpp"
#include "hyperens/hypergraph.hpp"
#include "hyperens/metrics.hpp"
#include "hyperens/ranker.hpp"
#include "hyperens/ranking_list.hpp"
#include "hyperens/tuning.hpp"
#include "hyperens/weight_policy.hpp"

namespace hyperens {

/// Runs `fn`, prefixing any library error with `stage: ` while keeping its type.
template <typename Fn>
decltype(auto) run_stage(const std::string& stage, Fn&& fn) {
  try {
    return fn();
  } catch (const ConvergenceError& e) {
    throw ConvergenceError(stage + ": " + e.what(), e.last_delta());
  } catch (const NumericError& e) {
    throw NumericError(stage + ": " + e.what());
  } catch (const DataError& e) {
    throw DataError(stage + ": " + e.what());
  } catch (const ConfigError& e) {
    throw ConfigError(stage + ": " + e.what());
  }
}

struct PreparedData {
  SplitDataset split;
  DatasetStats stats;
};

PreparedData prepare_data(const RunConfig& cfg);

/// A base recommender's lists for both phases. Built-in models also keep
/// their factors, which the Hybrid baseline scores with.
struct ModelRun {
  std::string name;
  bool external = false;
  std::optional<FactorModel> validation_model;
  std::optional<FactorModel> test_model;
  RankingList validation;
  RankingList test;
  std::optional<TuneResult> tuning;
  ParamMap params;
};

/// Tunes (or takes the fixed hyperparameters of) one built-in model on the
/// validation phase, then refits the winner on train + validation.
ModelRun train_builtin(const RunConfig& cfg, const SplitDataset& split, const ModelConfig& model);
ModelRun load_external(const RunConfig& cfg, const SplitDataset& split,
                       const ExternalModelConfig& model);
/// Built-in models in config order, then external ones.
std::vector<ModelRun> train_models(const RunConfig& cfg, const SplitDataset& split);

/// Hyperedges shared by every hypergraph of one phase.
struct GraphBase {
  InteractionDataset fit;
  std::vector<Hyperedge> ui;
  std::vector<Hyperedge> uu;
};

GraphBase graph_base(const SplitDataset& split, Phase phase, int k_nn, unsigned threads);
Hypergraph build_hypergraph(const GraphBase& base, std::span<const RankingList> lists,
                            const WeightPolicy& policy);

/// One hypergraph ranker: its weight policy, the chosen vartheta, the
/// vartheta search log and the test-phase graph and lists.
struct EnsembleRun {
  std::string name;
  WeightPolicy policy;
  double vartheta = 0.0;
  std::optional<TuneResult> tuning;
  std::optional<Hypergraph> graph;
  RankingList test;
};

struct HybridRun {
  std::map<std::string, double> weights;
  std::optional<TuneResult> tuning;
  RankingList test;
};

struct EnsembleResults {
  /// H, HypeRS and HypeRS_W (the last two only when there are models).
  std::vector<EnsembleRun> rankers;
  std::optional<HybridRun> hybrid;
  /// Validation ranks behind HypeRS_W.
  std::map<std::string, int> model_ranks;
};

/// Picks vartheta by validation precision@k on `validation_graph` (or
/// returns the configured value). Every ranker uses the same search seed.
std::pair<double, std::optional<TuneResult>> choose_vartheta(const RunConfig& cfg,
                                                             const SplitDataset& split,
                                                             const Hypergraph& validation_graph,
                                                             const InteractionDataset& fit);

EnsembleResults run_ensembles(const RunConfig& cfg, const SplitDataset& split,
                              std::span<const ModelRun> models);

/// Test-phase reports, in the order given.
std::vector<EvalReport> evaluate_all(const SplitDataset& split, std::span<const RankingList> lists);

/// Report order: base models, H, Hybrid, HypeRS, HypeRS_W.
std::vector<RankingList> report_lists(std::span<const ModelRun> models,
                                      const EnsembleResults& ensembles);

struct ExperimentResult {
  PreparedData data;
  std::vector<ModelRun> models;
  EnsembleResults ensembles;
  std::vector<EvalReport> reports;
};

/// prepare, train, rank and evaluate in memory.
ExperimentResult run_experiment(const RunConfig& cfg);

}  // namespace hyperens
