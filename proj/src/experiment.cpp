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


#include "hyperens/experiment.hpp"

#include <limits>
#include <utility>

#include "hyperens/ensemble.hpp"

namespace hyperens {

PreparedData prepare_data(const RunConfig& cfg) {
  check_dataset_path(cfg);
  PreparedData out;
  const auto ds = load_interactions(cfg.dataset, cfg.load, &out.stats);
  out.split = split(ds, cfg.split, cfg.seed);
  return out;
}

ModelRun train_builtin(const RunConfig& cfg, const SplitDataset& split, const ModelConfig& model) {
  const ModelKind kind = parse_model_kind(model.name);
  const InteractionDataset val_fit = split.fit_set(Phase::validation);
  const std::string seed_label = "train:" + model.name;

  ModelRun run;
  run.name = model.name;
  std::size_t best_index = 0;
  if (model.hyperparams) {
    run.params = *model.hyperparams;
    FactorModel m = train_model(val_fit, make_params(kind, run.params),
                                derive_seed(cfg.seed, seed_label, 0), cfg.threads);
    run.validation = rank_topk(m, val_fit, cfg.k, cfg.threads);
    run.validation_model = std::move(m);
  } else {
    std::size_t trial = 0;
    double best = -std::numeric_limits<double>::infinity();
    auto objective = [&](const ParamMap& p) {
      const std::size_t t = trial++;
      FactorModel m = train_model(val_fit, make_params(kind, p),
                                  derive_seed(cfg.seed, seed_label, t), cfg.threads);
      RankingList list = rank_topk(m, val_fit, cfg.k, cfg.threads);
      const double score = precision_at_k(list, split.validation);
      if (score > best) {
        best = score;
        run.validation = std::move(list);
        run.validation_model = std::move(m);
      }
      return score;
    };
    run.tuning = tune(model.search, model.budget, derive_seed(cfg.seed, "tune:" + model.name),
                      objective);
    run.params = run.tuning->best;
    best_index = run.tuning->best_index;
  }

  const InteractionDataset test_fit = split.fit_set(Phase::test);
  FactorModel m = train_model(test_fit, make_params(kind, run.params),
                              derive_seed(cfg.seed, seed_label, best_index), cfg.threads);
  run.test = rank_topk(m, test_fit, cfg.k, cfg.threads);
  run.test_model = std::move(m);
  return run;
}

ModelRun load_external(const RunConfig& cfg, const SplitDataset& split,
                       const ExternalModelConfig& model) {
  ModelRun run;
  run.name = model.name;
  run.external = true;
  run.validation = load_external_rankings(model.validation, split.fit_set(Phase::validation),
                                          cfg.k, model.name, model.column);
  run.test = load_external_rankings(model.test, split.fit_set(Phase::test), cfg.k, model.name,
                                    model.column);
  return run;
}

std::vector<ModelRun> train_models(const RunConfig& cfg, const SplitDataset& split) {
  check_external_paths(cfg);
  std::vector<ModelRun> runs;
  for (const auto& m : cfg.models) {
    runs.push_back(run_stage(m.name, [&] { return train_builtin(cfg, split, m); }));
  }
  for (const auto& e : cfg.external) {
    runs.push_back(run_stage(e.name, [&] { return load_external(cfg, split, e); }));
  }
  return runs;
}

GraphBase graph_base(const SplitDataset& split, Phase phase, int k_nn, unsigned threads) {
  GraphBase base;
  base.fit = split.fit_set(phase);
  base.ui = build_ui_edges(base.fit);
  base.uu = build_uu_edges(base.fit, k_nn, threads);
  return base;
}

Hypergraph build_hypergraph(const GraphBase& base, std::span<const RankingList> lists,
                            const WeightPolicy& policy) {
  return assemble(base.fit.num_users(), base.fit.num_items(), base.ui, base.uu,
                  build_model_edges(lists, base.fit.num_users()), policy);
}

namespace {

RankerConfig ranker_config(const RunConfig& cfg, double vartheta) {
  RankerConfig rc;
  rc.vartheta = vartheta;
  rc.tol = cfg.ranker.tol;
  rc.max_iter = cfg.ranker.max_iter;
  return rc;
}

}  // namespace

std::pair<double, std::optional<TuneResult>> choose_vartheta(const RunConfig& cfg,
                                                             const SplitDataset& split,
                                                             const Hypergraph& validation_graph,
                                                             const InteractionDataset& fit) {
  if (cfg.ranker.vartheta) return {*cfg.ranker.vartheta, std::nullopt};
  const AffinityOperator a(validation_graph);
  const SearchSpace space{{"vartheta", cfg.ranker.range}};
  auto result = tune(space, cfg.ranker.budget, derive_seed(cfg.seed, "vartheta"),
                     [&](const ParamMap& p) {
                       const auto list = recommend_all(validation_graph, a, fit, cfg.k,
                                                       ranker_config(cfg, p.at("vartheta")), "",
                                                       cfg.threads);
                       return precision_at_k(list, split.validation);
                     });
  const double best = result.best.at("vartheta");
  return {best, std::move(result)};
}

EnsembleResults run_ensembles(const RunConfig& cfg, const SplitDataset& split,
                              std::span<const ModelRun> models) {
  const GraphBase val_base = graph_base(split, Phase::validation, cfg.k_nn, cfg.threads);
  const GraphBase test_base = graph_base(split, Phase::test, cfg.k_nn, cfg.threads);
  std::vector<RankingList> val_lists;
  std::vector<RankingList> test_lists;
  for (const auto& m : models) {
    val_lists.push_back(m.validation);
    test_lists.push_back(m.test);
  }

  EnsembleResults out;
  auto run_ranker = [&](const std::string& name, std::span<const RankingList> val,
                        std::span<const RankingList> test, const WeightPolicy& policy) {
    return run_stage(name, [&] {
      EnsembleRun r;
      r.name = name;
      r.policy = policy;
      const Hypergraph val_graph = build_hypergraph(val_base, val, policy);
      std::tie(r.vartheta, r.tuning) = choose_vartheta(cfg, split, val_graph, val_base.fit);
      Hypergraph graph = build_hypergraph(test_base, test, policy);
      const AffinityOperator a(graph);
      r.test = recommend_all(graph, a, test_base.fit, cfg.k, ranker_config(cfg, r.vartheta), name,
                             cfg.threads);
      r.graph = std::move(graph);
      return r;
    });
  };

  out.rankers.push_back(run_ranker("H", {}, {}, uniform_policy()));
  if (models.empty()) return out;

  if (cfg.hybrid.enabled) {
    out.hybrid = run_stage("Hybrid", [&] {
      const auto num_items = split.num_items();
      std::vector<ScoreSource> val_sources;
      std::vector<ScoreSource> test_sources;
      for (const auto& m : models) {
        val_sources.push_back(m.validation_model ? score_source(*m.validation_model)
                                                 : score_source(m.validation, num_items));
        test_sources.push_back(m.test_model ? score_source(*m.test_model)
                                            : score_source(m.test, num_items));
      }
      auto weight_vector = [&](const std::map<std::string, double>& w) {
        std::vector<double> v;
        for (const auto& m : models) v.push_back(w.at(m.name));
        return v;
      };
      HybridRun h;
      if (cfg.hybrid.weights) {
        h.weights = *cfg.hybrid.weights;
      } else {
        SearchSpace space;
        for (const auto& m : models) space[m.name] = cfg.hybrid.range;
        h.tuning = tune(space, cfg.hybrid.budget, derive_seed(cfg.seed, "hybrid"),
                        [&](const ParamMap& p) {
                          const auto list = hybrid_rank(val_sources, weight_vector(p),
                                                        val_base.fit, cfg.k, cfg.threads);
                          return precision_at_k(list, split.validation);
                        });
        h.weights = h.tuning->best;
      }
      h.test = hybrid_rank(test_sources, weight_vector(h.weights), test_base.fit, cfg.k,
                           cfg.threads, "Hybrid");
      return h;
    });
  }

  out.model_ranks = rank_models(val_lists, split.validation);
  out.rankers.push_back(run_ranker("HypeRS", val_lists, test_lists, uniform_policy()));
  out.rankers.push_back(run_ranker("HypeRS_W", val_lists, test_lists,
                                   weighted_policy(out.model_ranks, cfg.weights)));
  return out;
}

std::vector<EvalReport> evaluate_all(const SplitDataset& split, std::span<const RankingList> lists) {
  std::vector<EvalReport> reports;
  for (const auto& list : lists) {
    reports.push_back(run_stage(list.model_name, [&] { return evaluate(list, split.test); }));
  }
  return reports;
}

std::vector<RankingList> report_lists(std::span<const ModelRun> models,
                                      const EnsembleResults& ensembles) {
  std::vector<RankingList> lists;
  for (const auto& m : models) lists.push_back(m.test);
  for (std::size_t r = 0; r < ensembles.rankers.size(); ++r) {
    lists.push_back(ensembles.rankers[r].test);
    if (r == 0 && ensembles.hybrid) lists.push_back(ensembles.hybrid->test);
  }
  return lists;
}

ExperimentResult run_experiment(const RunConfig& cfg) {
  run_stage("config", [&] { validate_config(cfg); });
  ExperimentResult r;
  r.data = run_stage("prepare", [&] { return prepare_data(cfg); });
  r.models = run_stage("train", [&] { return train_models(cfg, r.data.split); });
  r.ensembles = run_stage("rank", [&] { return run_ensembles(cfg, r.data.split, r.models); });
  const auto lists = report_lists(r.models, r.ensembles);
  r.reports = run_stage("evaluate", [&] { return evaluate_all(r.data.split, lists); });
  return r;
}

}  // namespace hyperens
