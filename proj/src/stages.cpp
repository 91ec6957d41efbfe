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


#include "hyperens/stages.hpp"

#include <algorithm>
#include <set>

#include <json.hpp>

#include "hyperens/error.hpp"
#include "text_io.hpp"

namespace hyperens {

namespace fs = std::filesystem;

fs::path OutputLayout::model(const std::string& name, Phase phase) const {
  return root / "models" / (name + "." + phase_name(phase) + ".bin");
}

fs::path OutputLayout::rankings_dir(Phase phase) const {
  return root / "rankings" / phase_name(phase);
}

fs::path OutputLayout::rankings(const std::string& name, Phase phase) const {
  return rankings_dir(phase) / (name + ".csv");
}

fs::path OutputLayout::tuning(const std::string& name) const {
  return root / "tuning" / (name + ".json");
}

fs::path OutputLayout::edge_weights(const std::string& name) const {
  return root / "ensemble" / (name + ".weights.csv");
}

namespace {

constexpr Phase kPhases[] = {Phase::validation, Phase::test};

SplitDataset load_split(const OutputLayout& out) {
  if (!fs::exists(out.split())) {
    throw DataError("no split manifest at " + out.split().string() + "; run prepare first");
  }
  return read_split_manifest(out.split());
}

std::vector<std::string> base_model_names(const RunConfig& cfg) {
  std::vector<std::string> names;
  for (const auto& m : cfg.models) names.push_back(m.name);
  for (const auto& e : cfg.external) names.push_back(e.name);
  return names;
}

nlohmann::json policy_json(const WeightPolicy& p, const std::vector<std::string>& models) {
  nlohmann::json weights = nlohmann::json::object();
  for (const auto& m : models) weights[m] = p.model_weight(m);
  return {{"w_ui", p.w_ui},
          {"w_uu", p.w_uu},
          {"w_m_base", p.w_m_base},
          {"decay_per_rank", p.decay_per_rank},
          {"model_ranks", p.model_ranks},
          {"model_weights", weights}};
}

}  // namespace

void cmd_prepare(const RunConfig& cfg) {
  validate_config(cfg);
  const OutputLayout out{cfg.output};
  const PreparedData data = prepare_data(cfg);
  detail::write_text_file(out.config(), config_to_json(cfg));
  write_split_manifest(out.split(), data.split);
  detail::write_text_file(out.stats(), stats_json(data.stats));
}

void cmd_train(const RunConfig& cfg) {
  validate_config(cfg);
  check_external_paths(cfg);
  const OutputLayout out{cfg.output};
  const SplitDataset split = load_split(out);
  for (const auto& m : cfg.models) {
    const ModelRun run = run_stage(m.name, [&] { return train_builtin(cfg, split, m); });
    write_factor_model(out.model(run.name, Phase::validation), *run.validation_model);
    write_factor_model(out.model(run.name, Phase::test), *run.test_model);
    write_rankings(out.rankings(run.name, Phase::validation), run.validation, split.train);
    write_rankings(out.rankings(run.name, Phase::test), run.test, split.train);
    if (run.tuning) detail::write_text_file(out.tuning(run.name), tune_result_json(*run.tuning));
  }
  for (const auto& e : cfg.external) {
    const ModelRun run = run_stage(e.name, [&] { return load_external(cfg, split, e); });
    write_rankings(out.rankings(run.name, Phase::validation), run.validation, split.train);
    write_rankings(out.rankings(run.name, Phase::test), run.test, split.train);
  }
}

void cmd_rank(const RunConfig& cfg) {
  validate_config(cfg);
  const OutputLayout out{cfg.output};
  const SplitDataset split = load_split(out);

  std::vector<std::string> missing;
  for (const auto& name : base_model_names(cfg)) {
    for (Phase phase : kPhases) {
      if (!fs::exists(out.rankings(name, phase))) missing.push_back(out.rankings(name, phase).string());
    }
  }
  for (const auto& m : cfg.models) {
    for (Phase phase : kPhases) {
      if (!fs::exists(out.model(m.name, phase))) missing.push_back(out.model(m.name, phase).string());
    }
  }
  if (!missing.empty()) {
    std::string msg = "missing rankings for the configured models (run train first):";
    for (const auto& p : missing) msg += "\n  " + p;
    throw DataError(msg);
  }

  std::vector<ModelRun> runs;
  for (const auto& m : cfg.models) {
    ModelRun run;
    run.name = m.name;
    run.validation_model = read_factor_model(out.model(m.name, Phase::validation));
    run.test_model = read_factor_model(out.model(m.name, Phase::test));
    runs.push_back(std::move(run));
  }
  for (const auto& e : cfg.external) {
    ModelRun run;
    run.name = e.name;
    run.external = true;
    runs.push_back(std::move(run));
  }
  for (auto& run : runs) {
    run.validation = load_external_rankings(out.rankings(run.name, Phase::validation),
                                            split.fit_set(Phase::validation), cfg.k, run.name);
    run.test = load_external_rankings(out.rankings(run.name, Phase::test),
                                      split.fit_set(Phase::test), cfg.k, run.name);
  }

  const EnsembleResults ens = run_ensembles(cfg, split, runs);
  const auto names = base_model_names(cfg);
  nlohmann::json summary = {{"model_ranks", ens.model_ranks}, {"rankers", nlohmann::json::array()}};
  for (const auto& r : ens.rankers) {
    write_rankings(out.rankings(r.name, Phase::test), r.test, split.train);
    if (r.tuning) detail::write_text_file(out.tuning(r.name), tune_result_json(*r.tuning));
    write_edge_weights(out.edge_weights(r.name), *r.graph, split.train);
    const bool has_models = r.graph->count(EdgeKind::model) > 0;
    summary["rankers"].push_back({{"name", r.name},
                                  {"vartheta", r.vartheta},
                                  {"edges", r.graph->num_edges()},
                                  {"policy", policy_json(r.policy, has_models ? names
                                                                              : std::vector<std::string>{})}});
  }
  if (ens.hybrid) {
    write_rankings(out.rankings("Hybrid", Phase::test), ens.hybrid->test, split.train);
    if (ens.hybrid->tuning) {
      detail::write_text_file(out.tuning("Hybrid"), tune_result_json(*ens.hybrid->tuning));
    }
    summary["hybrid_weights"] = ens.hybrid->weights;
  }
  detail::write_text_file(out.ensemble_summary(), summary.dump(2) + "\n");
}

std::vector<EvalReport> cmd_evaluate(const RunConfig& cfg) {
  if (cfg.k < 1) throw ConfigError("k must be >= 1");
  const OutputLayout out{cfg.output};
  const SplitDataset split = load_split(out);
  const fs::path dir = out.rankings_dir(Phase::test);

  std::set<std::string> found;
  if (fs::is_directory(dir)) {
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (entry.is_regular_file() && entry.path().extension() == ".csv") {
        found.insert(entry.path().stem().string());
      }
    }
  }
  if (found.empty()) throw DataError("no rankings found under " + dir.string());

  // Known names in report order first, anything else alphabetically.
  std::vector<std::string> order = base_model_names(cfg);
  for (const char* n : {"H", "Hybrid", "HypeRS", "HypeRS_W"}) order.emplace_back(n);
  std::vector<std::string> names;
  for (const auto& n : order) {
    if (found.erase(n)) names.push_back(n);
  }
  names.insert(names.end(), found.begin(), found.end());

  const InteractionDataset fit = split.fit_set(Phase::test);
  std::vector<RankingList> lists;
  for (const auto& n : names) {
    lists.push_back(load_external_rankings(out.rankings(n, Phase::test), fit, cfg.k, n));
  }
  auto reports = evaluate_all(split, lists);
  detail::write_text_file(out.report_json(), reports_json(reports));
  detail::write_text_file(out.report_text(), reports_table(reports));
  return reports;
}

std::vector<EvalReport> cmd_run(const RunConfig& cfg) {
  run_stage("prepare", [&] { cmd_prepare(cfg); });
  run_stage("train", [&] { cmd_train(cfg); });
  run_stage("rank", [&] { cmd_rank(cfg); });
  return run_stage("evaluate", [&] { return cmd_evaluate(cfg); });
}

}  // namespace hyperens
