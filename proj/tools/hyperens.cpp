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


// hyperens: hypergraph ensemble recommender pipeline.
//
//   hyperens run --config run.json
//   hyperens prepare|train|rank|evaluate --config run.json [--seed N] [--threads N]
//                                         [--k N] [--output DIR]
//   hyperens --config run.json --dump-config

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "hyperens/config.hpp"
#include "hyperens/error.hpp"
#include "hyperens/stages.hpp"

namespace {

struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::optional<int> k;
  std::optional<std::string> output;
  bool dump = false;
};

hyperens::RunConfig effective_config(const Overrides& o) {
  hyperens::RunConfig cfg =
      o.config.empty() ? hyperens::default_config() : hyperens::load_config(o.config);
  if (o.seed) cfg.seed = *o.seed;
  if (o.threads) cfg.threads = *o.threads;
  if (o.k) cfg.k = *o.k;
  if (o.output) cfg.output = *o.output;
  return cfg;
}

int fail(int code, const std::string& stage, const char* what) {
  std::cerr << "hyperens: " << stage << ": " << what << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hypergraph ensemble recommender"};
  app.fallthrough();
  app.require_subcommand(0, 1);
  Overrides o;
  app.add_option("--config", o.config, "JSON run configuration");
  app.add_option("--seed", o.seed, "Random seed (overrides the config)");
  app.add_option("--threads", o.threads, "Worker threads, 0 = all cores; 1 is deterministic");
  app.add_option("--k", o.k, "Recommendation list length");
  app.add_option("--output", o.output, "Output directory");
  app.add_flag("--dump-config", o.dump, "Print the effective configuration and exit");

  auto* prepare = app.add_subcommand("prepare", "Split the dataset and write the manifest");
  auto* train = app.add_subcommand("train", "Train or ingest the base recommenders");
  auto* rank = app.add_subcommand("rank", "Build the hypergraph rankers (and Hybrid)");
  auto* evaluate = app.add_subcommand("evaluate", "Score every ranking on disk");
  auto* run = app.add_subcommand("run", "All stages");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  std::string stage = "config";
  try {
    const hyperens::RunConfig cfg = effective_config(o);
    if (o.dump) {
      std::cout << hyperens::config_to_json(cfg);
      return 0;
    }
    if (app.get_subcommands().empty()) {
      std::cerr << app.help();
      return 1;
    }
    if (prepare->parsed()) {
      stage = "prepare";
      hyperens::cmd_prepare(cfg);
    } else if (train->parsed()) {
      stage = "train";
      hyperens::cmd_train(cfg);
    } else if (rank->parsed()) {
      stage = "rank";
      hyperens::cmd_rank(cfg);
    } else if (evaluate->parsed()) {
      stage = "evaluate";
      std::cout << hyperens::reports_table(hyperens::cmd_evaluate(cfg));
    } else if (run->parsed()) {
      stage = "run";
      std::cout << hyperens::reports_table(hyperens::cmd_run(cfg));
    }
  } catch (const hyperens::ConfigError& e) {
    return fail(1, stage, e.what());
  } catch (const hyperens::DataError& e) {
    return fail(2, stage, e.what());
  } catch (const hyperens::NumericError& e) {
    return fail(3, stage, e.what());
  } catch (const std::exception& e) {
    // I/O failures from the standard library.
    return fail(2, stage, e.what());
  }
  return 0;
}
