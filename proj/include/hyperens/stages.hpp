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

#include <filesystem>
#include <string>
#include <vector>

#include "hyperens/config.hpp"
#include "hyperens/experiment.hpp"
#include "hyperens/metrics.hpp"

namespace hyperens {

/// Files of one run under the configured output directory.
struct OutputLayout {
  std::filesystem::path root;

  std::filesystem::path config() const { return root / "config.json"; }
  std::filesystem::path split() const { return root / "split.json"; }
  std::filesystem::path stats() const { return root / "stats.json"; }
  std::filesystem::path model(const std::string& name, Phase phase) const;
  std::filesystem::path rankings(const std::string& name, Phase phase) const;
  std::filesystem::path rankings_dir(Phase phase) const;
  std::filesystem::path tuning(const std::string& name) const;
  std::filesystem::path edge_weights(const std::string& name) const;
  std::filesystem::path ensemble_summary() const { return root / "ensemble" / "summary.json"; }
  std::filesystem::path report_json() const { return root / "report.json"; }
  std::filesystem::path report_text() const { return root / "report.txt"; }
};

/// Loads the dataset, splits it and writes the split manifest and stats.
void cmd_prepare(const RunConfig& cfg);
/// Trains or ingests every base model and writes its factors, rankings for
/// both phases and tuning log.
void cmd_train(const RunConfig& cfg);
/// Builds H, HypeRS, HypeRS_W and Hybrid from the rankings on disk.
void cmd_rank(const RunConfig& cfg);
/// Scores every test-phase rankings file on disk and writes the report.
std::vector<EvalReport> cmd_evaluate(const RunConfig& cfg);
/// All four stages.
std::vector<EvalReport> cmd_run(const RunConfig& cfg);

}  // namespace hyperens
