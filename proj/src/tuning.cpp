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

#include "hyperens/tuning.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "hyperens/error.hpp"

namespace hyperens {

SearchSpace default_search_space(ModelKind kind) {
  switch (kind) {
    case ModelKind::bpr:
      return {{"iterations", {1000, 2000, true, false}},
              {"factors", {100, 250, true, false}},
              {"regularization", {0.01, 0.05, false, false}},
              {"learning_rate", {0.001, 0.07, false, false}}};
    case ModelKind::warp:
      return {{"iterations", {200, 850, true, false}},
              {"factors", {15, 40, true, false}},
              {"regularization", {1e-6, 1e-3, false, true}},
              {"learning_rate", {0.001, 0.1, false, false}}};
    case ModelKind::wrmf:
      return {{"iterations", {1000, 2000, true, false}},
              {"factors", {100, 250, true, false}},
              {"regularization", {0.01, 0.05, false, false}}};
  }
  throw ConfigError("unknown model kind");
}

ParamMap sample_params(const SearchSpace& space, std::mt19937_64& rng) {
  ParamMap out;
  for (const auto& [name, r] : space) {
    if (!(r.lo <= r.hi)) throw ConfigError("search range for '" + name + "' is empty");
    if (r.integer) {
      std::uniform_int_distribution<long long> pick(static_cast<long long>(std::ceil(r.lo)),
                                                    static_cast<long long>(std::floor(r.hi)));
      out[name] = static_cast<double>(pick(rng));
    } else if (r.log_scale) {
      if (!(r.lo > 0)) throw ConfigError("log-scale range for '" + name + "' must be positive");
      std::uniform_real_distribution<double> pick(std::log(r.lo), std::log(r.hi));
      out[name] = std::clamp(std::exp(pick(rng)), r.lo, r.hi);
    } else {
      std::uniform_real_distribution<double> pick(r.lo, r.hi);
      out[name] = r.lo == r.hi ? r.lo : pick(rng);
    }
  }
  return out;
}

TuneResult tune(const SearchSpace& space, int budget, std::uint64_t seed,
                const std::function<double(const ParamMap&)>& objective) {
  if (budget < 1) throw ConfigError("tuning budget must be >= 1");
  std::mt19937_64 rng(seed);
  TuneResult result;
  bool any = false;
  for (int t = 0; t < budget; ++t) {
    Trial trial;
    trial.params = sample_params(space, rng);
    try {
      trial.score = objective(trial.params);
    } catch (const NumericError& e) {
      trial.failed = true;
      trial.error = e.what();
      result.trials.push_back(std::move(trial));
      continue;
    }
    if (!any || trial.score > result.best_score) {
      any = true;
      result.best_score = trial.score;
      result.best = trial.params;
      result.best_index = static_cast<std::size_t>(t);
    }
    result.trials.push_back(std::move(trial));
  }
  if (!any) {
    throw NumericError("every tuning trial failed; last error: " + result.trials.back().error);
  }
  return result;
}

std::string tune_result_json(const TuneResult& r) {
  nlohmann::json trials = nlohmann::json::array();
  for (const auto& t : r.trials) {
    nlohmann::json entry = {{"params", t.params}, {"score", t.score}};
    if (t.failed) entry["error"] = t.error;
    trials.push_back(std::move(entry));
  }
  return nlohmann::json{{"best", r.best},
                        {"best_score", r.best_score},
                        {"best_index", r.best_index},
                        {"trials", trials}}
             .dump(2) +
         "\n";
}

std::uint64_t derive_seed(std::uint64_t base, std::string_view label, std::uint64_t index) {
  // FNV-1a over the label, then a splitmix64 finalizer.
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : label) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::uint64_t z = base ^ h ^ (index * 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace hyperens
