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

#include "hyperens/config.hpp"

#include <set>

#include <json.hpp>

#include "hyperens/error.hpp"
#include "hyperens/ranker.hpp"
#include "text_io.hpp"

namespace hyperens {

using nlohmann::json;
namespace fs = std::filesystem;

RunConfig default_config() {
  RunConfig cfg;
  for (auto kind : {ModelKind::bpr, ModelKind::warp, ModelKind::wrmf}) {
    cfg.models.push_back({model_kind_name(kind), std::nullopt, default_search_space(kind), 30});
  }
  return cfg;
}

namespace {

void expect_keys(const json& obj, std::string_view where, std::initializer_list<const char*> keys) {
  if (!obj.is_object()) throw ConfigError(std::string(where) + " must be an object");
  const std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) {
      throw ConfigError("unknown key '" + key + "' in " + std::string(where));
    }
  }
}

fs::path resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  if (path.empty() || path.is_absolute() || base.empty()) return path;
  return base / path;
}

ParamRange parse_range(const json& v, ParamRange like, const std::string& where) {
  if (v.is_array()) {
    if (v.size() != 2) throw ConfigError(where + ": range must be [lo, hi]");
    like.lo = v[0].get<double>();
    like.hi = v[1].get<double>();
  } else if (v.is_object()) {
    expect_keys(v, where, {"lo", "hi", "integer", "log"});
    like.lo = v.at("lo").get<double>();
    like.hi = v.at("hi").get<double>();
    like.integer = v.value("integer", like.integer);
    like.log_scale = v.value("log", like.log_scale);
  } else {
    throw ConfigError(where + ": range must be [lo, hi] or an object");
  }
  if (!(like.lo <= like.hi)) throw ConfigError(where + ": lo must not exceed hi");
  return like;
}

json range_to_json(const ParamRange& r) {
  return {{"lo", r.lo}, {"hi", r.hi}, {"integer", r.integer}, {"log", r.log_scale}};
}

ModelConfig parse_model(const json& v) {
  if (v.is_string()) {
    const auto kind = parse_model_kind(v.get<std::string>());
    return {model_kind_name(kind), std::nullopt, default_search_space(kind), 30};
  }
  expect_keys(v, "models[]", {"name", "hyperparams", "search", "budget"});
  const auto kind = parse_model_kind(v.at("name").get<std::string>());
  ModelConfig m{model_kind_name(kind), std::nullopt, default_search_space(kind), 30};
  if (v.contains("hyperparams") && !v.at("hyperparams").is_null()) {
    m.hyperparams = v.at("hyperparams").get<ParamMap>();
    make_params(kind, *m.hyperparams);  // rejects unknown names early
  }
  if (v.contains("search")) {
    SearchSpace space;
    for (const auto& [name, range] : v.at("search").items()) {
      const auto defaults = default_search_space(kind);
      const auto it = defaults.find(name);
      ParamRange like = it != defaults.end() ? it->second : ParamRange{};
      space[name] = parse_range(range, like, m.name + ".search." + name);
    }
    const auto known = params_to_map(make_params(kind, {}));
    for (const auto& [name, r] : space) {
      if (!known.count(name)) throw ConfigError(m.name + ": unknown hyperparameter '" + name + "'");
    }
    m.search = std::move(space);
  }
  m.budget = v.value("budget", m.budget);
  return m;
}

RankColumn parse_column(const std::string& s) {
  if (s == "auto") return RankColumn::autodetect;
  if (s == "rank") return RankColumn::rank;
  if (s == "score") return RankColumn::score;
  throw ConfigError("external.column must be auto, rank or score");
}

const char* column_name(RankColumn c) {
  switch (c) {
    case RankColumn::rank: return "rank";
    case RankColumn::score: return "score";
    default: return "auto";
  }
}

HeaderMode parse_header(const std::string& s) {
  if (s == "auto") return HeaderMode::autodetect;
  if (s == "yes") return HeaderMode::present;
  if (s == "no") return HeaderMode::absent;
  throw ConfigError("dataset.header must be auto, yes or no");
}

const char* header_name(HeaderMode h) {
  switch (h) {
    case HeaderMode::present: return "yes";
    case HeaderMode::absent: return "no";
    default: return "auto";
  }
}

}  // namespace

RunConfig parse_config(std::string_view text, const fs::path& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  RunConfig cfg = default_config();
  try {
    expect_keys(j, "config", {"dataset", "split", "seed", "k", "k_nn", "threads", "models",
                              "external", "hybrid", "weights", "ranker", "output"});
    if (j.contains("dataset")) {
      const auto& d = j.at("dataset");
      expect_keys(d, "dataset", {"path", "format", "min_rating", "header"});
      if (d.contains("path")) cfg.dataset = resolve(base_dir, d.at("path").get<std::string>());
      if (d.contains("format")) cfg.load.format = parse_file_format(d.at("format").get<std::string>());
      if (d.contains("min_rating") && !d.at("min_rating").is_null()) {
        cfg.load.min_rating = d.at("min_rating").get<double>();
      }
      if (d.contains("header")) cfg.load.header = parse_header(d.at("header").get<std::string>());
    }
    if (j.contains("split")) {
      const auto& s = j.at("split");
      expect_keys(s, "split", {"n_test", "n_val", "min_train"});
      cfg.split.n_test = s.value("n_test", cfg.split.n_test);
      cfg.split.n_val = s.value("n_val", cfg.split.n_val);
      cfg.split.min_train = s.value("min_train", cfg.split.min_train);
    }
    cfg.seed = j.value("seed", cfg.seed);
    cfg.k = j.value("k", cfg.k);
    cfg.k_nn = j.value("k_nn", cfg.k_nn);
    cfg.threads = j.value("threads", cfg.threads);
    if (j.contains("models")) {
      cfg.models.clear();
      std::set<std::string> names;
      for (const auto& m : j.at("models")) {
        cfg.models.push_back(parse_model(m));
        if (!names.insert(cfg.models.back().name).second) {
          throw ConfigError("model '" + cfg.models.back().name + "' listed twice");
        }
      }
    }
    if (j.contains("external")) {
      for (const auto& e : j.at("external")) {
        expect_keys(e, "external[]", {"name", "validation", "test", "column"});
        ExternalModelConfig ext;
        ext.name = e.at("name").get<std::string>();
        ext.validation = resolve(base_dir, e.at("validation").get<std::string>());
        ext.test = resolve(base_dir, e.at("test").get<std::string>());
        ext.column = parse_column(e.value("column", std::string("auto")));
        cfg.external.push_back(std::move(ext));
      }
    }
    if (j.contains("hybrid")) {
      const auto& h = j.at("hybrid");
      expect_keys(h, "hybrid", {"enabled", "weights", "range", "budget"});
      cfg.hybrid.enabled = h.value("enabled", cfg.hybrid.enabled);
      if (h.contains("weights") && !h.at("weights").is_null()) {
        cfg.hybrid.weights = h.at("weights").get<std::map<std::string, double>>();
      }
      if (h.contains("range")) cfg.hybrid.range = parse_range(h.at("range"), cfg.hybrid.range, "hybrid.range");
      cfg.hybrid.budget = h.value("budget", cfg.hybrid.budget);
    }
    if (j.contains("weights")) {
      const auto& w = j.at("weights");
      expect_keys(w, "weights", {"w_ui", "w_uu", "w_m_base", "decay_per_rank"});
      cfg.weights.w_ui = w.value("w_ui", cfg.weights.w_ui);
      cfg.weights.w_uu = w.value("w_uu", cfg.weights.w_uu);
      cfg.weights.w_m_base = w.value("w_m_base", cfg.weights.w_m_base);
      cfg.weights.decay_per_rank = w.value("decay_per_rank", cfg.weights.decay_per_rank);
    }
    if (j.contains("ranker")) {
      const auto& r = j.at("ranker");
      expect_keys(r, "ranker", {"vartheta", "range", "budget", "tol", "max_iter"});
      if (r.contains("vartheta") && !r.at("vartheta").is_null()) {
        cfg.ranker.vartheta = r.at("vartheta").get<double>();
      }
      if (r.contains("range")) cfg.ranker.range = parse_range(r.at("range"), cfg.ranker.range, "ranker.range");
      cfg.ranker.budget = r.value("budget", cfg.ranker.budget);
      cfg.ranker.tol = r.value("tol", cfg.ranker.tol);
      cfg.ranker.max_iter = r.value("max_iter", cfg.ranker.max_iter);
    }
    if (j.contains("output")) cfg.output = resolve(base_dir, j.at("output").get<std::string>());
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  validate_config(cfg);
  return cfg;
}

RunConfig load_config(const fs::path& path) {
  if (!fs::exists(path)) throw ConfigError("config file not found: " + path.string());
  return parse_config(detail::read_text_file(path), path.parent_path());
}

std::string config_to_json(const RunConfig& cfg) {
  json models = json::array();
  for (const auto& m : cfg.models) {
    json search = json::object();
    for (const auto& [name, r] : m.search) search[name] = range_to_json(r);
    models.push_back({{"name", m.name},
                      {"hyperparams", m.hyperparams ? json(*m.hyperparams) : json(nullptr)},
                      {"search", search},
                      {"budget", m.budget}});
  }
  json external = json::array();
  for (const auto& e : cfg.external) {
    external.push_back({{"name", e.name},
                        {"validation", e.validation.string()},
                        {"test", e.test.string()},
                        {"column", column_name(e.column)}});
  }
  json j = {
      {"dataset",
       {{"path", cfg.dataset.string()},
        {"format", cfg.load.format == FileFormat::tsv ? "tsv" : "csv"},
        {"min_rating", cfg.load.min_rating ? json(*cfg.load.min_rating) : json(nullptr)},
        {"header", header_name(cfg.load.header)}}},
      {"split",
       {{"n_test", cfg.split.n_test}, {"n_val", cfg.split.n_val}, {"min_train", cfg.split.min_train}}},
      {"seed", cfg.seed},
      {"k", cfg.k},
      {"k_nn", cfg.k_nn},
      {"threads", cfg.threads},
      {"models", models},
      {"external", external},
      {"hybrid",
       {{"enabled", cfg.hybrid.enabled},
        {"weights", cfg.hybrid.weights ? json(*cfg.hybrid.weights) : json(nullptr)},
        {"range", range_to_json(cfg.hybrid.range)},
        {"budget", cfg.hybrid.budget}}},
      {"weights",
       {{"w_ui", cfg.weights.w_ui},
        {"w_uu", cfg.weights.w_uu},
        {"w_m_base", cfg.weights.w_m_base},
        {"decay_per_rank", cfg.weights.decay_per_rank}}},
      {"ranker",
       {{"vartheta", cfg.ranker.vartheta ? json(*cfg.ranker.vartheta) : json(nullptr)},
        {"range", range_to_json(cfg.ranker.range)},
        {"budget", cfg.ranker.budget},
        {"tol", cfg.ranker.tol},
        {"max_iter", cfg.ranker.max_iter}}},
      {"output", cfg.output.string()}};
  return j.dump(2) + "\n";
}

void validate_config(const RunConfig& cfg) {
  if (cfg.k < 1) throw ConfigError("k must be >= 1");
  if (cfg.k_nn < 1) throw ConfigError("k_nn must be >= 1");
  if (cfg.split.n_test < 1) throw ConfigError("split.n_test must be >= 1");
  if (cfg.split.n_val < 1) throw ConfigError("split.n_val must be >= 1 (tuning needs validation)");
  if (cfg.split.min_train < 1) throw ConfigError("split.min_train must be >= 1");
  for (const auto& m : cfg.models) {
    if (!m.hyperparams && m.budget < 1) throw ConfigError(m.name + ": budget must be >= 1");
  }
  std::set<std::string> names;
  for (const auto& m : cfg.models) names.insert(m.name);
  for (const auto& e : cfg.external) {
    if (e.name.empty()) throw ConfigError("external model needs a name");
    if (e.name == "H" || e.name == "Hybrid" || e.name == "HypeRS" || e.name == "HypeRS_W") {
      throw ConfigError("external model name '" + e.name + "' is reserved");
    }
    if (!names.insert(e.name).second) throw ConfigError("model name '" + e.name + "' used twice");
  }
  if (cfg.hybrid.weights) {
    for (const auto& [name, w] : *cfg.hybrid.weights) {
      if (!names.count(name)) throw ConfigError("hybrid weight for unknown model '" + name + "'");
      if (!(w > 0.0)) throw ConfigError("hybrid weights must be positive");
    }
    if (cfg.hybrid.weights->size() != names.size()) {
      throw ConfigError("hybrid.weights must give one weight per model");
    }
  }
  if (!(cfg.hybrid.range.lo > 0.0) || cfg.hybrid.range.lo > cfg.hybrid.range.hi) {
    throw ConfigError("hybrid.range must be positive with lo <= hi");
  }
  if (cfg.hybrid.enabled && !cfg.hybrid.weights && cfg.hybrid.budget < 1) {
    throw ConfigError("hybrid.budget must be >= 1");
  }
  WeightPolicy shape = cfg.weights;
  shape.model_ranks.clear();
  shape.validate();
  RankerConfig probe;
  probe.vartheta = cfg.ranker.vartheta.value_or(cfg.ranker.range.hi);
  probe.tol = cfg.ranker.tol;
  probe.max_iter = cfg.ranker.max_iter;
  probe.validate();
  if (!(cfg.ranker.range.lo > 0.0) || cfg.ranker.range.lo > cfg.ranker.range.hi) {
    throw ConfigError("ranker.range must be positive with lo <= hi");
  }
  if (!cfg.ranker.vartheta) {
    probe.vartheta = cfg.ranker.range.lo;
    probe.validate();
  }
  if (!cfg.ranker.vartheta && cfg.ranker.budget < 1) throw ConfigError("ranker.budget must be >= 1");
}

void check_dataset_path(const RunConfig& cfg) {
  if (cfg.dataset.empty()) throw ConfigError("dataset.path is not set");
  if (!fs::exists(cfg.dataset)) throw DataError("dataset file not found: " + cfg.dataset.string());
}

void check_external_paths(const RunConfig& cfg) {
  for (const auto& e : cfg.external) {
    for (const auto& p : {e.validation, e.test}) {
      if (!fs::exists(p)) {
        throw DataError("rankings for external model '" + e.name + "' not found: " + p.string());
      }
    }
  }
}

}  // namespace hyperens
