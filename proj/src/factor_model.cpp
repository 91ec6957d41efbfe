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

#include "hyperens/factor_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <optional>
#include <sstream>

#include <Eigen/Cholesky>
#include <json.hpp>

#include "hyperens/error.hpp"
#include "hyperens/parallel.hpp"

namespace hyperens {

using nlohmann::json;

ModelKind parse_model_kind(std::string_view name) {
  if (name == "BPR") return ModelKind::bpr;
  if (name == "WARP") return ModelKind::warp;
  if (name == "WRMF") return ModelKind::wrmf;
  throw ConfigError("unknown built-in model '" + std::string(name) +
                    "' (expected BPR, WARP or WRMF)");
}

const char* model_kind_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::bpr: return "BPR";
    case ModelKind::warp: return "WARP";
    case ModelKind::wrmf: return "WRMF";
  }
  return "?";
}

namespace {

int as_count(const std::string& key, double v) {
  if (!(v >= 1) || v != std::floor(v)) {
    throw ConfigError("hyperparameter '" + key + "' must be a positive integer");
  }
  return static_cast<int>(v);
}

template <typename Params, typename Setter>
Params apply_overrides(Params p, const ParamMap& overrides, Setter&& set) {
  for (const auto& [key, value] : overrides) {
    if (!set(p, key, value)) throw ConfigError("unknown hyperparameter '" + key + "'");
  }
  return p;
}

std::string describe(const ModelParams& params) {
  std::ostringstream os;
  bool first = true;
  for (const auto& [k, v] : params_to_map(params)) {
    os << (first ? "" : ", ") << k << "=" << v;
    first = false;
  }
  return os.str();
}

void check_finite(const FactorModel& model, double loss, int iteration) {
  if (!std::isfinite(loss) || !model.all_finite()) {
    throw NumericError(model.name + " diverged at iteration " + std::to_string(iteration) +
                       " (" + describe(model.params) + ")");
  }
}

std::optional<ItemIndex> sample_negative(const InteractionDataset& train, UserIndex u,
                                         std::mt19937_64& rng) {
  const auto profile = train.profile(u);
  if (static_cast<std::int32_t>(profile.size()) >= train.num_items()) return std::nullopt;
  std::uniform_int_distribution<ItemIndex> pick(0, train.num_items() - 1);
  while (true) {
    const ItemIndex j = pick(rng);
    if (!std::binary_search(profile.begin(), profile.end(), j)) return j;
  }
}

void init_factors(FactorModel& m, const InteractionDataset& train, int factors, bool item_bias,
                  std::mt19937_64& rng) {
  const int cols = factors + (item_bias ? 1 : 0);
  std::uniform_real_distribution<double> unit(-0.5, 0.5);
  const double scale = 1.0 / factors;
  m.user_factors.resize(train.num_users(), cols);
  m.item_factors.resize(train.num_items(), cols);
  for (Eigen::Index r = 0; r < m.user_factors.rows(); ++r)
    for (int c = 0; c < cols; ++c) m.user_factors(r, c) = unit(rng) * scale;
  for (Eigen::Index r = 0; r < m.item_factors.rows(); ++r)
    for (int c = 0; c < cols; ++c) m.item_factors(r, c) = unit(rng) * scale;
  if (item_bias) {
    m.user_factors.col(cols - 1).setOnes();
    m.item_factors.col(cols - 1).setZero();
  }
}

std::vector<std::pair<UserIndex, ItemIndex>> positive_pairs(const InteractionDataset& train) {
  std::vector<std::pair<UserIndex, ItemIndex>> pairs;
  pairs.reserve(static_cast<std::size_t>(train.num_interactions()));
  for (UserIndex u = 0; u < train.num_users(); ++u)
    for (ItemIndex i : train.profile(u)) pairs.emplace_back(u, i);
  return pairs;
}

void check_sgd_params(int factors, int iterations, double lr, double reg) {
  if (factors < 1 || iterations < 1) throw ConfigError("factors and iterations must be >= 1");
  if (!(lr > 0)) throw ConfigError("learning_rate must be > 0");
  if (!(reg >= 0)) throw ConfigError("regularization must be >= 0");
}

}  // namespace

ModelParams make_params(ModelKind kind, const ParamMap& overrides) {
  switch (kind) {
    case ModelKind::bpr:
      return apply_overrides(BprParams{}, overrides, [](BprParams& p, const std::string& k, double v) {
        if (k == "factors") p.factors = as_count(k, v);
        else if (k == "iterations") p.iterations = as_count(k, v);
        else if (k == "learning_rate") p.learning_rate = v;
        else if (k == "regularization") p.regularization = v;
        else if (k == "item_bias") p.item_bias = v != 0.0;
        else return false;
        return true;
      });
    case ModelKind::warp:
      return apply_overrides(WarpParams{}, overrides, [](WarpParams& p, const std::string& k, double v) {
        if (k == "factors") p.factors = as_count(k, v);
        else if (k == "iterations") p.iterations = as_count(k, v);
        else if (k == "learning_rate") p.learning_rate = v;
        else if (k == "regularization") p.regularization = v;
        else if (k == "max_sampled") p.max_sampled = as_count(k, v);
        else if (k == "margin") p.margin = v;
        else if (k == "item_bias") p.item_bias = v != 0.0;
        else return false;
        return true;
      });
    case ModelKind::wrmf:
      return apply_overrides(WrmfParams{}, overrides, [](WrmfParams& p, const std::string& k, double v) {
        if (k == "factors") p.factors = as_count(k, v);
        else if (k == "iterations") p.iterations = as_count(k, v);
        else if (k == "regularization") p.regularization = v;
        else if (k == "alpha") p.alpha = v;
        else return false;
        return true;
      });
  }
  throw ConfigError("unknown model kind");
}

ParamMap params_to_map(const ModelParams& params) {
  return std::visit(
      [](const auto& p) -> ParamMap {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, BprParams>) {
          return {{"factors", p.factors}, {"iterations", p.iterations},
                  {"learning_rate", p.learning_rate}, {"regularization", p.regularization},
                  {"item_bias", p.item_bias ? 1.0 : 0.0}};
        } else if constexpr (std::is_same_v<P, WarpParams>) {
          return {{"factors", p.factors}, {"iterations", p.iterations},
                  {"learning_rate", p.learning_rate}, {"regularization", p.regularization},
                  {"max_sampled", p.max_sampled}, {"margin", p.margin},
                  {"item_bias", p.item_bias ? 1.0 : 0.0}};
        } else {
          return {{"factors", p.factors}, {"iterations", p.iterations},
                  {"regularization", p.regularization}, {"alpha", p.alpha}};
        }
      },
      params);
}

double FactorModel::score(UserIndex u, ItemIndex i) const {
  return user_factors.row(u).dot(item_factors.row(i));
}

Eigen::VectorXd FactorModel::score_items(UserIndex u) const {
  return item_factors * user_factors.row(u).transpose();
}

bool FactorModel::all_finite() const {
  return user_factors.allFinite() && item_factors.allFinite();
}

FactorModel train_bpr(const InteractionDataset& train, const BprParams& hp, std::uint64_t seed) {
  check_sgd_params(hp.factors, hp.iterations, hp.learning_rate, hp.regularization);
  std::mt19937_64 rng(seed);
  FactorModel m;
  m.name = "BPR";
  m.params = hp;
  init_factors(m, train, hp.factors, hp.item_bias, rng);
  const auto pairs = positive_pairs(train);
  if (pairs.empty()) throw DataError("BPR: no training interactions");
  const Eigen::Index free_cols = hp.factors;
  std::uniform_int_distribution<std::size_t> pick_pair(0, pairs.size() - 1);
  Eigen::RowVectorXd wu, wi, wj;

  for (int it = 0; it < hp.iterations; ++it) {
    double loss = 0.0;
    std::size_t sampled = 0;
    for (std::size_t s = 0; s < pairs.size(); ++s) {
      const auto [u, i] = pairs[pick_pair(rng)];
      const auto j = sample_negative(train, u, rng);
      if (!j) continue;
      wu = m.user_factors.row(u);
      wi = m.item_factors.row(i);
      wj = m.item_factors.row(*j);
      const double x = wu.dot(wi - wj);
      // d/dx of log sigmoid(x) is sigmoid(-x).
      const double z = 1.0 / (1.0 + std::exp(x));
      loss += x > 0 ? std::log1p(std::exp(-x)) : -x + std::log1p(std::exp(x));
      ++sampled;
      m.user_factors.row(u).head(free_cols) +=
          hp.learning_rate * (z * (wi - wj) - hp.regularization * wu).head(free_cols);
      m.item_factors.row(i) += hp.learning_rate * (z * wu - hp.regularization * wi);
      m.item_factors.row(*j) += hp.learning_rate * (-z * wu - hp.regularization * wj);
    }
    const double mean = sampled ? loss / static_cast<double>(sampled) : 0.0;
    check_finite(m, mean, it);
    m.loss_history.push_back(mean);
  }
  return m;
}

std::int64_t warp_rank_estimate(std::int64_t num_items, int samples_drawn) {
  if (samples_drawn < 1) throw ConfigError("samples_drawn must be >= 1");
  return (num_items - 1) / samples_drawn;
}

double warp_loss_weight(std::int64_t rank) {
  double phi = 0.0;
  for (std::int64_t j = 1; j <= rank; ++j) phi += 1.0 / static_cast<double>(j);
  return phi;
}

namespace {

// AdaGrad squared-gradient sums, one per factor entry, started at 1 so the
// first steps are at most the base learning rate.
struct WarpAccumulators {
  FactorMatrix user;
  FactorMatrix item;

  explicit WarpAccumulators(const FactorModel& m)
      : user(FactorMatrix::Ones(m.user_factors.rows(), m.user_factors.cols())),
        item(FactorMatrix::Ones(m.item_factors.rows(), m.item_factors.cols())) {}
};

void adagrad(Eigen::Ref<Eigen::RowVectorXd> param, Eigen::Ref<Eigen::RowVectorXd> acc,
             const Eigen::RowVectorXd& grad, double rate) {
  acc.array() += grad.array().square();
  param.array() -= rate * grad.array() / acc.array().sqrt();
}

// Returns the weighted hinge loss of the applied update, or nullopt when the
// budget ran out without a violator.
std::optional<double> warp_step(FactorModel& m, WarpAccumulators& acc,
                                const InteractionDataset& train, UserIndex u, ItemIndex pos,
                                const WarpParams& hp, std::mt19937_64& rng) {
  const double positive = m.score(u, pos);
  for (int n = 1; n <= hp.max_sampled; ++n) {
    const auto j = sample_negative(train, u, rng);
    if (!j) return std::nullopt;
    const double negative = m.score(u, *j);
    if (negative <= positive - hp.margin) continue;
    const double weight = warp_loss_weight(warp_rank_estimate(train.num_items(), n));
    const Eigen::RowVectorXd wu = m.user_factors.row(u);
    const Eigen::RowVectorXd wi = m.item_factors.row(pos);
    const Eigen::RowVectorXd wj = m.item_factors.row(*j);
    // Gradients of weight * (margin - wu.wi + wu.wj) + reg/2 |.|^2.
    const Eigen::Index free_cols = hp.factors;
    const Eigen::RowVectorXd gu = (weight * (wj - wi) + hp.regularization * wu).head(free_cols);
    adagrad(m.user_factors.row(u).head(free_cols), acc.user.row(u).head(free_cols), gu,
            hp.learning_rate);
    adagrad(m.item_factors.row(pos), acc.item.row(pos), -weight * wu + hp.regularization * wi,
            hp.learning_rate);
    adagrad(m.item_factors.row(*j), acc.item.row(*j), weight * wu + hp.regularization * wj,
            hp.learning_rate);
    return weight * (hp.margin - positive + negative);
  }
  return std::nullopt;
}

}  // namespace

bool warp_update(FactorModel& model, const InteractionDataset& train, UserIndex u,
                 ItemIndex pos, const WarpParams& hp, std::mt19937_64& rng) {
  WarpAccumulators acc(model);
  return warp_step(model, acc, train, u, pos, hp, rng).has_value();
}

FactorModel train_warp(const InteractionDataset& train, const WarpParams& hp, std::uint64_t seed) {
  check_sgd_params(hp.factors, hp.iterations, hp.learning_rate, hp.regularization);
  if (hp.max_sampled < 1) throw ConfigError("max_sampled must be >= 1");
  std::mt19937_64 rng(seed);
  FactorModel m;
  m.name = "WARP";
  m.params = hp;
  init_factors(m, train, hp.factors, hp.item_bias, rng);
  auto pairs = positive_pairs(train);
  if (pairs.empty()) throw DataError("WARP: no training interactions");
  WarpAccumulators acc(m);

  for (int it = 0; it < hp.iterations; ++it) {
    std::shuffle(pairs.begin(), pairs.end(), rng);
    double loss = 0.0;
    for (const auto& [u, i] : pairs) {
      if (auto l = warp_step(m, acc, train, u, i, hp, rng)) loss += *l;
    }
    const double mean = loss / static_cast<double>(pairs.size());
    check_finite(m, mean, it);
    m.loss_history.push_back(mean);
  }
  return m;
}

namespace {

// Solves every row of `target` against the fixed `other` factors.
void als_sweep(FactorMatrix& target, const FactorMatrix& other,
               const std::vector<std::vector<std::int32_t>>& postings, const WrmfParams& hp,
               unsigned threads) {
  const Eigen::Index d = other.cols();
  const Eigen::MatrixXd gram = other.transpose() * other;
  parallel_for(target.rows(), threads, [&](std::int64_t r) {
    Eigen::MatrixXd a = gram;
    a.diagonal().array() += hp.regularization;
    Eigen::VectorXd b = Eigen::VectorXd::Zero(d);
    for (auto j : postings[r]) {
      const auto y = other.row(j).transpose();
      a.selfadjointView<Eigen::Lower>().rankUpdate(y, hp.alpha);
      b += (1.0 + hp.alpha) * y;
    }
    // LDLT reads the lower triangle only.
    Eigen::LDLT<Eigen::MatrixXd, Eigen::Lower> ldlt(a);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
      throw NumericError("WRMF: singular normal equations (regularization=" +
                         std::to_string(hp.regularization) + ")");
    }
    target.row(r) = ldlt.solve(b).transpose();
  });
}

}  // namespace

FactorModel train_wrmf(const InteractionDataset& train, const WrmfParams& hp, std::uint64_t seed,
                       unsigned threads) {
  if (hp.factors < 1 || hp.iterations < 1) throw ConfigError("factors and iterations must be >= 1");
  if (!(hp.alpha > 0)) throw ConfigError("WRMF: confidence weight alpha must be > 0");
  if (!(hp.regularization > 0)) {
    throw NumericError("WRMF: singular normal equations, regularization must be > 0 (got " +
                       std::to_string(hp.regularization) + ")");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 0.01);
  FactorModel m;
  m.name = "WRMF";
  m.params = hp;
  m.user_factors = FactorMatrix::Zero(train.num_users(), hp.factors);
  m.item_factors.resize(train.num_items(), hp.factors);
  for (Eigen::Index r = 0; r < m.item_factors.rows(); ++r)
    for (int c = 0; c < hp.factors; ++c) m.item_factors(r, c) = normal(rng);

  std::vector<std::vector<std::int32_t>> by_user(train.num_users());
  std::vector<std::vector<std::int32_t>> by_item(train.num_items());
  for (UserIndex u = 0; u < train.num_users(); ++u) {
    for (ItemIndex i : train.profile(u)) {
      by_user[u].push_back(i);
      by_item[i].push_back(u);
    }
  }
  for (int it = 0; it < hp.iterations; ++it) {
    als_sweep(m.user_factors, m.item_factors, by_user, hp, threads);
    als_sweep(m.item_factors, m.user_factors, by_item, hp, threads);
    const double objective = wrmf_objective(m, train, hp);
    check_finite(m, objective, it);
    m.loss_history.push_back(objective);
  }
  return m;
}

double wrmf_objective(const FactorModel& model, const InteractionDataset& train,
                      const WrmfParams& hp) {
  const auto& x = model.user_factors;
  const auto& y = model.item_factors;
  // Unobserved cells have confidence 1 and target 0; sum s^2 over every cell
  // via the Gram matrices, then correct the observed ones.
  const Eigen::MatrixXd gx = x.transpose() * x;
  const Eigen::MatrixXd gy = y.transpose() * y;
  double total = gx.cwiseProduct(gy).sum();
  for (UserIndex u = 0; u < train.num_users(); ++u) {
    for (ItemIndex i : train.profile(u)) {
      const double s = model.score(u, i);
      total += (1.0 + hp.alpha) * (1.0 - s) * (1.0 - s) - s * s;
    }
  }
  total += hp.regularization * (x.squaredNorm() + y.squaredNorm());
  return total;
}

FactorModel train_model(const InteractionDataset& train, const ModelParams& hp,
                        std::uint64_t seed, unsigned threads) {
  return std::visit(
      [&](const auto& p) -> FactorModel {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, BprParams>) return train_bpr(train, p, seed);
        else if constexpr (std::is_same_v<P, WarpParams>) return train_warp(train, p, seed);
        else return train_wrmf(train, p, seed, threads);
      },
      hp);
}

RankingList rank_topk(const FactorModel& model, const InteractionDataset& fit, int k,
                      unsigned threads) {
  if (model.user_factors.rows() != fit.num_users() ||
      model.item_factors.rows() != fit.num_items()) {
    throw DataError(model.name + ": factor shapes do not match the dataset");
  }
  if (k < 1 || k > max_feasible_k(fit)) {
    throw ConfigError(model.name + ": k=" + std::to_string(k) +
                      " is too large after masking (max " + std::to_string(max_feasible_k(fit)) +
                      ")");
  }
  RankingList list;
  list.model_name = model.name;
  list.k = k;
  list.rows.resize(fit.num_users());
  parallel_for(fit.num_users(), threads, [&](std::int64_t u) {
    const Eigen::VectorXd scores = model.score_items(static_cast<UserIndex>(u));
    list.rows[u] = top_k(std::span<const double>(scores.data(), scores.size()),
                         fit.profile(static_cast<UserIndex>(u)), k);
  });
  return list;
}

namespace {

constexpr char kMagic[8] = {'H', 'E', 'N', 'S', 'F', 'M', '0', '1'};

template <typename T>
void put(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T get(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!in) throw DataError("truncated factor model file");
  return v;
}

void put_matrix(std::ostream& out, const FactorMatrix& m) {
  put<std::int64_t>(out, m.rows());
  put<std::int64_t>(out, m.cols());
  out.write(reinterpret_cast<const char*>(m.data()),
            static_cast<std::streamsize>(sizeof(double) * m.size()));
}

FactorMatrix get_matrix(std::istream& in) {
  const auto rows = get<std::int64_t>(in);
  const auto cols = get<std::int64_t>(in);
  if (rows < 0 || cols < 0) throw DataError("corrupt factor model file");
  FactorMatrix m(rows, cols);
  in.read(reinterpret_cast<char*>(m.data()), static_cast<std::streamsize>(sizeof(double) * m.size()));
  if (!in) throw DataError("truncated factor model file");
  return m;
}

ModelKind kind_of(const ModelParams& p) {
  return static_cast<ModelKind>(p.index());
}

}  // namespace

void write_factor_model(const std::filesystem::path& path, const FactorModel& model) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  const json meta = {{"name", model.name},
                     {"kind", model_kind_name(kind_of(model.params))},
                     {"params", params_to_map(model.params)},
                     {"loss_history", model.loss_history}};
  const std::string text = meta.dump();
  out.write(kMagic, sizeof kMagic);
  put<std::uint64_t>(out, text.size());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  put_matrix(out, model.user_factors);
  put_matrix(out, model.item_factors);
  if (!out) throw DataError("write failed for " + path.string());
}

FactorModel read_factor_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open factor model " + path.string());
  char magic[sizeof kMagic];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kMagic, sizeof kMagic) != 0) {
    throw DataError(path.string() + " is not a factor model file");
  }
  const auto len = get<std::uint64_t>(in);
  std::string text(len, '\0');
  in.read(text.data(), static_cast<std::streamsize>(len));
  if (!in) throw DataError("truncated factor model file");
  FactorModel m;
  try {
    const auto meta = json::parse(text);
    m.name = meta.at("name").get<std::string>();
    m.params = make_params(parse_model_kind(meta.at("kind").get<std::string>()),
                           meta.at("params").get<ParamMap>());
    m.loss_history = meta.at("loss_history").get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw DataError(path.string() + ": bad metadata: " + e.what());
  }
  m.user_factors = get_matrix(in);
  m.item_factors = get_matrix(in);
  return m;
}

}  // namespace hyperens
