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

#include "hyperens/ranker.hpp"

#include <cmath>
#include <sstream>

#include "hyperens/error.hpp"
#include "hyperens/parallel.hpp"

namespace hyperens {

void RankerConfig::validate() const {
  if (!(vartheta > 0.0) || !std::isfinite(vartheta)) throw ConfigError("vartheta must be > 0");
  if (!(tol > 0.0)) throw ConfigError("solver tolerance must be > 0");
  if (max_iter < 1) throw ConfigError("max_iter must be >= 1");
}

AffinityOperator::AffinityOperator(const Hypergraph& hg) {
  const auto& degrees = hg.node_degrees();
  Eigen::VectorXd node_scale(degrees.size());
  for (Eigen::Index n = 0; n < degrees.size(); ++n) {
    node_scale[n] = degrees[n] > 0.0 ? 1.0 / std::sqrt(degrees[n]) : 0.0;
  }
  Eigen::VectorXd edge_scale(hg.num_edges());
  for (std::int32_t e = 0; e < hg.num_edges(); ++e) {
    const double delta = hg.edge_degrees()[e];
    if (!(delta > 0.0)) throw DataError("affinity: edge " + std::to_string(e) + " is empty");
    edge_scale[e] = std::sqrt(hg.weights()[e] / delta);
  }
  factor_ = node_scale.asDiagonal() * hg.incidence() * edge_scale.asDiagonal();
  factor_.makeCompressed();
}

void AffinityOperator::apply(const Eigen::VectorXd& f, Eigen::VectorXd& out) const {
  const Eigen::VectorXd edge_values = factor_.transpose() * f;
  out.noalias() = factor_ * edge_values;
}

Eigen::VectorXd AffinityOperator::apply(const Eigen::VectorXd& f) const {
  Eigen::VectorXd out(size());
  apply(f, out);
  return out;
}

SparseMatrix AffinityOperator::matrix() const {
  SparseMatrix a = factor_ * SparseMatrix(factor_.transpose());
  a.makeCompressed();
  return a;
}

Eigen::MatrixXd AffinityOperator::to_dense(Eigen::Index max_nodes) const {
  if (size() > max_nodes) {
    throw ConfigError("refusing to densify a " + std::to_string(size()) + "-node affinity");
  }
  const Eigen::MatrixXd b(factor_);
  return b * b.transpose();
}

AffinityOperator compute_affinity(const Hypergraph& hg) { return AffinityOperator(hg); }

RankingSolution solve_ranking(const AffinityOperator& a, const Eigen::VectorXd& y,
                              const RankerConfig& cfg) {
  cfg.validate();
  if (y.size() != a.size()) throw ConfigError("query vector length does not match |N|");
  if (!y.allFinite()) throw ConfigError("query vector is not finite");
  const double alpha = cfg.alpha();
  const Eigen::VectorXd restart = (1.0 - alpha) * y;

  RankingSolution sol;
  Eigen::VectorXd f = restart;
  Eigen::VectorXd next(f.size());
  double delta = 0.0;
  for (int it = 1; it <= cfg.max_iter; ++it) {
    a.apply(f, next);
    next = alpha * next + restart;
    delta = (next - f).lpNorm<Eigen::Infinity>();
    f.swap(next);
    sol.deltas.push_back(delta);
    if (delta < cfg.tol) {
      sol.iterations = it;
      sol.scores = std::move(f);
      return sol;
    }
  }
  std::ostringstream os;
  os << "ranking solver did not reach tol=" << cfg.tol << " in " << cfg.max_iter
     << " iterations (last delta " << delta << ", vartheta " << cfg.vartheta << ")";
  throw ConvergenceError(os.str(), delta);
}

double ranking_loss(const AffinityOperator& a, const Eigen::VectorXd& f, const Eigen::VectorXd& y,
                    double vartheta) {
  const Eigen::VectorXd af = a.apply(f);
  const double smoothness = f.squaredNorm() - f.dot(af);
  return 0.5 * smoothness + 0.5 * vartheta * (f - y).squaredNorm();
}

std::vector<RankedItem> recommend(const Hypergraph& hg, const AffinityOperator& a,
                                  const InteractionDataset& fit, UserIndex u, int k,
                                  const RankerConfig& cfg) {
  if (u < 0 || u >= hg.num_users()) throw ConfigError("user index out of range");
  Eigen::VectorXd y = Eigen::VectorXd::Zero(hg.num_nodes());
  y[hg.user_node(u)] = 1.0;
  const auto sol = solve_ranking(a, y, cfg);
  const std::span<const double> item_scores(sol.scores.data() + hg.num_users(), hg.num_items());
  return top_k(item_scores, fit.profile(u), k);
}

RankingList recommend_all(const Hypergraph& hg, const AffinityOperator& a,
                          const InteractionDataset& fit, int k, const RankerConfig& cfg,
                          const std::string& model_name, unsigned threads) {
  if (fit.num_users() != hg.num_users() || fit.num_items() != hg.num_items()) {
    throw DataError("hypergraph and dataset disagree on |U| or |I|");
  }
  if (k < 1 || k > max_feasible_k(fit)) {
    throw ConfigError("k=" + std::to_string(k) + " is too large after masking");
  }
  RankingList list;
  list.model_name = model_name;
  list.k = k;
  list.rows.resize(hg.num_users());
  parallel_for(hg.num_users(), threads, [&](std::int64_t u) {
    list.rows[u] = recommend(hg, a, fit, static_cast<UserIndex>(u), k, cfg);
  });
  return list;
}

}  // namespace hyperens
