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

#include <string>
#include <vector>

#include <Eigen/Core>

#include "hyperens/hypergraph.hpp"
#include "hyperens/ranking_list.hpp"

namespace hyperens {

struct RankerConfig {
  /// Regularizer on the distance to the query; larger keeps scores near y.
  double vartheta = 0.5;
  /// Stop when the L-infinity change between iterates drops below this.
  double tol = 1e-8;
  int max_iter = 1000;

  /// Propagation factor 1 / (1 + vartheta).
  double alpha() const { return 1.0 / (1.0 + vartheta); }
  void validate() const;
};

/// Normalized hypergraph affinity
///   A = Dn^-1/2 H W De^-1 H^T Dn^-1/2,
/// kept in factored form A = B B^T with B = Dn^-1/2 H (W De^-1)^1/2 so a
/// product costs two passes over the incidence entries. Nodes of degree 0
/// get a zero row and column.
class AffinityOperator {
 public:
  explicit AffinityOperator(const Hypergraph& hg);

  Eigen::Index size() const { return factor_.rows(); }
  /// out = A * f.
  void apply(const Eigen::VectorXd& f, Eigen::VectorXd& out) const;
  Eigen::VectorXd apply(const Eigen::VectorXd& f) const;

  /// Sparse |N| x |N| A.
  SparseMatrix matrix() const;
  /// Dense A; refuses graphs with more than `max_nodes` nodes.
  Eigen::MatrixXd to_dense(Eigen::Index max_nodes = 4096) const;

  const SparseMatrix& factor() const { return factor_; }

 private:
  SparseMatrix factor_;
};

AffinityOperator compute_affinity(const Hypergraph& hg);

struct RankingSolution {
  Eigen::VectorXd scores;
  int iterations = 0;
  /// L-infinity change at every iteration.
  std::vector<double> deltas;
};

/// f* = vartheta/(1+vartheta) (I - A/(1+vartheta))^-1 y by the fixed point
/// f <- alpha A f + (1 - alpha) y from f = (1 - alpha) y. Throws
/// ConvergenceError when max_iter is reached first.
RankingSolution solve_ranking(const AffinityOperator& a, const Eigen::VectorXd& y,
                              const RankerConfig& cfg);

/// Objective whose minimizer is solve_ranking's fixed point:
///   Q(f) = 1/2 f^T (I - A) f + vartheta/2 |f - y|^2.
double ranking_loss(const AffinityOperator& a, const Eigen::VectorXd& f,
                    const Eigen::VectorXd& y, double vartheta);

/// Queries user u (y = e_u), keeps the item entries of f*, masks u's fit
/// profile and returns the top k.
std::vector<RankedItem> recommend(const Hypergraph& hg, const AffinityOperator& a,
                                  const InteractionDataset& fit, UserIndex u, int k,
                                  const RankerConfig& cfg);

/// recommend() for every user, in parallel across users.
RankingList recommend_all(const Hypergraph& hg, const AffinityOperator& a,
                          const InteractionDataset& fit, int k, const RankerConfig& cfg,
                          const std::string& model_name, unsigned threads = 1);

}  // namespace hyperens
