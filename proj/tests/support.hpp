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


// Helpers shared by the unit and acceptance tests: small dataset builders,
// random hypergraphs and dense reference evaluations.

#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hyperens/dataset.hpp"
#include "hyperens/hypergraph.hpp"

namespace hyperens::testing {

inline std::filesystem::path data_dir() { return HYPERENS_TEST_DATA_DIR; }

/// Users "u0".."u{n-1}", items "i0".."i{m-1}" in index order.
inline InteractionDataset make_dataset(const std::vector<std::vector<ItemIndex>>& profiles,
                                       std::int32_t num_items) {
  IdMap users;
  IdMap items;
  for (std::size_t u = 0; u < profiles.size(); ++u) users.intern("u" + std::to_string(u));
  for (std::int32_t i = 0; i < num_items; ++i) items.intern("i" + std::to_string(i));
  return InteractionDataset(std::move(users), std::move(items), profiles);
}

/// Each user draws `per_user` distinct items with probability proportional to
/// exp(sharpness * <p_u, q_i>) for Gaussian rank-`rank` factors.
inline InteractionDataset planted_dataset(int num_users, int num_items, int per_user, int rank,
                                          double sharpness, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd p(num_users, rank);
  Eigen::MatrixXd q(num_items, rank);
  for (int u = 0; u < num_users; ++u)
    for (int r = 0; r < rank; ++r) p(u, r) = gauss(rng);
  for (int i = 0; i < num_items; ++i)
    for (int r = 0; r < rank; ++r) q(i, r) = gauss(rng);
  std::vector<std::vector<ItemIndex>> profiles(num_users);
  for (int u = 0; u < num_users; ++u) {
    std::vector<double> w(num_items);
    for (int i = 0; i < num_items; ++i) w[i] = std::exp(sharpness * p.row(u).dot(q.row(i)));
    std::vector<char> taken(num_items, 0);
    while (static_cast<int>(profiles[u].size()) < per_user) {
      std::discrete_distribution<int> pick(w.begin(), w.end());
      const int i = pick(rng);
      if (taken[i]) continue;
      taken[i] = 1;
      w[i] = 0.0;
      profiles[u].push_back(i);
    }
    std::sort(profiles[u].begin(), profiles[u].end());
  }
  return make_dataset(profiles, num_items);
}

/// Random hypergraph on at most `max_nodes` nodes with random members and
/// positive weights; some nodes may stay isolated.
inline Hypergraph random_hypergraph(std::mt19937_64& rng, int max_nodes = 50) {
  std::uniform_int_distribution<int> users_dist(2, max_nodes / 2);
  const int nu = users_dist(rng);
  std::uniform_int_distribution<int> items_dist(2, max_nodes - nu);
  const int ni = items_dist(rng);
  const int nn = nu + ni;
  std::uniform_int_distribution<int> edges_dist(1, 2 * nn);
  std::uniform_int_distribution<int> size_dist(2, std::min(8, nn));
  std::uniform_int_distribution<int> node_dist(0, nn - 1);
  std::uniform_real_distribution<double> weight_dist(0.05, 2.0);
  std::vector<Hyperedge> edges(edges_dist(rng));
  for (auto& e : edges) {
    const int size = size_dist(rng);
    while (static_cast<int>(e.members.size()) < size) {
      const int n = node_dist(rng);
      if (std::find(e.members.begin(), e.members.end(), n) == e.members.end()) e.members.push_back(n);
    }
    std::sort(e.members.begin(), e.members.end());
    e.weight = weight_dist(rng);
  }
  return Hypergraph(nu, ni, std::move(edges));
}

/// Dense incidence matrix built from the edge lists.
inline Eigen::MatrixXd dense_incidence(const Hypergraph& hg) {
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(hg.num_nodes(), hg.num_edges());
  for (int e = 0; e < hg.num_edges(); ++e)
    for (NodeIndex n : hg.edges()[e].members) h(n, e) = 1.0;
  return h;
}

/// Dn^-1/2 H W De^-1 H^T Dn^-1/2 as a plain dense triple product, with
/// degrees recomputed from the edge lists and 0 for isolated nodes.
inline Eigen::MatrixXd dense_affinity(const Hypergraph& hg) {
  const Eigen::MatrixXd h = dense_incidence(hg);
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(hg.num_edges(), hg.num_edges());
  Eigen::MatrixXd de_inv = Eigen::MatrixXd::Zero(hg.num_edges(), hg.num_edges());
  for (int e = 0; e < hg.num_edges(); ++e) {
    w(e, e) = hg.edges()[e].weight;
    de_inv(e, e) = 1.0 / static_cast<double>(hg.edges()[e].members.size());
  }
  const Eigen::VectorXd dn = h * w.diagonal();
  Eigen::MatrixXd dn_inv_sqrt = Eigen::MatrixXd::Zero(dn.size(), dn.size());
  for (Eigen::Index n = 0; n < dn.size(); ++n) {
    if (dn[n] > 0.0) dn_inv_sqrt(n, n) = 1.0 / std::sqrt(dn[n]);
  }
  return dn_inv_sqrt * h * w * de_inv * h.transpose() * dn_inv_sqrt;
}

/// vartheta/(1+vartheta) (I - A/(1+vartheta))^-1 y by a dense LU solve.
inline Eigen::VectorXd dense_solution(const Eigen::MatrixXd& a, const Eigen::VectorXd& y,
                                      double vartheta) {
  const Eigen::MatrixXd m =
      Eigen::MatrixXd::Identity(a.rows(), a.cols()) - a / (1.0 + vartheta);
  return vartheta / (1.0 + vartheta) * m.partialPivLu().solve(y);
}

/// Largest |eigenvalue| of a symmetric matrix by power iteration.
inline double power_iteration(const Eigen::MatrixXd& a, int iterations = 2000) {
  Eigen::VectorXd v = Eigen::VectorXd::Ones(a.rows()).normalized();
  double lambda = 0.0;
  for (int t = 0; t < iterations; ++t) {
    const Eigen::VectorXd next = a * v;
    const double norm = next.norm();
    if (norm == 0.0) return 0.0;
    lambda = norm;
    v = next / norm;
  }
  return lambda;
}

/// Fresh scratch directory under the build tree.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::path(HYPERENS_TEST_SCRATCH_DIR) / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace hyperens::testing
