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

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "hyperens/dataset.hpp"
#include "hyperens/ranking_list.hpp"
#include "hyperens/weight_policy.hpp"

namespace hyperens {

using NodeIndex = std::int32_t;

enum class EdgeKind { user_item, user_user, model };

struct Hyperedge {
  /// Sorted node indices. Users are 0..|U|-1, items follow at |U| + i.
  std::vector<NodeIndex> members;
  EdgeKind kind = EdgeKind::user_item;
  /// Source recommender for EdgeKind::model.
  std::string model;
  /// User whose query built the edge.
  UserIndex owner = -1;
  double weight = 1.0;

  friend bool operator==(const Hyperedge&, const Hyperedge&) = default;
};

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Users and items joined by weighted hyperedges, with the incidence matrix
/// H (|N| x |E|), node degrees d(n) = sum of incident edge weights and edge
/// degrees delta(e) = |e|.
class Hypergraph {
 public:
  Hypergraph(std::int32_t num_users, std::int32_t num_items, std::vector<Hyperedge> edges);

  std::int32_t num_users() const { return num_users_; }
  std::int32_t num_items() const { return num_items_; }
  std::int32_t num_nodes() const { return num_users_ + num_items_; }
  std::int32_t num_edges() const { return static_cast<std::int32_t>(edges_.size()); }

  NodeIndex user_node(UserIndex u) const { return u; }
  NodeIndex item_node(ItemIndex i) const { return num_users_ + i; }

  const std::vector<Hyperedge>& edges() const { return edges_; }
  const SparseMatrix& incidence() const { return incidence_; }
  const Eigen::VectorXd& weights() const { return weights_; }
  const Eigen::VectorXd& node_degrees() const { return node_degrees_; }
  const Eigen::VectorXd& edge_degrees() const { return edge_degrees_; }

  std::int32_t count(EdgeKind kind) const;
  /// Nodes that belong to no hyperedge.
  std::vector<NodeIndex> isolated_nodes() const;

  friend bool operator==(const Hypergraph& a, const Hypergraph& b) {
    return a.num_users_ == b.num_users_ && a.num_items_ == b.num_items_ && a.edges_ == b.edges_;
  }

 private:
  std::int32_t num_users_;
  std::int32_t num_items_;
  std::vector<Hyperedge> edges_;
  SparseMatrix incidence_;
  Eigen::VectorXd weights_;
  Eigen::VectorXd node_degrees_;
  Eigen::VectorXd edge_degrees_;
};

/// One edge per user: the user and every item of its profile.
std::vector<Hyperedge> build_ui_edges(const InteractionDataset& fit);

/// One edge per user: the user and its k_nn most cosine-similar users over
/// binary profiles. Empty profiles have similarity 0; ties go to the lower
/// user index; a user is never its own neighbour.
std::vector<Hyperedge> build_uu_edges(const InteractionDataset& fit, int k_nn,
                                      unsigned threads = 1);

/// Neighbour lists behind build_uu_edges, exposed for inspection.
std::vector<std::vector<UserIndex>> nearest_users(const InteractionDataset& fit, int k_nn,
                                                  unsigned threads = 1);

/// One edge per (model, user): the user and its top-k list.
std::vector<Hyperedge> build_model_edges(std::span<const RankingList> lists,
                                         std::int32_t num_users);

/// Weights every edge by `policy` and builds the hypergraph. Checks the
/// per-family counts (|U| user-item, |U| user-user, |U| per model).
Hypergraph assemble(std::int32_t num_users, std::int32_t num_items,
                    std::vector<Hyperedge> ui, std::vector<Hyperedge> uu,
                    std::vector<Hyperedge> model_edges, const WeightPolicy& policy);

const char* edge_kind_name(EdgeKind kind);

/// Text sparse-triplet form: a header line, one `node edge` line per
/// incidence entry, then one `weight owner kind` line per edge.
void write_hypergraph(std::ostream& out, const Hypergraph& hg);
Hypergraph read_hypergraph(std::istream& in);
void write_hypergraph(const std::filesystem::path& path, const Hypergraph& hg);
Hypergraph read_hypergraph(const std::filesystem::path& path);

/// Per-edge weight audit: edge index, kind, model, owning user, degree, weight.
void write_edge_weights(const std::filesystem::path& path, const Hypergraph& hg,
                        const InteractionDataset& ids);

}  // namespace hyperens
