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

#include "hyperens/hypergraph.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "hyperens/error.hpp"
#include "hyperens/parallel.hpp"
#include "text_io.hpp"

namespace hyperens {

Hypergraph::Hypergraph(std::int32_t num_users, std::int32_t num_items,
                       std::vector<Hyperedge> edges)
    : num_users_(num_users), num_items_(num_items), edges_(std::move(edges)) {
  if (num_users < 0 || num_items < 0) throw DataError("hypergraph: negative node count");
  const auto n = num_nodes();
  const auto m = num_edges();
  std::vector<Eigen::Triplet<double>> triplets;
  weights_.resize(m);
  edge_degrees_.resize(m);
  for (std::int32_t e = 0; e < m; ++e) {
    auto& edge = edges_[e];
    std::sort(edge.members.begin(), edge.members.end());
    if (edge.members.size() < 2) {
      throw DataError("hypergraph: edge " + std::to_string(e) + " has fewer than 2 members");
    }
    if (std::adjacent_find(edge.members.begin(), edge.members.end()) != edge.members.end()) {
      throw DataError("hypergraph: edge " + std::to_string(e) + " repeats a node");
    }
    if (edge.members.front() < 0 || edge.members.back() >= n) {
      throw DataError("hypergraph: edge " + std::to_string(e) + " has a node out of range");
    }
    if (!(edge.weight > 0.0)) {
      throw ConfigError("hypergraph: edge " + std::to_string(e) + " has non-positive weight");
    }
    for (NodeIndex v : edge.members) triplets.emplace_back(v, e, 1.0);
    weights_[e] = edge.weight;
    edge_degrees_[e] = static_cast<double>(edge.members.size());
  }
  incidence_.resize(n, m);
  incidence_.setFromTriplets(triplets.begin(), triplets.end());
  node_degrees_ = incidence_ * weights_;
}

std::int32_t Hypergraph::count(EdgeKind kind) const {
  return static_cast<std::int32_t>(std::count_if(
      edges_.begin(), edges_.end(), [kind](const Hyperedge& e) { return e.kind == kind; }));
}

std::vector<NodeIndex> Hypergraph::isolated_nodes() const {
  std::vector<char> seen(num_nodes(), 0);
  for (const auto& e : edges_)
    for (NodeIndex v : e.members) seen[v] = 1;
  std::vector<NodeIndex> out;
  for (NodeIndex v = 0; v < num_nodes(); ++v)
    if (!seen[v]) out.push_back(v);
  return out;
}

std::vector<Hyperedge> build_ui_edges(const InteractionDataset& fit) {
  std::vector<Hyperedge> edges;
  edges.reserve(fit.num_users());
  for (UserIndex u = 0; u < fit.num_users(); ++u) {
    const auto profile = fit.profile(u);
    if (profile.empty()) {
      throw DataError("user '" + fit.users().id(u) + "' has no training interactions");
    }
    Hyperedge e;
    e.kind = EdgeKind::user_item;
    e.owner = u;
    e.members.reserve(profile.size() + 1);
    e.members.push_back(u);
    for (ItemIndex i : profile) e.members.push_back(fit.num_users() + i);
    edges.push_back(std::move(e));
  }
  return edges;
}

std::vector<std::vector<UserIndex>> nearest_users(const InteractionDataset& fit, int k_nn,
                                                  unsigned threads) {
  const auto nu = fit.num_users();
  if (k_nn < 1 || k_nn >= nu) {
    throw ConfigError("k_nn=" + std::to_string(k_nn) + " must be in [1, " +
                      std::to_string(nu - 1) + "]");
  }
  std::vector<std::vector<UserIndex>> postings(fit.num_items());
  for (UserIndex u = 0; u < nu; ++u)
    for (ItemIndex i : fit.profile(u)) postings[i].push_back(u);

  std::vector<std::vector<UserIndex>> neighbours(nu);
  parallel_for(nu, threads, [&](std::int64_t uu) {
    const auto u = static_cast<UserIndex>(uu);
    std::vector<std::int64_t> overlap(nu, 0);
    for (ItemIndex i : fit.profile(u))
      for (UserIndex v : postings[i]) ++overlap[v];
    // cos(u,v)^2 = overlap^2 / (|u| |v|); compare v against w exactly as
    // overlap_v^2 * |w| vs overlap_w^2 * |v|. Empty profiles score 0.
    const auto better = [&](UserIndex a, UserIndex b) {
      const auto na = static_cast<std::int64_t>(fit.profile(a).size());
      const auto nb = static_cast<std::int64_t>(fit.profile(b).size());
      const std::int64_t lhs = na == 0 ? 0 : overlap[a] * overlap[a] * nb;
      const std::int64_t rhs = nb == 0 ? 0 : overlap[b] * overlap[b] * na;
      const bool a_zero = na == 0 || overlap[a] == 0;
      const bool b_zero = nb == 0 || overlap[b] == 0;
      if (a_zero || b_zero) {
        if (a_zero != b_zero) return b_zero;
        return a < b;
      }
      if (lhs != rhs) return lhs > rhs;
      return a < b;
    };
    std::vector<UserIndex> candidates;
    candidates.reserve(nu - 1);
    for (UserIndex v = 0; v < nu; ++v)
      if (v != u) candidates.push_back(v);
    std::partial_sort(candidates.begin(), candidates.begin() + k_nn, candidates.end(), better);
    candidates.resize(k_nn);
    neighbours[u] = std::move(candidates);
  });
  return neighbours;
}

std::vector<Hyperedge> build_uu_edges(const InteractionDataset& fit, int k_nn, unsigned threads) {
  const auto neighbours = nearest_users(fit, k_nn, threads);
  std::vector<Hyperedge> edges;
  edges.reserve(neighbours.size());
  for (UserIndex u = 0; u < fit.num_users(); ++u) {
    Hyperedge e;
    e.kind = EdgeKind::user_user;
    e.owner = u;
    e.members = neighbours[u];
    e.members.push_back(u);
    std::sort(e.members.begin(), e.members.end());
    edges.push_back(std::move(e));
  }
  return edges;
}

std::vector<Hyperedge> build_model_edges(std::span<const RankingList> lists,
                                         std::int32_t num_users) {
  std::set<std::string> names;
  std::vector<Hyperedge> edges;
  for (const auto& list : lists) {
    if (!names.insert(list.model_name).second) {
      throw DataError("duplicate model '" + list.model_name + "' in ensemble");
    }
    if (static_cast<std::int32_t>(list.rows.size()) != num_users) {
      throw DataError("model '" + list.model_name + "' ranks " + std::to_string(list.rows.size()) +
                      " users, expected " + std::to_string(num_users));
    }
    for (UserIndex u = 0; u < num_users; ++u) {
      Hyperedge e;
      e.kind = EdgeKind::model;
      e.model = list.model_name;
      e.owner = u;
      e.members.push_back(u);
      for (const auto& r : list.rows[u]) e.members.push_back(num_users + r.item);
      std::sort(e.members.begin(), e.members.end());
      edges.push_back(std::move(e));
    }
  }
  return edges;
}

Hypergraph assemble(std::int32_t num_users, std::int32_t num_items, std::vector<Hyperedge> ui,
                    std::vector<Hyperedge> uu, std::vector<Hyperedge> model_edges,
                    const WeightPolicy& policy) {
  policy.validate();
  if (static_cast<std::int32_t>(ui.size()) != num_users ||
      static_cast<std::int32_t>(uu.size()) != num_users ||
      model_edges.size() % static_cast<std::size_t>(std::max(num_users, 1)) != 0) {
    throw DataError("hyperedge counts do not match |U| per family");
  }
  std::vector<Hyperedge> edges;
  edges.reserve(ui.size() + uu.size() + model_edges.size());
  for (auto& e : ui) {
    e.weight = policy.w_ui;
    edges.push_back(std::move(e));
  }
  for (auto& e : uu) {
    e.weight = policy.w_uu;
    edges.push_back(std::move(e));
  }
  for (auto& e : model_edges) {
    e.weight = policy.model_weight(e.model);
    edges.push_back(std::move(e));
  }
  return Hypergraph(num_users, num_items, std::move(edges));
}

const char* edge_kind_name(EdgeKind kind) {
  switch (kind) {
    case EdgeKind::user_item: return "UI";
    case EdgeKind::user_user: return "UU";
    case EdgeKind::model: return "M";
  }
  return "?";
}

void write_hypergraph(std::ostream& out, const Hypergraph& hg) {
  const auto& h = hg.incidence();
  out << "hypergraph " << hg.num_users() << ' ' << hg.num_items() << ' ' << hg.num_edges() << ' '
      << h.nonZeros() << '\n';
  for (int e = 0; e < h.outerSize(); ++e)
    for (SparseMatrix::InnerIterator it(h, e); it; ++it) out << it.row() << ' ' << e << '\n';
  char buf[64];
  for (const auto& e : hg.edges()) {
    std::snprintf(buf, sizeof buf, "%.17g", e.weight);
    out << buf << ' ' << e.owner << ' ' << edge_kind_name(e.kind);
    if (e.kind == EdgeKind::model) out << ':' << e.model;
    out << '\n';
  }
}

Hypergraph read_hypergraph(std::istream& in) {
  std::string tag;
  std::int64_t nu = 0, ni = 0, ne = 0, nnz = 0;
  if (!(in >> tag >> nu >> ni >> ne >> nnz) || tag != "hypergraph" || nu < 0 || ni < 0 || ne < 0 ||
      nnz < 0) {
    throw DataError("hypergraph file: bad header");
  }
  std::vector<Hyperedge> edges(ne);
  for (std::int64_t k = 0; k < nnz; ++k) {
    std::int64_t node = 0, edge = 0;
    if (!(in >> node >> edge) || edge < 0 || edge >= ne) {
      throw DataError("hypergraph file: bad incidence entry " + std::to_string(k));
    }
    edges[edge].members.push_back(static_cast<NodeIndex>(node));
  }
  for (std::int64_t e = 0; e < ne; ++e) {
    std::string weight, kind;
    std::int64_t owner = 0;
    if (!(in >> weight >> owner >> kind)) throw DataError("hypergraph file: truncated edge records");
    const auto w = detail::parse_double(weight);
    if (!w) throw DataError("hypergraph file: bad weight for edge " + std::to_string(e));
    edges[e].weight = *w;
    edges[e].owner = static_cast<UserIndex>(owner);
    if (kind == "UI") {
      edges[e].kind = EdgeKind::user_item;
    } else if (kind == "UU") {
      edges[e].kind = EdgeKind::user_user;
    } else if (kind.rfind("M:", 0) == 0) {
      edges[e].kind = EdgeKind::model;
      edges[e].model = kind.substr(2);
    } else {
      throw DataError("hypergraph file: unknown edge kind '" + kind + "'");
    }
  }
  return Hypergraph(static_cast<std::int32_t>(nu), static_cast<std::int32_t>(ni), std::move(edges));
}

void write_hypergraph(const std::filesystem::path& path, const Hypergraph& hg) {
  std::ostringstream os;
  write_hypergraph(os, hg);
  detail::write_text_file(path, os.str());
}

Hypergraph read_hypergraph(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open hypergraph file " + path.string());
  return read_hypergraph(in);
}

void write_edge_weights(const std::filesystem::path& path, const Hypergraph& hg,
                        const InteractionDataset& ids) {
  std::ostringstream os;
  os << "edge,kind,model,user_id,degree,weight\n";
  char buf[64];
  for (std::int32_t e = 0; e < hg.num_edges(); ++e) {
    const auto& edge = hg.edges()[e];
    std::snprintf(buf, sizeof buf, "%.17g", edge.weight);
    os << e << ',' << edge_kind_name(edge.kind) << ',' << edge.model << ','
       << (edge.owner >= 0 ? ids.users().id(edge.owner) : "") << ',' << edge.members.size() << ','
       << buf << '\n';
  }
  detail::write_text_file(path, os.str());
}

}  // namespace hyperens
