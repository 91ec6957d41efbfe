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


#include <doctest.h>

#include <algorithm>
#include <limits>
#include <map>
#include <random>

#include "hyperens/ensemble.hpp"
#include "hyperens/error.hpp"
#include "hyperens/hypergraph.hpp"
#include "hyperens/ranker.hpp"
#include "support.hpp"

using namespace hyperens;
using hyperens::testing::make_dataset;

namespace {

// List whose user u row holds `hits[u]` items from the held-out set first.
RankingList list_with_hits(const std::string& name, const std::vector<int>& hits,
                           const HeldOut& held_out, std::int32_t num_items, int k) {
  RankingList l;
  l.model_name = name;
  l.k = k;
  for (std::size_t u = 0; u < hits.size(); ++u) {
    std::vector<RankedItem> row;
    for (int j = 0; j < hits[u]; ++j) row.push_back({held_out[u][j], 0.0});
    for (ItemIndex i = 0; static_cast<int>(row.size()) < k && i < num_items; ++i) {
      if (std::find(held_out[u].begin(), held_out[u].end(), i) == held_out[u].end()) {
        row.push_back({i, 0.0});
      }
    }
    for (std::size_t j = 0; j < row.size(); ++j) row[j].score = static_cast<double>(k - j);
    l.rows.push_back(row);
  }
  return l;
}

FactorModel random_model(const std::string& name, int users, int items, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  FactorModel m;
  m.name = name;
  m.user_factors.resize(users, 3);
  m.item_factors.resize(items, 3);
  for (Eigen::Index r = 0; r < users; ++r)
    for (int c = 0; c < 3; ++c) m.user_factors(r, c) = g(rng);
  for (Eigen::Index r = 0; r < items; ++r)
    for (int c = 0; c < 3; ++c) m.item_factors(r, c) = g(rng);
  return m;
}

RankingList list_of(const std::string& name, const InteractionDataset& fit, std::uint64_t seed,
                    int k = 3) {
  auto m = random_model(name, fit.num_users(), fit.num_items(), seed);
  return rank_topk(m, fit, k);
}

}  // namespace

TEST_CASE("uniform policy") {
  const auto p = uniform_policy();
  CHECK(p.w_ui == 1.0);
  CHECK(p.w_uu == 1.0);
  CHECK(p.decay_per_rank == 0.0);
  CHECK(p.model_weight("anything") == 1.0);
  p.validate();
}

TEST_CASE("weighted policy weights") {
  const auto p = weighted_policy({{"A", 1}, {"B", 2}, {"C", 3}, {"D", 4}});
  CHECK(p.w_ui == 1.0);
  CHECK(p.w_uu == 1.0);
  CHECK(p.model_weight("A") == doctest::Approx(0.5));
  CHECK(p.model_weight("B") == doctest::Approx(0.45));
  CHECK(p.model_weight("C") == doctest::Approx(0.40));
  CHECK(p.model_weight("D") == doctest::Approx(0.35));
  CHECK_THROWS_AS(p.model_weight("E"), ConfigError);

  std::map<std::string, int> eleven;
  for (int r = 1; r <= 11; ++r) eleven["m" + std::to_string(r)] = r;
  CHECK_THROWS_AS(weighted_policy(eleven), ConfigError);
  eleven.erase("m11");
  CHECK(weighted_policy(eleven).model_weight("m10") == doctest::Approx(0.05));

  CHECK_THROWS_AS(weighted_policy({{"A", 1}, {"B", 1}}), ConfigError);
  CHECK_THROWS_AS(weighted_policy({{"A", 2}}), ConfigError);
  WeightPolicy bad;
  bad.decay_per_rank = 1.0;
  CHECK_THROWS_AS(weighted_policy({{"A", 1}}, bad), ConfigError);
  bad = WeightPolicy{};
  bad.w_uu = 0.0;
  CHECK_THROWS_AS(weighted_policy({{"A", 1}}, bad), ConfigError);
}

TEST_CASE("weighted policy is monotone in rank") {
  std::map<std::string, int> ranks;
  for (int r = 1; r <= 6; ++r) ranks["m" + std::to_string(r)] = r;
  const auto p = weighted_policy(ranks);
  for (int r = 1; r < 6; ++r) {
    CHECK(p.model_weight("m" + std::to_string(r)) > p.model_weight("m" + std::to_string(r + 1)));
  }
}

TEST_CASE("rank_models orders by validation precision") {
  const HeldOut val{{0, 1, 2, 3, 4, 5, 6, 7, 8, 9}, {10, 11, 12, 13, 14, 15, 16, 17, 18, 19}};
  const auto bpr = list_with_hits("BPR", {1, 1}, val, 40, 10);   // 0.10
  const auto wrmf = list_with_hits("WRMF", {2, 0}, val, 40, 10);  // 0.10
  const auto warp = list_with_hits("WARP", {2, 1}, val, 40, 10);  // 0.15
  SUBCASE("by precision") {
    const auto better = list_with_hits("WRMF", {2, 1}, val, 40, 10);
    const std::vector<RankingList> lists{bpr, better};
    const auto ranks = rank_models(lists, val);
    CHECK(ranks.at("WRMF") == 1);
    CHECK(ranks.at("BPR") == 2);
  }
  SUBCASE("ties by name") {
    const std::vector<RankingList> lists{wrmf, warp, bpr};
    const auto ranks = rank_models(lists, val);
    CHECK(ranks.at("WARP") == 1);
    CHECK(ranks.at("BPR") == 2);
    CHECK(ranks.at("WRMF") == 3);
  }
  SUBCASE("empty validation") {
    const std::vector<RankingList> lists{bpr};
    CHECK_THROWS_AS(rank_models(lists, HeldOut{}), DataError);
  }
}

TEST_CASE("rank_models agrees with a recount") {
  std::mt19937_64 rng(4);
  const auto ds = testing::planted_dataset(40, 60, 25, 2, 2.0, 4);
  const auto s = split(ds, {10, 5, 5}, 9);
  std::vector<RankingList> lists;
  for (int m = 0; m < 5; ++m) lists.push_back(list_of("m" + std::to_string(m), s.train, 100 + m, 10));
  const auto ranks = rank_models(lists, s.validation);
  std::vector<std::pair<double, std::string>> recount;
  for (const auto& l : lists) {
    double total = 0.0;
    for (UserIndex u = 0; u < s.num_users(); ++u) {
      int hits = 0;
      for (ItemIndex i : l.items_of(u))
        hits += std::count(s.validation[u].begin(), s.validation[u].end(), i);
      total += hits / 10.0;
    }
    recount.emplace_back(-total / s.num_users(), l.model_name);
  }
  std::sort(recount.begin(), recount.end());
  for (std::size_t r = 0; r < recount.size(); ++r) CHECK(ranks.at(recount[r].second) == int(r) + 1);
}

TEST_CASE("assembled weights follow the policy") {
  const auto ds = testing::planted_dataset(20, 40, 6, 2, 1.0, 1);
  std::vector<RankingList> lists;
  for (int m = 0; m < 3; ++m) lists.push_back(list_of("m" + std::to_string(m), ds, 10 + m));
  const std::map<std::string, int> ranks{{"m0", 2}, {"m1", 3}, {"m2", 1}};
  for (const auto& policy : {uniform_policy(), weighted_policy(ranks)}) {
    const auto hg = assemble(20, 40, build_ui_edges(ds), build_uu_edges(ds, 3),
                             build_model_edges(lists, 20), policy);
    for (int e = 0; e < hg.num_edges(); ++e) {
      const auto& edge = hg.edges()[e];
      const double want = edge.kind == EdgeKind::user_item   ? policy.w_ui
                          : edge.kind == EdgeKind::user_user ? policy.w_uu
                                                             : policy.model_weight(edge.model);
      CHECK(hg.weights()[e] == want);
    }
    if (policy.decay_per_rank == 0.0) {
      CHECK(hg.weights() == Eigen::VectorXd::Ones(hg.num_edges()));
    }
  }
}

TEST_CASE("uniform weights reduce to the unweighted affinity") {
  const auto ds = testing::planted_dataset(15, 30, 6, 2, 1.0, 2);
  const std::vector<RankingList> lists{list_of("a", ds, 1), list_of("b", ds, 2)};
  const auto hg = assemble(15, 30, build_ui_edges(ds), build_uu_edges(ds, 3),
                           build_model_edges(lists, 15), uniform_policy());
  // Dn^-1/2 H De^-1 H^T Dn^-1/2 with Dn the plain membership counts.
  const Eigen::MatrixXd h = testing::dense_incidence(hg);
  const Eigen::VectorXd counts = h.rowwise().sum();
  Eigen::VectorXd inv_sqrt(counts.size());
  for (Eigen::Index n = 0; n < counts.size(); ++n) {
    inv_sqrt[n] = counts[n] > 0 ? 1.0 / std::sqrt(counts[n]) : 0.0;
  }
  const Eigen::VectorXd de_inv = h.colwise().sum().transpose().cwiseInverse();
  const Eigen::MatrixXd want =
      inv_sqrt.asDiagonal() * h * de_inv.asDiagonal() * h.transpose() * inv_sqrt.asDiagonal();
  CHECK((compute_affinity(hg).to_dense() - want).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("zero decay with equal base weights gives the uniform hypergraph") {
  const auto ds = testing::planted_dataset(25, 40, 7, 2, 1.0, 3);
  const std::vector<RankingList> lists{list_of("a", ds, 1), list_of("b", ds, 2), list_of("c", ds, 3)};
  WeightPolicy shape;
  shape.w_ui = shape.w_uu = shape.w_m_base = 1.0;
  shape.decay_per_rank = 0.0;
  const auto uniform = assemble(25, 40, build_ui_edges(ds), build_uu_edges(ds, 4),
                                build_model_edges(lists, 25), uniform_policy());
  const auto weighted = assemble(25, 40, build_ui_edges(ds), build_uu_edges(ds, 4),
                                 build_model_edges(lists, 25),
                                 weighted_policy({{"a", 3}, {"b", 1}, {"c", 2}}, shape));
  CHECK(uniform == weighted);
  CHECK(Eigen::MatrixXd(compute_affinity(uniform).matrix()) ==
        Eigen::MatrixXd(compute_affinity(weighted).matrix()));
}

TEST_CASE("hybrid scoring") {
  const auto ds = testing::planted_dataset(10, 20, 4, 2, 1.0, 5);
  const auto m1 = random_model("A", 10, 20, 1);
  const auto m2 = random_model("B", 10, 20, 2);

  SUBCASE("one model reproduces its own list") {
    const std::vector<ScoreSource> src{score_source(m1)};
    const std::vector<double> w{0.37};
    const auto hybrid = hybrid_rank(src, w, ds, 5);
    const auto direct = rank_topk(m1, ds, 5);
    for (UserIndex u = 0; u < 10; ++u) CHECK(hybrid.items_of(u) == direct.items_of(u));
    CHECK(hybrid.model_name == "Hybrid");
  }
  SUBCASE("identical models give the same list") {
    const std::vector<ScoreSource> one{score_source(m1)};
    const std::vector<ScoreSource> two{score_source(m1), score_source(m1)};
    const std::vector<double> w1{0.5};
    const std::vector<double> w2{0.2, 0.9};
    CHECK(hybrid_rank(one, w1, ds, 5).rows.size() == 10);
    for (UserIndex u = 0; u < 10; ++u) {
      CHECK(hybrid_rank(one, w1, ds, 5).items_of(u) == hybrid_rank(two, w2, ds, 5).items_of(u));
    }
  }
  SUBCASE("matches a by-hand recomputation") {
    const std::vector<ScoreSource> src{score_source(m1), score_source(m2)};
    const std::vector<double> w{0.3, 0.8};
    for (UserIndex u = 0; u < 10; ++u) {
      const Eigen::VectorXd got = hybrid_scores(src, w, ds, u);
      const Eigen::VectorXd s1 = m1.score_items(u), s2 = m2.score_items(u);
      double lo1 = 1e300, hi1 = -1e300, lo2 = 1e300, hi2 = -1e300;
      for (ItemIndex i = 0; i < 20; ++i) {
        if (ds.contains(u, i)) continue;
        lo1 = std::min(lo1, s1[i]), hi1 = std::max(hi1, s1[i]);
        lo2 = std::min(lo2, s2[i]), hi2 = std::max(hi2, s2[i]);
      }
      for (ItemIndex i = 0; i < 20; ++i) {
        if (ds.contains(u, i)) {
          CHECK(got[i] == -std::numeric_limits<double>::infinity());
          continue;
        }
        const double want = (0.3 * (s1[i] - lo1) / (hi1 - lo1) + 0.8 * (s2[i] - lo2) / (hi2 - lo2)) / 1.1;
        CHECK(got[i] == doctest::Approx(want).epsilon(1e-12));
      }
    }
  }
  SUBCASE("constant scores contribute one half") {
    const ScoreSource flat{"flat", [](UserIndex) { return Eigen::VectorXd::Constant(20, 3.0); }};
    const std::vector<ScoreSource> src{flat};
    const std::vector<double> w{1.0};
    const Eigen::VectorXd got = hybrid_scores(src, w, ds, 0);
    for (ItemIndex i = 0; i < 20; ++i)
      if (!ds.contains(0, i)) CHECK(got[i] == 0.5);
  }
  SUBCASE("equal weights are order independent") {
    const std::vector<ScoreSource> ab{score_source(m1), score_source(m2)};
    const std::vector<ScoreSource> ba{score_source(m2), score_source(m1)};
    const std::vector<double> w{0.4, 0.4};
    CHECK(hybrid_rank(ab, w, ds, 6).rows == hybrid_rank(ba, w, ds, 6).rows);
  }
  SUBCASE("list-only sources score by rank") {
    const auto list = rank_topk(m1, ds, 3);
    const auto src = score_source(list, 20);
    const Eigen::VectorXd s = src.scores(0);
    CHECK(s[list.rows[0][0].item] == 3.0);
    CHECK(s[list.rows[0][2].item] == 1.0);
    CHECK(s.sum() == 6.0);
  }
  SUBCASE("argument errors") {
    const std::vector<ScoreSource> src{score_source(m1)};
    const std::vector<double> zero{0.0};
    const std::vector<double> two{0.5, 0.5};
    CHECK_THROWS_AS(hybrid_scores(src, zero, ds, 0), ConfigError);
    CHECK_THROWS_AS(hybrid_scores(src, two, ds, 0), ConfigError);
    CHECK_THROWS_AS(hybrid_scores({}, {}, ds, 0), ConfigError);
    const std::vector<double> w{1.0};
    CHECK_THROWS_AS(hybrid_rank(src, w, ds, 18), ConfigError);
  }
}
