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
#include <fstream>
#include <set>
#include <sstream>

#include "hyperens/dataset.hpp"
#include "hyperens/error.hpp"
#include "support.hpp"

using namespace hyperens;
using hyperens::testing::make_dataset;

namespace {

InteractionDataset parse(const std::string& text, LoadOptions opts = {},
                         DatasetStats* stats = nullptr) {
  std::istringstream in(text);
  return parse_interactions(in, opts, "<mem>", stats);
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Users with the given profile sizes over a 60-item space; user u holds
// items u..u+size-1 (mod 60).
InteractionDataset sized_users(const std::vector<int>& sizes) {
  std::vector<std::vector<ItemIndex>> profiles;
  for (std::size_t u = 0; u < sizes.size(); ++u) {
    std::vector<ItemIndex> p;
    for (int j = 0; j < sizes[u]; ++j) p.push_back(static_cast<ItemIndex>((u + j) % 60));
    profiles.push_back(p);
  }
  return make_dataset(profiles, 60);
}

}  // namespace

TEST_CASE("duplicate rows collapse") {
  DatasetStats stats;
  const auto ds = parse("a,x\na,y\nb,x\na,x\n", {}, &stats);
  CHECK(ds.num_users() == 2);
  CHECK(ds.num_items() == 2);
  CHECK(ds.num_interactions() == 3);
  CHECK(ds.sparsity() == doctest::Approx(0.75));
  CHECK(stats.rows_read == 4);
  CHECK(stats.num_interactions == 3);
}

TEST_CASE("ids are assigned by first appearance and round-trip") {
  const auto ds = parse("7,c\n3,a\n7,b\n5,a\n");
  CHECK(ds.users().ids() == std::vector<std::string>{"7", "3", "5"});
  CHECK(ds.items().ids() == std::vector<std::string>{"c", "a", "b"});
  for (UserIndex u = 0; u < ds.num_users(); ++u) CHECK(*ds.users().find(ds.users().id(u)) == u);
  for (ItemIndex i = 0; i < ds.num_items(); ++i) CHECK(*ds.items().find(ds.items().id(i)) == i);
  CHECK_FALSE(ds.users().find("nope"));
}

TEST_CASE("header detection") {
  SUBCASE("named columns") {
    const auto ds = parse("user,item,rating\n1,10,5\n2,10,3\n");
    CHECK(ds.num_users() == 2);
    CHECK_FALSE(ds.users().find("user"));
  }
  SUBCASE("two-column header over numeric ids") {
    const auto ds = parse("uid,iid\n1,10\n");
    CHECK(ds.num_users() == 1);
  }
  SUBCASE("numeric first row is data") {
    const auto ds = parse("1,10,5\n2,11,4\n");
    CHECK(ds.num_users() == 2);
  }
  SUBCASE("string ids without header") {
    const auto ds = parse("a,x\nb,y\n");
    CHECK(ds.num_users() == 2);
  }
  SUBCASE("forced modes") {
    LoadOptions o;
    o.header = HeaderMode::absent;
    CHECK(parse("user,item\n1,10\n", o).num_users() == 2);
    o.header = HeaderMode::present;
    CHECK(parse("1,10\n2,10\n", o).num_users() == 1);
  }
}

TEST_CASE("loader errors") {
  SUBCASE("malformed row names the line") {
    try {
      parse("a,x\nb\n");
      FAIL("expected DataError");
    } catch (const DataError& e) {
      CHECK(std::string(e.what()).find("<mem>:2") != std::string::npos);
    }
  }
  SUBCASE("empty id field") {
    CHECK_THROWS_AS(parse("a,x\n,y\n"), DataError);
  }
  SUBCASE("empty file") {
    CHECK_THROWS_AS(parse(""), DataError);
    CHECK_THROWS_AS(parse("\n\n"), DataError);
    CHECK_THROWS_AS(parse("user,item,rating\n"), DataError);
  }
  SUBCASE("threshold needs a numeric rating") {
    LoadOptions o;
    o.min_rating = 3.0;
    o.header = HeaderMode::absent;
    CHECK_THROWS_AS(parse("a,x\n", o), DataError);
    CHECK_THROWS_AS(parse("a,x,good\n", o), DataError);
  }
  SUBCASE("missing file names the path") {
    try {
      load_interactions("/nonexistent/ratings.csv", {});
      FAIL("expected DataError");
    } catch (const DataError& e) {
      CHECK(std::string(e.what()).find("/nonexistent/ratings.csv") != std::string::npos);
    }
  }
  CHECK_THROWS_AS(parse_file_format("xlsx"), ConfigError);
  CHECK(parse_file_format("tsv") == FileFormat::tsv);
}

TEST_CASE("hetrec-style ratings file") {
  // Expected counts come from an awk recount of tests/data/hetrec_sample.dat:
  //   awk -F'\t' 'NR>1 && $3>=3.5 {p[$1"\t"$2]=1; u[$1]=1; i[$2]=1; k++} ...'
  LoadOptions o;
  o.format = FileFormat::tsv;
  DatasetStats all;
  const auto ds = load_interactions(testing::data_dir() / "hetrec_sample.dat", o, &all);
  CHECK(all.rows_read == 44);
  CHECK(all.rows_kept == 44);
  CHECK(all.num_users == 7);
  CHECK(all.num_items == 13);
  CHECK(all.num_interactions == 43);
  CHECK(all.sparsity == doctest::Approx(43.0 / 91.0));

  o.min_rating = 3.5;
  DatasetStats kept;
  const auto liked = load_interactions(testing::data_dir() / "hetrec_sample.dat", o, &kept);
  CHECK(kept.rows_read == 44);
  CHECK(kept.rows_kept == 22);
  CHECK(kept.num_users == 7);
  CHECK(kept.num_items == 11);
  CHECK(kept.num_interactions == 21);
  CHECK(kept.sparsity == doctest::Approx(21.0 / 77.0));
  CHECK(liked.num_interactions() == 21);
}

TEST_CASE("split sizes and dropping") {
  const auto ds = sized_users({25, 19, 20, 40});
  const auto s = split(ds, {10, 5, 5}, 3);
  REQUIRE(s.num_users() == 3);
  CHECK(s.train.users().ids() == std::vector<std::string>{"u0", "u2", "u3"});
  CHECK(s.num_items() == 60);
  CHECK(s.train.profile(0).size() == 10);
  CHECK(s.train.profile(1).size() == 5);
  CHECK(s.train.profile(2).size() == 25);
  for (UserIndex u = 0; u < s.num_users(); ++u) {
    CHECK(s.test[u].size() == 10);
    CHECK(s.validation[u].size() == 5);
  }
}

TEST_CASE("split parts partition each retained profile") {
  const auto ds = testing::planted_dataset(40, 80, 25, 2, 2.0, 11);
  const auto s = split(ds, {10, 5, 5}, 99);
  REQUIRE(s.num_users() == 40);
  for (UserIndex u = 0; u < s.num_users(); ++u) {
    std::multiset<ItemIndex> all;
    for (ItemIndex i : s.train.profile(u)) all.insert(i);
    all.insert(s.validation[u].begin(), s.validation[u].end());
    all.insert(s.test[u].begin(), s.test[u].end());
    const auto original = ds.profile(*ds.users().find(s.train.users().id(u)));
    CHECK(all.size() == original.size());
    CHECK(std::set<ItemIndex>(all.begin(), all.end()) ==
          std::set<ItemIndex>(original.begin(), original.end()));
  }
  const auto fit = s.fit_set(Phase::test);
  for (UserIndex u = 0; u < s.num_users(); ++u) {
    CHECK(fit.profile(u).size() == s.train.profile(u).size() + 5);
    for (ItemIndex i : s.validation[u]) CHECK(fit.contains(u, i));
    for (ItemIndex i : s.test[u]) CHECK_FALSE(fit.contains(u, i));
  }
  CHECK(&s.targets(Phase::validation) == &s.validation);
  CHECK(&s.targets(Phase::test) == &s.test);
}

TEST_CASE("split is deterministic under a seed") {
  const auto ds = testing::planted_dataset(30, 60, 22, 2, 2.0, 5);
  const auto a = split(ds, {10, 5, 5}, 1234);
  const auto b = split(ds, {10, 5, 5}, 1234);
  const auto c = split(ds, {10, 5, 5}, 4321);
  CHECK(a.test == b.test);
  CHECK(a.validation == b.validation);
  CHECK(split_manifest_json(a) == split_manifest_json(b));
  CHECK(a.test != c.test);
}

TEST_CASE("split errors") {
  CHECK_THROWS_WITH_AS(split(sized_users({19, 12}), {10, 5, 5}, 1),
                       "dataset too sparse for protocol", DataError);
  CHECK_THROWS_AS(split(sized_users({30}), {-1, 5, 5}, 1), ConfigError);
}

TEST_CASE("interaction rows") {
  const auto ds = make_dataset({{0, 2}, {}}, 4);
  const auto row = interaction_row(ds, 0);
  CHECK(Eigen::VectorXd(row) == Eigen::Vector4d(1, 0, 1, 0));
  CHECK(interaction_row(ds, 1).nonZeros() == 0);
  CHECK_THROWS_AS(interaction_row(ds, 2), ConfigError);
  CHECK_THROWS_AS(interaction_row(ds, -1), ConfigError);

  const auto big = testing::planted_dataset(50, 70, 21, 3, 1.0, 8);
  for (UserIndex u = 0; u < big.num_users(); ++u) {
    const auto r = interaction_row(big, u);
    CHECK(r.nonZeros() == static_cast<Eigen::Index>(big.profile(u).size()));
    for (Eigen::SparseVector<double>::InnerIterator it(r); it; ++it) {
      CHECK(it.value() == 1.0);
      CHECK(big.contains(u, static_cast<ItemIndex>(it.index())));
    }
  }
}

TEST_CASE("split manifest round-trip") {
  const auto ds = testing::planted_dataset(25, 50, 24, 2, 2.0, 17);
  const auto s = split(ds, {10, 5, 5}, 77);
  const auto dir = testing::scratch_dir("manifest");
  write_split_manifest(dir / "a.json", s);
  write_split_manifest(dir / "b.json", s);
  CHECK(slurp(dir / "a.json") == slurp(dir / "b.json"));

  const auto back = read_split_manifest(dir / "a.json");
  CHECK(back.seed == 77);
  CHECK(back.params.n_test == 10);
  CHECK(back.train.users().ids() == s.train.users().ids());
  CHECK(back.train.items().ids() == s.train.items().ids());
  CHECK(back.test == s.test);
  CHECK(back.validation == s.validation);
  for (UserIndex u = 0; u < s.num_users(); ++u) {
    CHECK(std::ranges::equal(back.train.profile(u), s.train.profile(u)));
  }
  CHECK(split_manifest_json(back) == split_manifest_json(s));

  CHECK_THROWS_AS(parse_split_manifest("{not json"), DataError);
  CHECK_THROWS_AS(parse_split_manifest(R"({"format":"other"})"), DataError);
}
