#include <algorithm>
#include <catch2/catch_amalgamated.hpp>
#include <numeric>

#include "lflp/hardness.hpp"
#include "lflp/instance.hpp"
#include "support/random_instances.hpp"

using namespace lflp;
using Catch::Approx;

namespace {

Instance line3(std::vector<Flow> flows, std::vector<double> f) {
  // 0 --1-- 1 --1-- 2
  return Instance::from_matrix(3, {0, 1, 2, 1, 0, 1, 2, 1, 0}, flows, std::move(f));
}

}  // namespace

TEST_CASE("edge distance takes the nearer side", "[core]") {
  Instance inst = Instance::from_matrix(4, {0, 2, 5, 1, 2, 0, 3, 2, 5, 3, 0, 4, 1, 2, 4, 0}, {}, {1, 1, 1, 1});
  CHECK(edge_distance(inst, {3, 3, 1.0}, 2) == inst.d(3, 2));
  CHECK(edge_distance(inst, {1, 2, 1.0}, 0) == 2.0);

  Instance far = Instance::from_matrix(3, {0, kInf, kInf, kInf, 0, kInf, kInf, kInf, 0}, {}, {1, 1, 1});
  CHECK(is_inf(edge_distance(far, {0, 1, 1.0}, 2)));
}

TEST_CASE("construction drops zero mass and merges duplicates", "[core]") {
  Instance inst = line3({{0, 2, 1.0}, {1, 1, 0.0}, {0, 2, 2.5}, {2, 0, 1.0}}, {1, 1, 1});
  REQUIRE(inst.edges().size() == 2);
  CHECK(inst.edges()[0].h == 0);
  CHECK(inst.edges()[0].w == 2);
  CHECK(inst.edges()[0].mass == 3.5);
  CHECK(inst.find_edge(2, 0) == 1);
  CHECK(inst.find_edge(1, 1) == -1);
}

TEST_CASE("construction rejects malformed input", "[core]") {
  auto code = [](auto fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::IO;
  };
  CHECK(code([] { Instance::from_matrix(2, {0, 1, 2, 0}, {}, {1, 1}); }) == ErrorCode::InvalidInstance);
  CHECK(code([] { Instance::from_matrix(2, {1, 1, 1, 0}, {}, {1, 1}); }) == ErrorCode::InvalidInstance);
  CHECK(code([] { Instance::from_matrix(2, {0, -1, -1, 0}, {}, {1, 1}); }) == ErrorCode::InvalidInstance);
  CHECK(code([] { Instance::from_matrix(2, {0, 1, 1, 0}, {{0, 5, 1.0}}, {1, 1}); }) == ErrorCode::InvalidInstance);
  CHECK(code([] { Instance::from_matrix(2, {0, 1, 1, 0}, {}, {1}); }) == ErrorCode::InvalidInstance);
}

TEST_CASE("total cost of trivial and Example-1 solutions", "[core]") {
  Instance one = Instance::from_matrix(1, {0}, {{0, 0, 1.0}}, {0});
  CostReport r = total_cost(one, Solution::of({0}));
  CHECK(r.opening_cost == 0.0);
  CHECK(r.connection_cost == 0.0);
  CHECK(r.total == 0.0);

  Instance ex = example1_family(4, 0.01, 1.0);
  CHECK(total_cost(ex, Solution::of({4})).total == Approx(1.0).margin(1e-12));
  // Frozen from tests/oracles/exact_greedy.out: 613/300.
  CostReport homes = total_cost(ex, Solution::of({0, 1, 2, 3}));
  CHECK(homes.total == Approx(613.0 / 300.0).margin(1e-12));
  CHECK(homes.connection_cost == 0.0);
  CHECK(homes.assignment == std::vector<int>{0, 1, 2, 3});
}

TEST_CASE("unserved edges make the total infinite", "[core]") {
  Instance inst = Instance::from_matrix(2, {0, kInf, kInf, 0}, {{0, 0, 1.0}, {1, 1, 1.0}}, {1, 1});
  CostReport r = total_cost(inst, Solution::of({0}));
  CHECK(is_inf(r.total));
  CHECK(r.unserved == 1);
  CHECK(r.assignment[1] == -1);
  CHECK(is_inf(total_cost(inst, Solution::of({})).total));
  Instance empty = Instance::from_matrix(2, {0, 1, 1, 0}, {}, {1, 1});
  CHECK(total_cost(empty, Solution::of({})).total == 0.0);
}

TEST_CASE("assignment ties go to the lowest index", "[core]") {
  Instance inst = line3({{1, 1, 1.0}}, {1, 1, 1});
  CHECK(total_cost(inst, Solution::of({2, 0})).assignment[0] == 0);
}

TEST_CASE("check_metric finds triangle violations", "[core]") {
  testing::Rng rng(7);
  testing::RandomSpec spec;
  CHECK(check_metric(testing::random_euclidean(rng, spec)).empty());

  Instance bad = Instance::from_matrix(3, {0, 1, 10, 1, 0, 1, 10, 1, 0}, {}, {1, 1, 1});
  auto v = check_metric(bad);
  REQUIRE(v.size() == 1);
  CHECK(v[0] == Triple{0, 1, 2});

  VCGraph g;
  g.weights = {1, 2, 3};
  g.edges = {{0, 1}, {1, 2}};
  CHECK(check_metric(vc_to_2lflp(g, 7.0)).empty());
}

TEST_CASE("instance JSON round trip keeps infinities", "[core]") {
  Instance inst = Instance::from_matrix(3, {0, kInf, 2, kInf, 0, 1, 2, 1, 0}, {{0, 1, 2.0}, {2, 2, 0.5}},
                                        {1.0, kInf, 0.25});
  auto j = to_json(inst);
  CHECK(j["dist"][0][1] == "inf");
  Instance back = instance_from_json(j);
  CHECK(back.dist() == inst.dist());
  CHECK(back.opening()[1] == kInf);
  CHECK(to_json(back) == j);

  testing::Rng rng(3);
  Instance e = testing::random_euclidean(rng, {});
  Instance eb = instance_from_json(to_json(e));
  CHECK(eb.coords().has_value());
  CHECK(to_json(eb) == to_json(e));
}

TEST_CASE("instance JSON rejects both or neither of coords and dist", "[core]") {
  nlohmann::json j = {{"n", 1}, {"opening", {1}}, {"flows", nlohmann::json::array()}};
  CHECK_THROWS_AS(instance_from_json(j), Error);
  j["dist"] = {{0}};
  j["coords"] = {{0, 0}};
  CHECK_THROWS_AS(instance_from_json(j), Error);
}

TEST_CASE("property: adding a facility never raises connection cost", "[core][property]") {
  testing::Rng rng(11);
  testing::RandomSpec spec;
  for (int k = 0; k < 200; ++k) {
    Instance inst = testing::random_mixed(rng, spec, k);
    std::vector<int> sol;
    for (int i = 0; i < inst.n(); ++i)
      if (testing::uniform(rng, 0, 1) < 0.4) sol.push_back(i);
    const int extra = testing::uniform_int(rng, 0, inst.n() - 1);
    const double before = total_cost(inst, Solution::of(sol)).connection_cost;
    sol.push_back(extra);
    const double after = total_cost(inst, Solution::of(sol)).connection_cost;
    CHECK(after <= before);
  }
}

TEST_CASE("property: total cost is invariant under relabeling", "[core][property]") {
  testing::Rng rng(12);
  testing::RandomSpec spec;
  for (int k = 0; k < 200; ++k) {
    Instance inst = testing::random_mixed(rng, spec, k);
    const int n = inst.n();
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<double> dist(static_cast<size_t>(n) * n);
    std::vector<double> f(n);
    for (int i = 0; i < n; ++i) {
      f[perm[i]] = inst.f(i);
      for (int j = 0; j < n; ++j) dist[static_cast<size_t>(perm[i]) * n + perm[j]] = inst.d(i, j);
    }
    std::vector<Flow> flows;
    for (const Edge& e : inst.edges()) flows.push_back({perm[e.h], perm[e.w], e.mass});
    Instance relabeled = Instance::from_matrix(n, dist, flows, f);
    std::vector<int> sol, psol;
    for (int i = 0; i < n; ++i)
      if (testing::uniform(rng, 0, 1) < 0.5) {
        sol.push_back(i);
        psol.push_back(perm[i]);
      }
    CHECK(total_cost(inst, Solution::of(sol)).total ==
          Approx(total_cost(relabeled, Solution::of(psol)).total).epsilon(1e-12));
  }
}

TEST_CASE("property: collapsed edges measure from their single location", "[core][property]") {
  testing::Rng rng(13);
  for (int k = 0; k < 100; ++k) {
    Instance inst = testing::random_euclidean(rng, {});
    const int h = testing::uniform_int(rng, 0, inst.n() - 1);
    const int i = testing::uniform_int(rng, 0, inst.n() - 1);
    CHECK(edge_distance(inst, {h, h, 1.0}, i) == inst.d(h, i));
  }
}
