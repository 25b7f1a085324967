#include <catch2/catch_amalgamated.hpp>

#include "lflp/certify.hpp"
#include "lflp/engine.hpp"
#include "lflp/frp.hpp"
#include "lflp/hardness.hpp"
#include "support/random_instances.hpp"

using namespace lflp;
using Catch::Approx;

TEST_CASE("structural properties hold on Example-1", "[certify]") {
  Instance inst = example1_family(4, 0.01, 1.0);
  for (double g : {0.0, 1.0}) {
    Trace tr = run_two_chance(inst, {g, 1.0}).trace;
    StructuralReport rep = check_structural(inst, tr, g, 1.0);
    CHECK(rep.ok());
    CHECK(rep.checks > 0);
  }
}

TEST_CASE("a swapped psi entry breaks item (iii)", "[certify]") {
  Instance inst = example1_family(4, 0.01, 1.0);
  Trace tr = run_two_chance(inst, {1.0, 1.0}).trace;
  // Edge (1, 4) is served by the hub through its W side only.
  const int e = inst.find_edge(1, 4);
  REQUIRE(tr.psi[e][0] == kNone);
  REQUIRE(tr.psi[e][1] == 4);
  std::swap(tr.psi[e][0], tr.psi[e][1]);
  StructuralReport rep = check_structural(inst, tr, 1.0, 1.0);
  REQUIRE_FALSE(rep.ok());
  bool found = false;
  for (const auto& v : rep.violations)
    if (v.item == "iii" && v.edge == e && v.side == 0 && v.facility == 4) found = true;
  CHECK(found);
  CHECK_THROWS_AS(require_structural(inst, tr, 1.0, 1.0), Error);
}

TEST_CASE("an edge that never connects is reported", "[certify]") {
  Instance inst = example1_family(4, 0.01, 1.0);
  Trace tr = run_two_chance(inst, {1.0, 1.0}).trace;
  const int e = inst.find_edge(3, 4);
  tr.psi[e] = {kNone, kNone};
  StructuralReport rep = check_structural(inst, tr, 1.0, 1.0);
  REQUIRE_FALSE(rep.ok());
  CHECK(rep.violations.front().item == "connected");
  CHECK(rep.violations.front().edge == e);
}

TEST_CASE("dual certificate on a single self-edge", "[certify]") {
  // The opening waits for eta * f = 4, so alpha = 4 and mu = (2/2) * 4.
  Instance inst = Instance::from_matrix(1, {0}, {{0, 0, 1.0}}, {2.0});
  Trace tr = run_two_chance(inst, {1.0, 2.0}).trace;
  DualCertificate c = dual_certificate(inst, tr, 1.0, 2.0);
  CHECK(c.edge_class[0] == 1);
  CHECK(c.mu[0] == Approx(4.0));
  CHECK(c.cost == Approx(2.0));
}

TEST_CASE("dual certificate on Example-1", "[certify]") {
  Instance inst = example1_family(4, 0.01, 1.0);
  Trace tr = run_two_chance(inst, {1.0, 1.0}).trace;
  DualCertificate c = dual_certificate(inst, tr, 1.0, 1.0);
  // 2 * 0.24 for the first home plus 2 * 19/75 for each edge served by the hub.
  CHECK(c.total == Approx(0.48 + 6 * 19.0 / 75));
  CHECK(c.total >= 1.24);
  CHECK(c.cost == Approx(1.24));
  // The first edge reaches the hub through its W side once the hub opens.
  CHECK(c.edge_class == std::vector<int>{2, 1, 1, 1});
}

TEST_CASE("dual certificate on a zero-cost instance", "[certify]") {
  Instance inst = Instance::from_matrix(2, {0, 1, 1, 0}, {{0, 0, 1.0}, {1, 1, 2.0}}, {0, 0});
  Trace tr = run_two_chance(inst, {0.5, 1.0}).trace;
  DualCertificate c = dual_certificate(inst, tr, 0.5, 1.0);
  CHECK(c.total == 0.0);
  CHECK(c.cost == 0.0);
}

TEST_CASE("an inflated cost fails the certificate", "[certify]") {
  Instance inst = example1_family(4, 0.01, 1.0);
  Trace tr = run_two_chance(inst, {1.0, 1.0}).trace;
  // Claiming every home opened raises the cost above the dual sum.
  Trace fake = tr;
  for (int i : {1, 2, 3}) fake.events.push_back({EventKind::Open, 1.0, i, -1, -1});
  CHECK_THROWS_AS(dual_certificate(inst, fake, 1.0, 1.0), Error);
}

TEST_CASE("region extraction on Example-1", "[certify]") {
  Instance inst = example1_family(4, 0.01, 1.0);
  Trace tr = run_two_chance(inst, {1.0, 1.0}).trace;
  ServiceRegion reg{4, {0, 1, 2, 3}};
  RegionSolution rs = wfrp_from_region(inst, tr, 1.0, 1.0, reg);
  CHECK(rs.N == Approx(1.0));
  CHECK(rs.sol.f == Approx(1.0));
  for (double d : rs.sol.d) CHECK(d == 0.0);
  CheckReport r = check_solution(build(ProgramKind::WFRP, rs.params), rs.sol);
  CHECK(r.feasible);
  CHECK(r.objective == Approx(2.0));
  CHECK(r.objective >= 1.0);
  CHECK(r.objective <= 2.497);

  FRSolution s = batch_wfrp_to_sfrp(rs.params, rs.sol, 3);
  ProgramParams sp;
  sp.size = 3;
  CheckReport rb = check_solution(build(ProgramKind::SFRP, sp), s);
  CHECK(rb.feasible);
  CHECK(rb.objective >= r.objective - 1e-7);
}

TEST_CASE("region over one edge makes FR.iii tight", "[certify]") {
  // Facility 1 opens at t = 1 for its own edge; edge (0,0) reaches it by
  // event (a) at t = 5, so its connection distance equals alpha.
  Instance inst = Instance::from_matrix(2, {0, 5, 5, 0}, {{0, 0, 1.0}, {1, 1, 1.0}}, {100.0, 1.0});
  Trace tr = run_two_chance(inst, {1.0, 1.0}).trace;
  REQUIRE(tr.alpha[0] == Approx(5.0));
  RegionSolution rs = wfrp_from_region(inst, tr, 1.0, 1.0, {1, {0}});
  CHECK(rs.sol.c[0] == rs.sol.alpha[0]);
  FRProgram p = build(ProgramKind::WFRP, rs.params);
  CHECK(eval_lhs(p.constraints[p.constraints.size() - 2], p.flatten(rs.sol)) == 0.0);
  CHECK(check_solution(p, rs.sol).feasible);
}

TEST_CASE("region extraction errors", "[certify]") {
  Instance zero = Instance::from_matrix(1, {0}, {{0, 0, 1.0}}, {0.0});
  Trace tz = run_two_chance(zero, {1.0, 1.0}).trace;
  CHECK_THROWS_AS(wfrp_from_region(zero, tz, 1.0, 1.0, {0, {0}}), Error);

  Instance frac = Instance::from_matrix(1, {0}, {{0, 0, 1.5}}, {1.0});
  Trace tf = run_two_chance(frac, {1.0, 1.0}).trace;
  try {
    wfrp_from_region(frac, tf, 1.0, 1.0, {0, {0}});
    FAIL("expected NonIntegralMass");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonIntegralMass);
  }
  CHECK_THROWS_AS(wfrp_from_region(frac, tf, 1.0, 1.0, {0, {}}), Error);
}

TEST_CASE("sigma prefers H on ties", "[certify]") {
  Instance inst = Instance::from_matrix(3, {0, 2, 1, 2, 0, 1, 1, 1, 0}, {}, {1, 1, 1});
  CHECK(sigma_side(inst, {0, 1, 1.0}, 2) == 0);
  CHECK(sigma_side(inst, {0, 1, 1.0}, 1) == 1);
}

TEST_CASE("property: certificates pass on engine traces", "[certify][property]") {
  testing::Rng rng(60);
  testing::RandomSpec spec;
  spec.n_max = 7;
  int k = 0;
  for (double g : {0.0, 0.5, 1.0})
    for (double eta : {1.0, 1.5, 2.0})
      for (int rep = 0; rep < 12; ++rep, ++k) {
        Instance inst = testing::random_mixed(rng, spec, k);
        Trace tr = run_two_chance(inst, {g, eta}).trace;
        StructuralReport sr = check_structural(inst, tr, g, eta);
        CHECK(sr.ok());
        DualCertificate c = dual_certificate(inst, tr, g, eta);
        const double kappa = (1 + g) / eta;
        for (size_t e = 0; e < c.mu.size(); ++e) {
          const Edge& ed = inst.edges()[e];
          const int p0 = tr.psi[e][0], p1 = tr.psi[e][1];
          CHECK(c.edge_class[e] == (p0 != kNone && p1 != kNone && p0 != p1 ? 2 : 1));
          if (c.edge_class[e] == 1) {
            const int h = c.h_side[e];
            const double dh = inst.d(h == 0 ? ed.h : ed.w, tr.psi[e][h]);
            CHECK(c.mu[e] == Approx(ed.mass * (kappa * tr.alpha[e] - (kappa - 1) * dh)).margin(1e-12));
          }
        }
      }
}

TEST_CASE("property: MFLP traces pass with gamma 1", "[certify][property]") {
  testing::Rng rng(61);
  testing::RandomSpec spec;
  spec.self_edges_only = true;
  for (int k = 0; k < 50; ++k) {
    Instance inst = testing::random_mixed(rng, spec, k);
    Trace tr = run_two_chance(inst, {1.0, 1.0}).trace;
    CHECK(check_structural(inst, tr, 1.0, 1.0).ok());
  }
}

TEST_CASE("property: region extraction and batching stay feasible", "[certify][property]") {
  testing::Rng rng(62);
  testing::RandomSpec spec;
  spec.n_max = 6;
  spec.integral_mass = true;
  for (int k = 0; k < 60; ++k) {
    Instance inst = testing::random_mixed(rng, spec, k);
    const double g = testing::uniform(rng, 0, 1), eta = testing::uniform(rng, 1, 1 + g);
    Trace tr = run_two_chance(inst, {g, eta}).trace;
    ServiceRegion reg;
    reg.facility = testing::uniform_int(rng, 0, inst.n() - 1);
    for (int e = 0; e < static_cast<int>(inst.edges().size()); ++e)
      if (testing::uniform(rng, 0, 1) < 0.7) reg.edges.push_back(e);
    if (reg.edges.empty()) reg.edges.push_back(0);
    RegionSolution rs = wfrp_from_region(inst, tr, g, eta, reg);
    CheckReport r = check_solution(build(ProgramKind::WFRP, rs.params), rs.sol);
    CHECK(r.feasible);
    const int n = testing::uniform_int(rng, 1, 4);
    ProgramParams sp;
    sp.size = n;
    sp.gamma = g;
    sp.eta = eta;
    CheckReport rb = check_solution(build(ProgramKind::SFRP, sp), batch_wfrp_to_sfrp(rs.params, rs.sol, n));
    CHECK(rb.feasible);
    CHECK(rb.objective >= r.objective - 1e-7);
  }
}
