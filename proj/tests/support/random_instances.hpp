#pragma once

// Hand-rolled generators for property tests. Every generator takes the rng by
// reference so a suite is reproducible from one seed.

#include <random>
#include <vector>

#include "lflp/frp.hpp"
#include "lflp/hardness.hpp"
#include "lflp/instance.hpp"

namespace lflp::testing {

using Rng = std::mt19937_64;

int uniform_int(Rng& rng, int lo, int hi);  // inclusive
double uniform(Rng& rng, double lo, double hi);

struct RandomSpec {
  int n_min = 2, n_max = 8;
  int max_edges = 12;
  bool integral_mass = false;
  bool self_edges_only = false;  // single-location (MFLP) instances
  double f_lo = 0.05, f_hi = 1.5;
};

// Points uniform in the unit square; Euclidean and metric.
Instance random_euclidean(Rng& rng, const RandomSpec& spec);
// Euclidean clusters with every cross-cluster pair at a finite sentinel
// distance; still metric.
Instance random_sentinel(Rng& rng, const RandomSpec& spec);
// Alternates the two families.
Instance random_mixed(Rng& rng, const RandomSpec& spec, int k);

VCGraph random_graph(Rng& rng, int n_max, bool weighted);

// Random point of SFRP(2, gamma, eta) repaired into feasibility: sampled,
// pushed through the constraints by raising d and f, then normalized.
FRSolution random_sfrp2_point(Rng& rng, double gamma, double eta);

// Random feasible WFRP_MFLP(m) point.
FRSolution random_mflp_point(Rng& rng, int m);

}  // namespace lflp::testing
