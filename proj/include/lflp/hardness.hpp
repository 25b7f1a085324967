#pragma once

#include <string>
#include <utility>
#include <vector>

#include "lflp/frp.hpp"
#include "lflp/instance.hpp"

namespace lflp {

// n0 homes with decreasing-harmonic opening costs plus one shared work hub at
// index n0; every pair of distinct locations is 1/eta apart.
Instance example1_family(int n0, double eps, double eta);

struct VCGraph {
  std::vector<double> weights;
  std::vector<std::pair<int, int>> edges;

  int n() const { return static_cast<int>(weights.size()); }
  void validate() const;
};

// Text format: "u v" per edge, "w id weight" per vertex weight, '#' comments.
// Vertices default to weight 1; an optional "n N" line fixes the vertex count.
VCGraph parse_vc_graph(const std::string& text);
VCGraph load_vc_graph(const std::string& path);

// One unit edge per graph edge, f = weights, distinct locations M apart
// (M = inf allowed; finite M must be at least the total weight plus one).
Instance vc_to_2lflp(const VCGraph& g, double M);

bool is_vertex_cover(const VCGraph& g, const std::vector<int>& cover);
// Exact minimum-weight vertex cover by enumeration (n <= 24).
std::pair<std::vector<int>, double> min_vertex_cover(const VCGraph& g);

// The 4m+1 location instance built from a feasible LBLP(m) solution.
// Locations 0..m-1 are homes, m..2m-1 works, 2m+i and 3m+i the private
// facilities next to home i and work i, and 4m the shared hub.
Instance lblp_to_instance(const FRSolution& sol, double eps);

// All-pairs shortest paths over a symmetric matrix (inf = no edge).
std::vector<double> shortest_paths(int n, std::vector<double> dist);

}  // namespace lflp
