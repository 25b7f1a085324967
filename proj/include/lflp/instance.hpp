#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "lflp/common.hpp"

namespace lflp {

// An individual class travelling between home h and work w with mass tau.
struct Edge {
  int h = 0;
  int w = 0;
  double mass = 0.0;
};

struct Flow {
  int h = 0;
  int w = 0;
  double mass = 0.0;
};

// Locations 0..n-1, a symmetric distance matrix (inf allowed), positive edge
// masses and opening costs. Immutable once built.
class Instance {
 public:
  Instance() = default;

  // Validates shape/symmetry, drops zero-mass flows, and merges duplicate
  // (h, w) pairs by summing their masses. Edges end up sorted by (h, w).
  static Instance from_matrix(int n, std::vector<double> dist,
                              const std::vector<Flow>& flows,
                              std::vector<double> opening);
  static Instance from_coords(const std::vector<std::pair<double, double>>& coords,
                              const std::vector<Flow>& flows,
                              std::vector<double> opening);

  int n() const { return n_; }
  double d(int i, int j) const { return dist_[static_cast<size_t>(i) * n_ + j]; }
  const std::vector<double>& dist() const { return dist_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<double>& opening() const { return opening_; }
  double f(int i) const { return opening_[i]; }
  bool metric() const { return metric_; }
  const std::optional<std::vector<std::pair<double, double>>>& coords() const {
    return coords_;
  }

  // Index of edge (h, w), or -1.
  int find_edge(int h, int w) const;

  Instance with_opening(std::vector<double> opening) const;
  Instance with_metric_flag(bool metric) const;

 private:
  int n_ = 0;
  std::vector<double> dist_;
  std::vector<Edge> edges_;
  std::vector<double> opening_;
  bool metric_ = false;
  std::optional<std::vector<std::pair<double, double>>> coords_;
};

struct Solution {
  std::vector<int> opened;  // sorted, unique

  static Solution of(std::vector<int> ids);
  bool contains(int i) const;
  bool operator==(const Solution& o) const { return opened == o.opened; }
};

struct CostReport {
  double opening_cost = 0.0;
  double connection_cost = 0.0;
  double total = 0.0;
  std::vector<int> assignment;  // per edge, -1 when no finite opened facility
  int unserved = 0;             // edges without a finite-distance facility
};

double edge_distance(const Instance& inst, const Edge& e, int i);

CostReport total_cost(const Instance& inst, const Solution& sol);

struct Triple {
  int i, j, k;
  bool operator==(const Triple& o) const { return i == o.i && j == o.j && k == o.k; }
};

// Triples with d(i,k) > d(i,j) + d(j,k) + 1e-9 among finite entries; each
// unordered pair (i,k) is reported with its first witness j, i < k.
std::vector<Triple> check_metric(const Instance& inst);

// JSON encoding; the string "inf" stands for infinity.
nlohmann::json to_json(const Instance& inst);
Instance instance_from_json(const nlohmann::json& j);
Instance load_instance(const std::string& path);
void save_instance(const Instance& inst, const std::string& path);

nlohmann::json real_to_json(double x);
double real_from_json(const nlohmann::json& j);

}  // namespace lflp
