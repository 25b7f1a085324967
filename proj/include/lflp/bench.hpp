#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "lflp/engine.hpp"
#include "lflp/gen.hpp"

namespace lflp {

// gamma in {0, .2, ..., 1} crossed with eta in {1, 1 + gamma/2, 1 + gamma},
// duplicates removed.
std::vector<Params> default_grid();

struct BenchConfig {
  std::vector<std::uint64_t> seeds;
  int n = 30;
  double fbar = 20.0;
  double iota = 0.2;
  std::vector<Params> grid = default_grid();
  bool normalize_pruned = true;  // 2-GRP* as the denominator, else 2-GR*
  int workers = 1;
};

struct PolicyCost {
  std::string policy;  // "2GR", "2GRP", "GRH", "GRW"
  double gamma = 0.0, eta = 0.0;  // grid point for 2GR/2GRP, 0 otherwise
  double cost = 0.0;
  int size = 0;
  double ms = 0.0;
};

struct InstanceBench {
  std::uint64_t seed = 0;
  std::vector<PolicyCost> rows;
  double best_gr = kInf;   // 2-GR*
  double best_grp = kInf;  // 2-GRP*
  double grh = kInf, grw = kInf;
  double denom() const;
  bool normalize_pruned = true;
};

struct BenchSummary {
  int instances = 0;
  double mean_norm_gr = 0.0, mean_norm_grp = 0.0, mean_norm_grh = 0.0, mean_norm_grw = 0.0;
  int grp_wins = 0;  // 2-GRP* no worse than both GR-H and GR-W
  int gr_wins = 0;
};

InstanceBench bench_instance(const Instance& inst, const std::vector<Params>& grid,
                             bool normalize_pruned);
// Runs every seed; results come back in seed order whatever the worker count.
std::vector<InstanceBench> run_bench(const BenchConfig& cfg);
BenchSummary summarize(const std::vector<InstanceBench>& results);

void write_bench_csv(const std::vector<InstanceBench>& results, std::ostream& out);
nlohmann::json to_json(const BenchSummary& s);

}  // namespace lflp
