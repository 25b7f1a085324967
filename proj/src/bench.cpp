#include "lflp/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <ostream>
#include <thread>

#include "lflp/baselines.hpp"

namespace lflp {

std::vector<Params> default_grid() {
  std::vector<Params> grid;
  for (int k = 0; k <= 5; ++k) {
    const double g = 0.2 * k;
    for (double e : {1.0, 1.0 + 0.5 * g, 1.0 + g}) {
      const bool dup = std::any_of(grid.begin(), grid.end(), [&](const Params& p) {
        return std::abs(p.gamma - g) < kTol && std::abs(p.eta - e) < kTol;
      });
      if (!dup) grid.push_back({g, e});
    }
  }
  return grid;
}

double InstanceBench::denom() const { return normalize_pruned ? best_grp : best_gr; }

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

}  // namespace

InstanceBench bench_instance(const Instance& inst, const std::vector<Params>& grid,
                             bool normalize_pruned) {
  InstanceBench b;
  b.normalize_pruned = normalize_pruned;
  for (const Params& p : grid) {
    auto t0 = Clock::now();
    const EngineResult r = run_two_chance(inst, p);
    b.rows.push_back({"2GR", p.gamma, p.eta, r.cost.total, static_cast<int>(r.solution.opened.size()),
                      ms_since(t0)});
    b.best_gr = std::min(b.best_gr, r.cost.total);
    t0 = Clock::now();
    const Solution pruned = myopic_prune(inst, r.solution);
    const double pc = total_cost(inst, pruned).total;
    b.rows.push_back({"2GRP", p.gamma, p.eta, pc, static_cast<int>(pruned.opened.size()),
                      b.rows.back().ms + ms_since(t0)});
    b.best_grp = std::min(b.best_grp, pc);
  }
  auto t0 = Clock::now();
  const PolicyResult h = gr_home(inst);
  b.rows.push_back({"GRH", 0.0, 0.0, h.cost.total, static_cast<int>(h.solution.opened.size()), ms_since(t0)});
  b.grh = h.cost.total;
  t0 = Clock::now();
  const PolicyResult w = gr_work(inst);
  b.rows.push_back({"GRW", 0.0, 0.0, w.cost.total, static_cast<int>(w.solution.opened.size()), ms_since(t0)});
  b.grw = w.cost.total;
  return b;
}

std::vector<InstanceBench> run_bench(const BenchConfig& cfg) {
  std::vector<InstanceBench> out(cfg.seeds.size());
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t k = next++; k < cfg.seeds.size(); k = next++) {
      SynthConfig sc;
      sc.n = cfg.n;
      sc.seed = cfg.seeds[k];
      sc.fbar = cfg.fbar;
      sc.iota = cfg.iota;
      out[k] = bench_instance(gen_synthetic(sc), cfg.grid, cfg.normalize_pruned);
      out[k].seed = cfg.seeds[k];
    }
  };
  const int workers = std::max(1, cfg.workers);
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return out;
}

BenchSummary summarize(const std::vector<InstanceBench>& results) {
  BenchSummary s;
  for (const auto& b : results) {
    const double den = b.denom();
    if (!(den > 0.0) || is_inf(den)) continue;
    ++s.instances;
    s.mean_norm_gr += b.best_gr / den;
    s.mean_norm_grp += b.best_grp / den;
    s.mean_norm_grh += b.grh / den;
    s.mean_norm_grw += b.grw / den;
    const double rival = std::min(b.grh, b.grw);
    const double slack = kTol * std::max(1.0, rival);
    if (b.best_grp <= rival + slack) ++s.grp_wins;
    if (b.best_gr <= rival + slack) ++s.gr_wins;
  }
  if (s.instances > 0) {
    s.mean_norm_gr /= s.instances;
    s.mean_norm_grp /= s.instances;
    s.mean_norm_grh /= s.instances;
    s.mean_norm_grw /= s.instances;
  }
  return s;
}

void write_bench_csv(const std::vector<InstanceBench>& results, std::ostream& out) {
  out << "seed,policy,gamma,eta,cost,normalized,size,ms\n";
  for (const auto& b : results) {
    const double den = b.denom();
    for (const auto& r : b.rows)
      out << b.seed << ',' << r.policy << ',' << r.gamma << ',' << r.eta << ',' << r.cost << ','
          << r.cost / den << ',' << r.size << ',' << r.ms << '\n';
  }
}

nlohmann::json to_json(const BenchSummary& s) {
  return {{"instances", s.instances},         {"mean_normalized_2GR", s.mean_norm_gr},
          {"mean_normalized_2GRP", s.mean_norm_grp}, {"mean_normalized_GRH", s.mean_norm_grh},
          {"mean_normalized_GRW", s.mean_norm_grw}, {"wins_2GRP", s.grp_wins},
          {"wins_2GR", s.gr_wins}};
}

}  // namespace lflp
