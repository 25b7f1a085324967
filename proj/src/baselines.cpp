#include "lflp/baselines.hpp"

#include <algorithm>

namespace lflp {

ClientInstance edge_expansion(const Instance& inst) {
  ClientInstance ci;
  ci.f = inst.opening();
  for (const Edge& e : inst.edges()) {
    ci.mass.push_back(e.mass);
    std::vector<double> row(inst.n());
    for (int i = 0; i < inst.n(); ++i) row[i] = edge_distance(inst, e, i);
    ci.dist.push_back(std::move(row));
  }
  return ci;
}

namespace {

ClientInstance project(const Instance& inst, bool home) {
  std::vector<double> demand(inst.n(), 0.0);
  for (const Edge& e : inst.edges()) demand[home ? e.h : e.w] += e.mass;
  ClientInstance ci;
  ci.f = inst.opening();
  for (int j = 0; j < inst.n(); ++j) {
    if (demand[j] == 0.0) continue;
    ci.mass.push_back(demand[j]);
    std::vector<double> row(inst.n());
    for (int i = 0; i < inst.n(); ++i) row[i] = inst.d(j, i);
    ci.dist.push_back(std::move(row));
  }
  return ci;
}

double tol_for(double target, double t) { return kTol + 1e-12 * std::max(target, t); }

}  // namespace

ClientInstance project_home(const Instance& inst) { return project(inst, true); }
ClientInstance project_work(const Instance& inst) { return project(inst, false); }

ClientResult jmmsv_clients(const ClientInstance& ci) {
  const int nf = ci.facilities(), nc = ci.clients();
  std::vector<char> in_u(nc, 1), is_open(nf, 0);
  std::vector<double> best_open(nc, kInf);
  std::vector<int> opened;
  ClientResult res;
  res.alpha.assign(nc, 0.0);
  res.served_by.assign(nc, -1);
  int left = nc;
  double t = 0.0;
  long guard = 4L * (nf + nc) * (nf + nc) + nf + 1;

  auto connect = [&](int j, int i) {
    in_u[j] = 0;
    --left;
    res.alpha[j] = t;
    res.served_by[j] = i;
    res.events.push_back({EventKind::Connect, t, i, j, 0});
  };
  auto lhs = [&](int i, double at) {
    double s = 0.0;
    for (int j = 0; j < nc; ++j)
      if (in_u[j]) s += ci.mass[j] * pos(at - ci.dist[j][i]);
    return s;
  };
  auto crossing = [&](int i) {
    const double target = ci.f[i];
    if (is_inf(target)) return kInf;
    std::vector<std::pair<double, double>> bp;
    for (int j = 0; j < nc; ++j)
      if (in_u[j] && !is_inf(ci.dist[j][i])) bp.emplace_back(ci.dist[j][i], ci.mass[j]);
    std::sort(bp.begin(), bp.end());
    double slope = 0.0, offset = 0.0;
    size_t k = 0;
    for (; k < bp.size() && bp[k].first <= t; ++k) {
      slope += bp[k].second;
      offset += bp[k].second * bp[k].first;
    }
    if (slope * t - offset >= target) return t;
    for (;;) {
      const double nb = k < bp.size() ? bp[k].first : kInf;
      if (slope > 0.0) {
        const double cross = (target + offset) / slope;
        if (cross <= nb) return std::max(cross, t);
      }
      if (k == bp.size()) return kInf;
      slope += bp[k].second;
      offset += bp[k].second * bp[k].first;
      ++k;
    }
  };

  while (left > 0) {
    if (--guard < 0) throw Error(ErrorCode::NonTermination, "jmmsv batch guard exceeded");
    double next = kInf;
    for (int j = 0; j < nc; ++j)
      if (in_u[j]) next = std::min(next, best_open[j]);
    for (int i = 0; i < nf; ++i)
      if (!is_open[i]) next = std::min(next, crossing(i));
    if (is_inf(next)) throw Error(ErrorCode::NonTermination, "no event can fire while clients remain");
    t = std::max(t, next);

    std::vector<std::pair<int, int>> hits;
    for (int j = 0; j < nc; ++j) {
      if (!in_u[j] || best_open[j] > t + kTol) continue;
      int who = -1;
      for (int i : opened)
        if (ci.dist[j][i] <= t + kTol && (who < 0 || i < who)) who = i;
      hits.emplace_back(who, j);
    }
    std::sort(hits.begin(), hits.end());
    for (auto [i, j] : hits) connect(j, i);

    for (;;) {
      int pick = -1;
      for (int i = 0; i < nf && pick < 0; ++i)
        if (!is_open[i] && !is_inf(ci.f[i]) && lhs(i, t) >= ci.f[i] - tol_for(ci.f[i], t)) pick = i;
      if (pick < 0) break;
      is_open[pick] = 1;
      opened.push_back(pick);
      res.events.push_back({EventKind::Open, t, pick, -1, -1});
      for (int j = 0; j < nc; ++j) {
        if (in_u[j] && ci.dist[j][pick] <= t + kTol) connect(j, pick);
        best_open[j] = std::min(best_open[j], ci.dist[j][pick]);
      }
    }
  }
  res.solution = Solution::of(opened);
  return res;
}

EngineResult jmmsv(const Instance& inst) {
  ClientResult cr = jmmsv_clients(edge_expansion(inst));
  EngineResult res;
  res.solution = cr.solution;
  res.cost = total_cost(inst, cr.solution);
  Trace& tr = res.trace;
  tr.K = 1;
  tr.events = cr.events;
  tr.alpha = cr.alpha;
  for (const Event& ev : tr.events) tr.termination = std::max(tr.termination, ev.t);
  for (size_t j = 0; j < cr.alpha.size(); ++j) {
    tr.psi.push_back({cr.served_by[j]});
    tr.connect_time.push_back({cr.alpha[j]});
  }
  return res;
}

PolicyResult gr_home(const Instance& inst) {
  Solution sol = jmmsv_clients(project_home(inst)).solution;
  return {sol, total_cost(inst, sol)};
}

PolicyResult gr_work(const Instance& inst) {
  Solution sol = jmmsv_clients(project_work(inst)).solution;
  return {sol, total_cost(inst, sol)};
}

Solution myopic_prune(const Instance& inst, const Solution& sol) {
  Solution cur = sol;
  double cost = total_cost(inst, cur).total;
  for (;;) {
    int drop = -1;
    double gain = kTol;
    for (size_t k = 0; k < cur.opened.size(); ++k) {
      std::vector<int> rest = cur.opened;
      rest.erase(rest.begin() + static_cast<long>(k));
      const double c = total_cost(inst, Solution{rest}).total;
      if (is_inf(c)) continue;
      const double g = is_inf(cost) ? kInf : cost - c;
      if (g > gain) {
        gain = g;
        drop = static_cast<int>(k);
      }
    }
    if (drop < 0) return cur;
    cur.opened.erase(cur.opened.begin() + drop);
    cost = total_cost(inst, cur).total;
  }
}

namespace {

struct Enumerator {
  const Instance& inst;
  int n, m;
  std::vector<double> opening;
  // dist[i * m + e] = d(e, i)
  std::vector<double> dist;
  std::vector<std::vector<double>> best;  // per depth
  std::vector<int> current, best_set;
  double best_cost = kInf;
  bool found = false;

  double conn(const std::vector<double>& b) const {
    double s = 0.0;
    const auto& edges = inst.edges();
    for (int e = 0; e < m; ++e) {
      if (is_inf(b[e])) return kInf;
      s += edges[e].mass * b[e];
    }
    return s;
  }

  void visit(int depth, double open_cost) {
    const double c = open_cost + conn(best[depth]);
    const double slack = 1e-9 * std::max(1.0, std::abs(best_cost));
    bool better;
    if (!found)
      better = true;
    else if (is_inf(c))
      better = false;
    else if (is_inf(best_cost))
      better = true;
    else
      better = c < best_cost - slack;
    if (better) {
      best_cost = c;
      best_set = current;
      found = true;
    }
    const int start = current.empty() ? 0 : current.back() + 1;
    for (int i = start; i < n; ++i) {
      if (is_inf(inst.f(i))) continue;
      if (static_cast<int>(best.size()) <= depth + 1) best.emplace_back(m);
      auto& nb = best[depth + 1];
      const auto& ob = best[depth];
      const double* row = &dist[static_cast<size_t>(i) * m];
      for (int e = 0; e < m; ++e) nb[e] = std::min(ob[e], row[e]);
      current.push_back(i);
      visit(depth + 1, open_cost + inst.f(i));
      current.pop_back();
    }
  }
};

}  // namespace

PolicyResult brute_force_opt(const Instance& inst) {
  if (inst.n() > kBruteForceMaxN)
    throw Error(ErrorCode::BudgetExceeded,
                "brute force supports n <= " + std::to_string(kBruteForceMaxN));
  Enumerator en{inst, inst.n(), static_cast<int>(inst.edges().size()), inst.opening(), {}, {}, {}, {}};
  en.dist.assign(static_cast<size_t>(en.n) * en.m, kInf);
  for (int i = 0; i < en.n; ++i)
    for (int e = 0; e < en.m; ++e)
      en.dist[static_cast<size_t>(i) * en.m + e] = edge_distance(inst, inst.edges()[e], i);
  en.best.emplace_back(en.m, kInf);
  en.visit(0, 0.0);
  Solution sol{en.best_set};
  return {sol, total_cost(inst, sol)};
}

}  // namespace lflp
