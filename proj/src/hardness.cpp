#include "lflp/hardness.hpp"

#include <fstream>
#include <numeric>
#include <sstream>

namespace lflp {

Instance example1_family(int n0, double eps, double eta) {
  if (n0 < 2) throw Error(ErrorCode::InvalidParams, "n0 must be >= 2");
  if (!(eps > 0.0 && eps < 1.0 / n0)) throw Error(ErrorCode::InvalidParams, "eps must lie in (0, 1/n0)");
  if (!(eta > 0.0) || is_inf(eta)) throw Error(ErrorCode::InvalidParams, "eta must be positive");
  const int n = n0 + 1;
  std::vector<double> dist(static_cast<size_t>(n) * n, 1.0 / eta);
  for (int i = 0; i < n; ++i) dist[static_cast<size_t>(i) * n + i] = 0.0;
  std::vector<double> f(n);
  for (int i = 0; i < n0; ++i) f[i] = 1.0 / (n0 - i) - eps;
  f[n0] = 1.0;
  std::vector<Flow> flows;
  for (int i = 0; i < n0; ++i) flows.push_back({i, n0, 1.0});
  return Instance::from_matrix(n, std::move(dist), flows, std::move(f)).with_metric_flag(true);
}

void VCGraph::validate() const {
  for (double w : weights)
    if (!(w >= 0.0) || is_inf(w)) throw Error(ErrorCode::InvalidParams, "vertex weights must be finite and >= 0");
  for (auto [u, v] : edges) {
    if (u < 0 || v < 0 || u >= n() || v >= n()) throw Error(ErrorCode::InvalidParams, "edge endpoint out of range");
    if (u == v) throw Error(ErrorCode::InvalidParams, "self-loops are not allowed");
  }
}

VCGraph parse_vc_graph(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int declared = -1, max_id = -1, lineno = 0;
  std::vector<std::pair<int, double>> wlines;
  VCGraph g;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue;
    auto fail = [&](const std::string& why) {
      return Error(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": " + why);
    };
    if (first == "w") {
      int id;
      double w;
      if (!(ls >> id >> w)) throw fail("expected 'w id weight'");
      wlines.emplace_back(id, w);
      max_id = std::max(max_id, id);
    } else if (first == "n") {
      if (!(ls >> declared)) throw fail("expected 'n count'");
    } else {
      int u, v;
      try {
        u = std::stoi(first);
      } catch (const std::exception&) {
        throw fail("expected 'u v'");
      }
      if (!(ls >> v)) throw fail("expected 'u v'");
      g.edges.emplace_back(u, v);
      max_id = std::max({max_id, u, v});
    }
  }
  const int n = declared >= 0 ? declared : max_id + 1;
  if (max_id >= n) throw Error(ErrorCode::UnknownId, "vertex id exceeds declared count");
  g.weights.assign(n, 1.0);
  for (auto [id, w] : wlines) {
    if (id < 0) throw Error(ErrorCode::UnknownId, "negative vertex id");
    g.weights[id] = w;
  }
  g.validate();
  return g;
}

VCGraph load_vc_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IO, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_vc_graph(ss.str());
}

Instance vc_to_2lflp(const VCGraph& g, double M) {
  g.validate();
  const double total = std::accumulate(g.weights.begin(), g.weights.end(), 0.0);
  if (!is_inf(M) && !(M >= total + 1.0))
    throw Error(ErrorCode::InvalidParams, "sentinel must be at least total weight + 1");
  const int n = g.n();
  std::vector<double> dist(static_cast<size_t>(n) * n, M);
  for (int i = 0; i < n; ++i) dist[static_cast<size_t>(i) * n + i] = 0.0;
  std::vector<Flow> flows;
  for (auto [u, v] : g.edges) flows.push_back({u, v, 1.0});
  Instance inst = Instance::from_matrix(n, std::move(dist), flows, g.weights);
  return inst.with_metric_flag(!is_inf(M));
}

bool is_vertex_cover(const VCGraph& g, const std::vector<int>& cover) {
  std::vector<char> in(g.n(), 0);
  for (int v : cover)
    if (v >= 0 && v < g.n()) in[v] = 1;
  for (auto [u, v] : g.edges)
    if (!in[u] && !in[v]) return false;
  return true;
}

std::pair<std::vector<int>, double> min_vertex_cover(const VCGraph& g) {
  const int n = g.n();
  if (n > 24) throw Error(ErrorCode::BudgetExceeded, "vertex cover enumeration supports n <= 24");
  double best = kInf;
  unsigned long best_mask = 0;
  for (unsigned long mask = 0; mask < (1UL << n); ++mask) {
    bool ok = true;
    for (auto [u, v] : g.edges)
      if (!((mask >> u) & 1) && !((mask >> v) & 1)) {
        ok = false;
        break;
      }
    if (!ok) continue;
    double w = 0.0;
    for (int v = 0; v < n; ++v)
      if ((mask >> v) & 1) w += g.weights[v];
    if (w < best - kTol) {
      best = w;
      best_mask = mask;
    }
  }
  std::vector<int> cover;
  for (int v = 0; v < n; ++v)
    if ((best_mask >> v) & 1) cover.push_back(v);
  return {cover, is_inf(best) ? 0.0 : best};
}

std::vector<double> shortest_paths(int n, std::vector<double> d) {
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i) {
      const double dik = d[static_cast<size_t>(i) * n + k];
      if (is_inf(dik)) continue;
      for (int j = 0; j < n; ++j) {
        const double via = dik + d[static_cast<size_t>(k) * n + j];
        double& cur = d[static_cast<size_t>(i) * n + j];
        if (via < cur) cur = via;
      }
    }
  return d;
}

Instance lblp_to_instance(const FRSolution& sol, double eps) {
  if (!(eps > 0.0)) throw Error(ErrorCode::InvalidParams, "eps must be positive");
  const int m = static_cast<int>(sol.alpha.size());
  if (m < 1) throw Error(ErrorCode::InfeasibleInput, "empty LBLP solution");
  ProgramParams pp;
  pp.size = m;
  CheckReport rep;
  try {
    rep = check_solution(build(ProgramKind::LBLP, pp), sol);
  } catch (const Error& ex) {
    throw Error(ErrorCode::InfeasibleInput, ex.what());
  }
  if (!rep.feasible)
    throw Error(ErrorCode::InfeasibleInput, "solution violates " + rep.violations.front().name);

  const int n = 4 * m + 1, hub = 4 * m;
  std::vector<double> d(static_cast<size_t>(n) * n, kInf);
  for (int i = 0; i < n; ++i) d[static_cast<size_t>(i) * n + i] = 0.0;
  auto set = [&](int a, int b, double v) {
    d[static_cast<size_t>(a) * n + b] = std::min(d[static_cast<size_t>(a) * n + b], v);
    d[static_cast<size_t>(b) * n + a] = std::min(d[static_cast<size_t>(b) * n + a], v);
  };
  std::vector<double> f(n, kInf);
  for (int i = 0; i < m; ++i) {
    set(i, 2 * m + i, sol.c[i]);
    set(m + i, 3 * m + i, sol.c[i]);
    set(i, hub, sol.d[i]);
    f[2 * m + i] = std::max(0.0, sol.alpha[i] - sol.c[i]);
    f[3 * m + i] = std::max(0.0, sol.alpha[i] - sol.c[i]);
  }
  f[hub] = sol.f + eps;
  std::vector<Flow> flows;
  for (int i = 0; i < m; ++i) flows.push_back({i, m + i, 1.0});
  return Instance::from_matrix(n, shortest_paths(n, std::move(d)), flows, std::move(f));
}

}  // namespace lflp
