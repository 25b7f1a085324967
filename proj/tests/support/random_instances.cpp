#include "random_instances.hpp"

#include <algorithm>

namespace lflp::testing {

int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

namespace {

std::vector<Flow> random_flows(Rng& rng, int n, const RandomSpec& spec) {
  const int m = uniform_int(rng, 1, spec.max_edges);
  std::vector<Flow> flows;
  for (int k = 0; k < m; ++k) {
    const int h = uniform_int(rng, 0, n - 1);
    const int w = spec.self_edges_only ? h : uniform_int(rng, 0, n - 1);
    const double mass = spec.integral_mass ? uniform_int(rng, 1, 3) : uniform(rng, 0.2, 3.0);
    flows.push_back({h, w, mass});
  }
  return flows;
}

std::vector<double> random_opening(Rng& rng, int n, const RandomSpec& spec) {
  std::vector<double> f(n);
  for (double& x : f) x = uniform(rng, spec.f_lo, spec.f_hi);
  return f;
}

}  // namespace

Instance random_euclidean(Rng& rng, const RandomSpec& spec) {
  const int n = uniform_int(rng, spec.n_min, spec.n_max);
  std::vector<std::pair<double, double>> pts(n);
  for (auto& [x, y] : pts) {
    x = uniform(rng, 0.0, 1.0);
    y = uniform(rng, 0.0, 1.0);
  }
  auto flows = random_flows(rng, n, spec);
  return Instance::from_coords(pts, flows, random_opening(rng, n, spec));
}

Instance random_sentinel(Rng& rng, const RandomSpec& spec) {
  const int n = uniform_int(rng, spec.n_min, spec.n_max);
  const int clusters = uniform_int(rng, 2, 3);
  const double M = 10.0;
  std::vector<int> cl(n);
  std::vector<std::pair<double, double>> pts(n);
  for (int i = 0; i < n; ++i) {
    cl[i] = uniform_int(rng, 0, clusters - 1);
    pts[i] = {uniform(rng, 0.0, 1.0), uniform(rng, 0.0, 1.0)};
  }
  std::vector<double> dist(static_cast<size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      dist[static_cast<size_t>(i) * n + j] =
          i == j ? 0.0
                 : (cl[i] == cl[j] ? std::hypot(pts[i].first - pts[j].first, pts[i].second - pts[j].second)
                                   : M);
  auto flows = random_flows(rng, n, spec);
  return Instance::from_matrix(n, std::move(dist), flows, random_opening(rng, n, spec))
      .with_metric_flag(true);
}

Instance random_mixed(Rng& rng, const RandomSpec& spec, int k) {
  return k % 2 == 0 ? random_euclidean(rng, spec) : random_sentinel(rng, spec);
}

VCGraph random_graph(Rng& rng, int n_max, bool weighted) {
  VCGraph g;
  const int n = uniform_int(rng, 1, n_max);
  g.weights.resize(n);
  for (double& w : g.weights) w = weighted ? uniform_int(rng, 1, 5) : 1.0;
  const double p = uniform(rng, 0.2, 0.7);
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v)
      if (uniform(rng, 0.0, 1.0) < p) g.edges.emplace_back(u, v);
  return g;
}

namespace {

// Mostly uniform, sometimes pinned to an end of the range so the sampler
// visits the boundary of the feasible region.
double frac(Rng& rng) {
  const double u = uniform(rng, 0.0, 1.0);
  if (u < 0.15) return 0.0;
  if (u < 0.3) return 1.0;
  return uniform(rng, 0.0, 1.0);
}

}  // namespace

FRSolution random_sfrp2_point(Rng& rng, double gamma, double eta) {
  for (;;) {
    FRSolution s = FRSolution::zeros(ProgramKind::SFRP, 2);
    const int c11 = tri_index(0, 0), c21 = tri_index(1, 0), c22 = tri_index(1, 1);
    const double u = frac(rng);
    s.q[c11] = u;
    s.q[c21] = 1.0 - u;
    s.q[c22] = 1.0;
    s.alpha[c11] = uniform(rng, 0.0, 1.0);
    s.alpha[c21] = uniform(rng, 0.0, 1.0);
    s.alpha[c22] = std::max(s.alpha[c11], s.alpha[c21]) + frac(rng) * uniform(rng, 0.0, 1.0);
    for (int k : {c11, c21, c22}) {
      s.d[k] = frac(rng) * s.alpha[k];
      s.c[k] = frac(rng) * s.alpha[k];
    }
    for (int k : {c21, c22})
      s.d[k] = std::min(s.alpha[k], std::max(s.d[k], gamma * s.alpha[k] - s.c[c11] - s.d[c11]));
    const double open = s.q[c21] * pos(gamma * s.alpha[c21] - s.d[c21]) +
                        s.q[c22] * pos(gamma * s.alpha[c11] - s.d[c22]);
    s.f = std::max(frac(rng) * uniform(rng, 0.0, 1.0), open / eta);
    double norm = s.f;
    for (int k : {c11, c21, c22}) norm += s.q[k] * s.d[k];
    if (!(norm > 1e-6)) continue;
    s.f /= norm;
    for (int k : {c11, c21, c22}) {
      s.alpha[k] /= norm;
      s.d[k] /= norm;
      s.c[k] /= norm;
    }
    return s;
  }
}

FRSolution random_mflp_point(Rng& rng, int m) {
  for (;;) {
    FRSolution s;
    s.alpha.resize(m);
    s.d.resize(m);
    for (double& a : s.alpha) a = uniform(rng, 0.0, 1.0);
    std::sort(s.alpha.begin(), s.alpha.end());
    for (int l = 0; l < m; ++l) s.d[l] = frac(rng) * s.alpha[l];
    for (int l = 0; l < m; ++l)
      for (int l2 = 0; l2 < m; ++l2)
        if (l != l2 && s.alpha[l2] > s.alpha[l] + s.d[l] + s.d[l2])
          s.d[l2] = s.alpha[l2] - s.alpha[l] - s.d[l];
    double f = 0.0;
    for (int l = 0; l < m; ++l) {
      double sum = 0.0;
      for (int l2 = l; l2 < m; ++l2) sum += pos(s.alpha[l] - s.d[l2]);
      f = std::max(f, sum);
    }
    s.f = f + frac(rng) * uniform(rng, 0.0, 0.5);
    double norm = s.f;
    for (double x : s.d) norm += x;
    if (!(norm > 1e-6)) continue;
    s.f /= norm;
    for (int l = 0; l < m; ++l) {
      s.alpha[l] /= norm;
      s.d[l] /= norm;
    }
    return s;
  }
}

}  // namespace lflp::testing
