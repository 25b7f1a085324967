#include "lflp/certify.hpp"

#include <algorithm>
#include <numeric>

namespace lflp {

namespace {

int loc(const Edge& e, int side) { return side == 0 ? e.h : e.w; }

void require_two_sided(const Instance& inst, const Trace& tr) {
  const size_t m = inst.edges().size();
  if (tr.K != 2 || tr.alpha.size() != m || tr.psi.size() != m || tr.connect_time.size() != m)
    throw Error(ErrorCode::ShapeMismatch, "trace does not match a two-location run on this instance");
}

}  // namespace

int sigma_side(const Instance& inst, const Edge& e, int i) {
  return inst.d(e.w, i) < inst.d(e.h, i) ? 1 : 0;
}

StructuralReport check_structural(const Instance& inst, const Trace& tr, double gamma, double eta,
                                  double tol) {
  require_two_sided(inst, tr);
  StructuralReport rep;
  const auto& edges = inst.edges();
  const int m = static_cast<int>(edges.size());
  const int n = inst.n();

  // Every edge connects at least once before termination.
  for (int e = 0; e < m; ++e) {
    ++rep.checks;
    if (tr.psi[e][0] == kNone && tr.psi[e][1] == kNone)
      rep.violations.push_back({"connected", -1, e, -1, -1, -1, tr.alpha[e], tr.termination});
  }

  // (iii)
  for (int e = 0; e < m; ++e)
    for (int L = 0; L < 2; ++L) {
      const int p = tr.psi[e][L];
      if (p == kNone) continue;
      ++rep.checks;
      const double lhs = inst.d(loc(edges[e], L), p);
      if (lhs > tr.alpha[e] + tol) rep.violations.push_back({"iii", p, e, L, -1, -1, lhs, tr.alpha[e]});
    }

  // (i): sides sorted by Y; for each earlier side, the worst later side.
  struct SideRef {
    double y;
    int e, L;
  };
  std::vector<SideRef> sides;
  for (int e = 0; e < m; ++e)
    for (int L = 0; L < 2; ++L) sides.push_back({tr.connect_time[e][L], e, L});
  std::sort(sides.begin(), sides.end(), [](const SideRef& a, const SideRef& b) {
    if (a.y != b.y) return a.y < b.y;
    if (a.e != b.e) return a.e < b.e;
    return a.L < b.L;
  });
  const int S = static_cast<int>(sides.size());
  std::vector<double> suffix(S + 1);
  std::vector<int> arg(S + 1);
  for (int i = 0; i < n; ++i) {
    suffix[S] = -kInf;
    arg[S] = -1;
    for (int s = S - 1; s >= 0; --s) {
      const auto& sr = sides[s];
      const double v = gamma * tr.alpha[sr.e] - inst.d(loc(edges[sr.e], sr.L), i);
      if (v >= suffix[s + 1]) {
        suffix[s] = v;
        arg[s] = s;
      } else {
        suffix[s] = suffix[s + 1];
        arg[s] = arg[s + 1];
      }
    }
    for (int s = 0; s < S; ++s) {
      const auto& sr = sides[s];
      const double bound = sr.y + kTol;
      const int first = static_cast<int>(
          std::upper_bound(sides.begin(), sides.end(), bound,
                           [](double y, const SideRef& r) { return y < r.y; }) -
          sides.begin());
      if (first >= S) continue;
      ++rep.checks;
      const int p = tr.psi[sr.e][sr.L];
      const auto& later = sides[arg[first]];
      if (p == kNone) {
        rep.violations.push_back({"i", i, sr.e, sr.L, later.e, later.L, 0.0, 0.0});
        continue;
      }
      const int x = loc(edges[sr.e], sr.L);
      const double rhs = inst.d(x, p) + inst.d(x, i);
      // gamma*alpha(e') <= rhs + d(e'_L', i) with inf-safe comparison.
      if (is_inf(rhs)) continue;
      if (suffix[first] > rhs + tol) {
        const double d2 = inst.d(loc(edges[later.e], later.L), i);
        rep.violations.push_back(
            {"i", i, sr.e, sr.L, later.e, later.L, gamma * tr.alpha[later.e], rhs + d2});
      }
    }
  }

  // (ii)
  for (int i = 0; i < n; ++i) {
    const double cap = eta * inst.f(i);
    if (is_inf(cap)) continue;
    std::vector<double> chi(m), dsig(m);
    for (int e = 0; e < m; ++e) {
      const int s = sigma_side(inst, edges[e], i);
      chi[e] = tr.connect_time[e][s];
      dsig[e] = inst.d(loc(edges[e], s), i);
    }
    for (int e = 0; e < m; ++e) {
      ++rep.checks;
      double sum = 0.0;
      for (int e2 = 0; e2 < m; ++e2) {
        if (chi[e2] < chi[e] - kTol) continue;
        sum += edges[e2].mass * pos(gamma * std::min(tr.alpha[e], tr.alpha[e2]) - dsig[e2]);
      }
      if (sum > cap + tol) rep.violations.push_back({"ii", i, e, -1, -1, -1, sum, cap});
    }
  }
  return rep;
}

void require_structural(const Instance& inst, const Trace& trace, double gamma, double eta,
                        double tol) {
  auto rep = check_structural(inst, trace, gamma, eta, tol);
  if (!rep.ok())
    throw Error(ErrorCode::ViolationFound, to_json(rep.violations.front()).dump());
}

nlohmann::json to_json(const StructuralViolation& v) {
  return {{"item", v.item},   {"facility", v.facility}, {"edge", v.edge}, {"side", v.side},
          {"edge2", v.edge2}, {"side2", v.side2},       {"lhs", v.lhs},   {"rhs", v.rhs}};
}

DualCertificate dual_certificate(const Instance& inst, const Trace& tr, double gamma, double eta,
                                 double tol) {
  require_two_sided(inst, tr);
  const auto& edges = inst.edges();
  const int m = static_cast<int>(edges.size());
  const double kappa = (1.0 + gamma) / eta;
  DualCertificate cert;
  cert.mu.assign(m, 0.0);
  cert.edge_class.assign(m, 1);
  cert.h_side.assign(m, -1);
  std::vector<int> opened = tr.opened();
  cert.cost = total_cost(inst, Solution::of(opened)).total;
  for (int e = 0; e < m; ++e) {
    const int p0 = tr.psi[e][0], p1 = tr.psi[e][1];
    const double d0 = p0 == kNone ? kInf : inst.d(edges[e].h, p0);
    const double d1 = p1 == kNone ? kInf : inst.d(edges[e].w, p1);
    const double tau = edges[e].mass, a = tr.alpha[e];
    if (p0 != kNone && p1 != kNone && p0 != p1) {
      cert.edge_class[e] = 2;
      const int h = d1 < d0 ? 1 : 0;
      const double dh = h == 0 ? d0 : d1, dw = h == 0 ? d1 : d0;
      cert.h_side[e] = h;
      cert.mu[e] = tau * (kappa * a - (dh + dw) / eta + dh);
    } else {
      int h = -1;
      if (p0 != kNone && p1 != kNone)
        h = d1 < d0 ? 1 : 0;
      else if (p0 != kNone)
        h = 0;
      else if (p1 != kNone)
        h = 1;
      cert.h_side[e] = h;
      const double dh = h == 0 ? d0 : (h == 1 ? d1 : 0.0);
      cert.mu[e] = tau * (kappa * a - (kappa - 1.0) * dh);
    }
    cert.total += cert.mu[e];
  }
  if (cert.total < cert.cost - tol * std::max(1.0, std::abs(cert.cost)))
    throw Error(ErrorCode::CertificateFailure,
                "dual sum " + std::to_string(cert.total) + " below cost " + std::to_string(cert.cost));
  return cert;
}

RegionSolution wfrp_from_region(const Instance& inst, const Trace& tr, double gamma, double eta,
                                const ServiceRegion& region) {
  require_two_sided(inst, tr);
  const auto& edges = inst.edges();
  const int i = region.facility;
  if (i < 0 || i >= inst.n()) throw Error(ErrorCode::InvalidParams, "region facility out of range");
  if (region.edges.empty()) throw Error(ErrorCode::InvalidParams, "region needs at least one edge");

  struct Copy {
    int e;
    double chi, alpha, d, c;
  };
  std::vector<Copy> copies;
  for (int e : region.edges) {
    if (e < 0 || e >= static_cast<int>(edges.size()))
      throw Error(ErrorCode::InvalidParams, "region edge out of range");
    const double tau = edges[e].mass;
    const double r = std::round(tau);
    if (std::abs(tau - r) > kTol || r < 1)
      throw Error(ErrorCode::NonIntegralMass, "edge mass " + std::to_string(tau) + " is not integral");
    const int s = sigma_side(inst, edges[e], i);
    const int other = 1 - s;
    double c;
    if (tr.psi[e][s] != kNone)
      c = inst.d(loc(edges[e], s), tr.psi[e][s]);
    else if (tr.psi[e][other] != kNone)
      c = inst.d(loc(edges[e], other), tr.psi[e][other]);
    else
      c = 0.0;
    const Copy cp{e, tr.connect_time[e][s], tr.alpha[e], inst.d(loc(edges[e], s), i), c};
    for (long k = 0; k < static_cast<long>(r); ++k) copies.push_back(cp);
  }

  double denom = inst.f(i);
  for (const Copy& cp : copies) denom += cp.d;
  if (!(denom > 0.0) || is_inf(denom))
    throw Error(ErrorCode::DegenerateRegion, "normalization denominator is zero or unbounded");

  // Event times that differ only by rounding are treated as simultaneous.
  std::vector<double> ys;
  for (const Copy& cp : copies) ys.push_back(cp.chi);
  std::sort(ys.begin(), ys.end());
  std::vector<double> reps;
  for (double y : ys)
    if (reps.empty() || y > reps.back() + kTol) reps.push_back(y);
  auto snap = [&](double y) {
    auto it = std::upper_bound(reps.begin(), reps.end(), y + kTol);
    return *(it - 1);
  };

  RegionSolution out;
  out.N = 1.0 / denom;
  out.params.size = static_cast<int>(copies.size());
  out.params.gamma = gamma;
  out.params.eta = eta;
  out.sol.f = out.N * inst.f(i);
  for (const Copy& cp : copies) {
    out.params.chi.push_back(snap(cp.chi));
    out.sol.alpha.push_back(out.N * cp.alpha);
    out.sol.d.push_back(out.N * cp.d);
    out.sol.c.push_back(out.N * cp.c);
    out.source_edge.push_back(cp.e);
  }
  return out;
}

}  // namespace lflp
