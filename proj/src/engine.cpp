#include "lflp/engine.hpp"

#include <algorithm>
#include <istream>
#include <numeric>
#include <ostream>

namespace lflp {

namespace {

// Walks growing terms in ascending d and returns the first t >= t_now where
// frozen + sum mass*(t - d)^+ reaches target. next(d, mass) yields the next
// breakpoint and returns false when exhausted.
template <class Next>
double walk_crossing(double t_now, double frozen, double target, Next next) {
  if (is_inf(target)) return kInf;
  double slope = 0.0, offset = 0.0;  // value(t) = slope * t - offset + frozen
  double d = 0.0, mass = 0.0;
  bool pending = next(d, mass);
  while (pending && d <= t_now) {
    slope += mass;
    offset += mass * d;
    pending = next(d, mass);
  }
  if (slope * t_now - offset + frozen >= target) return t_now;
  for (;;) {
    const double nb = pending ? d : kInf;
    if (slope > 0.0) {
      const double cross = (target - frozen + offset) / slope;
      if (cross <= nb) return std::max(cross, t_now);
    }
    if (!pending) return kInf;
    slope += mass;
    offset += mass * d;
    pending = next(d, mass);
  }
}

double decision_tol(double target, double t) {
  return kTol + 1e-12 * std::max(target, t);
}

}  // namespace

void Params::validate() const {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw Error(ErrorCode::InvalidParams, "gamma must lie in [0,1]");
  if (!(eta > 0.0) || is_inf(eta)) throw Error(ErrorCode::InvalidParams, "eta must be positive and finite");
}

bool Params::outside_theory_range() const {
  return eta < 1.0 - kTol || eta > 1.0 + gamma + kTol;
}

std::vector<int> Trace::opened() const {
  std::vector<int> out;
  for (const Event& ev : events)
    if (ev.kind == EventKind::Open) out.push_back(ev.facility);
  return out;
}

SideMap SideMap::two_location(const Instance& inst) {
  SideMap sm;
  sm.K = 2;
  for (const Edge& e : inst.edges()) sm.sides.push_back({e.h, e.w});
  return sm;
}

SideMap SideMap::home_only(const Instance& inst) {
  SideMap sm;
  sm.K = 1;
  for (const Edge& e : inst.edges()) sm.sides.push_back({e.h});
  return sm;
}

std::vector<double> canonical_discounts(int K) {
  if (K < 1) throw Error(ErrorCode::InvalidParams, "K must be >= 1");
  std::vector<double> g(K + 1, 1.0);
  g[K] = 0.0;
  return g;
}

void validate_discounts(const std::vector<double>& g, int K) {
  if (K < 1) throw Error(ErrorCode::InvalidParams, "K must be >= 1");
  if (static_cast<int>(g.size()) != K + 1)
    throw Error(ErrorCode::InvalidParams, "need K+1 discounts");
  if (g[0] != 1.0 || g[K] != 0.0)
    throw Error(ErrorCode::InvalidParams, "discounts must start at 1 and end at 0");
  for (int k = 1; k <= K; ++k)
    if (g[k] > g[k - 1] || g[k] < 0.0)
      throw Error(ErrorCode::InvalidParams, "discounts must be nonincreasing in [0,1]");
}

CostReport hyper_cost(const Instance& inst, const SideMap& sm, const Solution& sol) {
  CostReport rep;
  for (int i : sol.opened) rep.opening_cost += inst.f(i);
  const auto& edges = inst.edges();
  rep.assignment.assign(edges.size(), -1);
  for (size_t e = 0; e < edges.size(); ++e) {
    double best = kInf;
    for (int i : sol.opened) {
      double v = kInf;
      for (int loc : sm.sides[e]) v = std::min(v, inst.d(loc, i));
      if (v < best) {
        best = v;
        rep.assignment[e] = i;
      }
    }
    if (is_inf(best)) {
      ++rep.unserved;
      rep.assignment[e] = -1;
      rep.connection_cost = kInf;
    } else {
      rep.connection_cost += edges[e].mass * best;
    }
  }
  rep.total = rep.opening_cost + rep.connection_cost;
  return rep;
}

double lhs_crossing_time(double t_now, double frozen, const std::vector<Breakpoint>& sorted,
                         double target) {
  size_t k = 0;
  return walk_crossing(t_now, frozen, target, [&](double& d, double& mass) {
    if (k == sorted.size()) return false;
    d = sorted[k].d;
    mass = sorted[k].mass;
    ++k;
    return true;
  });
}

ChanceProcess::ChanceProcess(const Instance& inst, const SideMap& sides,
                             std::vector<double> discounts, double eta)
    : inst_(&inst), sides_(sides), disc_(std::move(discounts)), eta_(eta) {
  validate_discounts(disc_, sides_.K);
  if (!(eta > 0.0) || is_inf(eta)) throw Error(ErrorCode::InvalidParams, "eta must be positive and finite");
  n_ = inst.n();
  m_ = static_cast<int>(inst.edges().size());
  if (static_cast<int>(sides_.sides.size()) != m_)
    throw Error(ErrorCode::InvalidParams, "side map must cover every edge");
  for (const auto& s : sides_.sides) {
    if (static_cast<int>(s.size()) != sides_.K)
      throw Error(ErrorCode::InvalidParams, "every edge needs K locations");
    for (int loc : s)
      if (loc < 0 || loc >= n_) throw Error(ErrorCode::InvalidParams, "side location out of range");
  }

  dmin_.assign(static_cast<size_t>(n_) * m_, kInf);
  order_.resize(n_);
  for (int i = 0; i < n_; ++i) {
    for (int e = 0; e < m_; ++e) {
      double v = kInf;
      for (int L = 0; L < sides_.K; ++L) v = std::min(v, side_dist(e, L, i));
      dmin_[static_cast<size_t>(i) * m_ + e] = v;
      if (!is_inf(v)) order_[i].push_back(e);
    }
    const double* row = &dmin_[static_cast<size_t>(i) * m_];
    std::stable_sort(order_[i].begin(), order_[i].end(),
                     [row](int a, int b) { return row[a] < row[b]; });
  }
  in_u_.assign(m_, 1);
  nconn_.assign(m_, 0);
  best_open_.assign(m_, kInf);
  is_open_.assign(n_, 0);
  n_unconnected_ = m_;

  trace_.K = sides_.K;
  trace_.alpha.assign(m_, 0.0);
  trace_.psi.assign(m_, std::vector<int>(sides_.K, kNone));
  trace_.connect_time.assign(m_, std::vector<double>(sides_.K, kInf));
}

double ChanceProcess::side_dist(int e, int L, int i) const {
  return inst_->d(sides_.sides[e][L], i);
}

double ChanceProcess::next_event_a_time() const {
  double ta = kInf;
  for (int e = 0; e < m_; ++e)
    if (in_u_[e]) ta = std::min(ta, best_open_[e]);
  return ta;
}

double ChanceProcess::opening_lhs(int i, double t) const {
  const auto& edges = inst_->edges();
  const double* row = &dmin_[static_cast<size_t>(i) * m_];
  double lhs = 0.0;
  for (int e = 0; e < m_; ++e) {
    if (in_u_[e]) {
      lhs += edges[e].mass * pos(t - row[e]);
    } else if (nconn_[e] < sides_.K) {
      double dl = kInf;
      for (int L = 0; L < sides_.K; ++L)
        if (trace_.psi[e][L] == kNone) dl = std::min(dl, side_dist(e, L, i));
      lhs += edges[e].mass * pos(disc_[nconn_[e]] * trace_.alpha[e] - dl);
    }
  }
  return lhs;
}

double ChanceProcess::next_event_b_time(int i) const {
  const auto& edges = inst_->edges();
  const double target = eta_ * inst_->f(i);
  if (is_inf(target)) return kInf;
  double frozen = 0.0;
  for (int e = 0; e < m_; ++e) {
    if (in_u_[e] || nconn_[e] == sides_.K) continue;
    const double g = disc_[nconn_[e]];
    if (g == 0.0) continue;
    double dl = kInf;
    for (int L = 0; L < sides_.K; ++L)
      if (trace_.psi[e][L] == kNone) dl = std::min(dl, side_dist(e, L, i));
    frozen += edges[e].mass * pos(g * trace_.alpha[e] - dl);
  }
  const auto& ord = order_[i];
  const double* row = &dmin_[static_cast<size_t>(i) * m_];
  size_t k = 0;
  return walk_crossing(t_, frozen, target, [&](double& d, double& mass) {
    while (k < ord.size() && !in_u_[ord[k]]) ++k;
    if (k == ord.size()) return false;
    d = row[ord[k]];
    mass = edges[ord[k]].mass;
    ++k;
    return true;
  });
}

void ChanceProcess::connect(int e, int L, int i, double t) {
  trace_.psi[e][L] = i;
  trace_.connect_time[e][L] = t;
  ++nconn_[e];
  trace_.events.push_back({EventKind::Connect, t, i, e, L});
}

void ChanceProcess::remove_from_u(int e, int i, double t) {
  in_u_[e] = 0;
  --n_unconnected_;
  trace_.alpha[e] = t;
  for (int L = 0; L < sides_.K; ++L)
    if (side_dist(e, L, i) <= t + kTol) connect(e, L, i, t);
}

void ChanceProcess::open(int i, double t) {
  is_open_[i] = 1;
  opened_.push_back(i);
  trace_.events.push_back({EventKind::Open, t, i, -1, -1});
  for (int e = 0; e < m_; ++e) {
    if (in_u_[e] || nconn_[e] == sides_.K) continue;
    const double g = disc_[nconn_[e]];
    for (int L = 0; L < sides_.K; ++L) {
      if (trace_.psi[e][L] != kNone) continue;
      const double dl = side_dist(e, L, i);
      if (!is_inf(dl) && g * trace_.alpha[e] >= dl - kTol) connect(e, L, i, t);
    }
  }
  const double* row = &dmin_[static_cast<size_t>(i) * m_];
  for (int e = 0; e < m_; ++e) {
    if (in_u_[e] && row[e] <= t + kTol) remove_from_u(e, i, t);
    best_open_[e] = std::min(best_open_[e], row[e]);
  }
}

void ChanceProcess::process_instant(double t) {
  t_ = t;
  // Event (a): ascending facility, then ascending edge.
  std::vector<std::pair<int, int>> hits;
  for (int e = 0; e < m_; ++e) {
    if (!in_u_[e] || best_open_[e] > t + kTol) continue;
    int who = -1;
    for (int i : opened_)
      if (dmin_[static_cast<size_t>(i) * m_ + e] <= t + kTol && (who < 0 || i < who)) who = i;
    hits.emplace_back(who, e);
  }
  std::sort(hits.begin(), hits.end());
  for (auto [i, e] : hits) remove_from_u(e, i, t);

  // Event (b): one opening at a time, lowest index first, re-checked after each.
  for (;;) {
    int pick = -1;
    for (int i = 0; i < n_ && pick < 0; ++i) {
      if (is_open_[i]) continue;
      const double target = eta_ * inst_->f(i);
      if (is_inf(target)) continue;
      if (opening_lhs(i, t) >= target - decision_tol(target, t)) pick = i;
    }
    if (pick < 0) break;
    open(pick, t);
  }
}

void ChanceProcess::step() {
  if (done()) return;
  double next = next_event_a_time();
  for (int i = 0; i < n_; ++i)
    if (!is_open_[i]) next = std::min(next, next_event_b_time(i));
  if (is_inf(next))
    throw Error(ErrorCode::NonTermination, "no event can fire while edges remain unconnected");
  const long guard = 4L * n_ * n_ + n_;
  if (++batches_ >= guard && guard > 0)
    throw Error(ErrorCode::NonTermination, "event batch guard exceeded");
  process_instant(std::max(t_, next));
}

void ChanceProcess::run() {
  while (!done()) step();
}

EngineResult ChanceProcess::result() const {
  EngineResult res;
  res.trace = trace_;
  res.trace.termination = t_;
  for (auto& row : res.trace.connect_time)
    for (double& y : row)
      if (is_inf(y)) y = t_;
  res.solution = Solution::of(opened_);
  res.cost = hyper_cost(*inst_, sides_, res.solution);
  return res;
}

EngineResult run_k_chance(const Instance& inst, int K, const std::vector<double>& discounts,
                          double eta, const SideMap& side_map) {
  if (side_map.K != K) throw Error(ErrorCode::InvalidParams, "side map K mismatch");
  ChanceProcess proc(inst, side_map, discounts, eta);
  proc.run();
  EngineResult res = proc.result();
  res.eta_warning = eta < 1.0 - kTol || eta > K + kTol;
  return res;
}

EngineResult run_two_chance(const Instance& inst, const Params& p) {
  p.validate();
  EngineResult res = run_k_chance(inst, 2, {1.0, p.gamma, 0.0}, p.eta, SideMap::two_location(inst));
  res.cost = total_cost(inst, res.solution);
  res.eta_warning = p.outside_theory_range();
  return res;
}

void write_trace_jsonl(const Instance& inst, const Trace& trace, std::ostream& out) {
  const auto& edges = inst.edges();
  for (const Event& ev : trace.events) {
    nlohmann::json j;
    j["t"] = ev.t;
    if (ev.kind == EventKind::Open) {
      j["kind"] = "open";
      j["i"] = ev.facility;
    } else {
      j["kind"] = "connect";
      j["i"] = ev.facility;
      j["edge"] = {edges[ev.edge].h, edges[ev.edge].w};
      if (trace.K == 2)
        j["side"] = ev.side == 0 ? "H" : "W";
      else
        j["side"] = ev.side;
    }
    out << j.dump() << "\n";
  }
}

Trace read_trace_jsonl(const Instance& inst, std::istream& in) {
  const int m = static_cast<int>(inst.edges().size());
  Trace tr;
  tr.K = 2;
  tr.alpha.assign(m, kInf);
  tr.psi.assign(m, std::vector<int>(2, kNone));
  tr.connect_time.assign(m, std::vector<double>(2, kInf));
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      auto j = nlohmann::json::parse(line);
      Event ev;
      ev.t = j.at("t").get<double>();
      ev.facility = j.at("i").get<int>();
      if (ev.facility < 0 || ev.facility >= inst.n())
        throw Error(ErrorCode::ParseError, "facility out of range");
      const std::string kind = j.at("kind").get<std::string>();
      if (kind == "open") {
        ev.kind = EventKind::Open;
      } else if (kind == "connect") {
        ev.kind = EventKind::Connect;
        const auto& ed = j.at("edge");
        ev.edge = inst.find_edge(ed.at(0).get<int>(), ed.at(1).get<int>());
        if (ev.edge < 0) throw Error(ErrorCode::UnknownId, "edge not in instance");
        const std::string side = j.at("side").get<std::string>();
        if (side == "H")
          ev.side = 0;
        else if (side == "W")
          ev.side = 1;
        else
          throw Error(ErrorCode::ParseError, "side must be H or W");
        tr.psi[ev.edge][ev.side] = ev.facility;
        tr.connect_time[ev.edge][ev.side] = ev.t;
        tr.alpha[ev.edge] = std::min(tr.alpha[ev.edge], ev.t);
      } else {
        throw Error(ErrorCode::ParseError, "unknown event kind " + kind);
      }
      tr.events.push_back(ev);
      tr.termination = std::max(tr.termination, ev.t);
    } catch (const nlohmann::json::exception& ex) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": " + ex.what());
    }
  }
  for (int e = 0; e < m; ++e) {
    if (is_inf(tr.alpha[e])) tr.alpha[e] = tr.termination;
    for (double& y : tr.connect_time[e])
      if (is_inf(y)) y = tr.termination;
  }
  return tr;
}

}  // namespace lflp
