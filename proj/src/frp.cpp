#include "lflp/frp.hpp"

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

namespace lflp {

const char* to_string(ProgramKind k) {
  switch (k) {
    case ProgramKind::WFRP: return "WFRP";
    case ProgramKind::SFRP: return "SFRP";
    case ProgramKind::WFRP_MFLP: return "WFRP_MFLP";
    case ProgramKind::SFRP_MFLP: return "SFRP_MFLP";
    case ProgramKind::LBLP: return "LBLP";
    case ProgramKind::SFRK: return "SFRK";
  }
  return "?";
}

ProgramKind program_kind_from_string(const std::string& s) {
  std::string u = s;
  std::transform(u.begin(), u.end(), u.begin(), [](unsigned char ch) {
    return ch == '-' ? '_' : static_cast<char>(std::toupper(ch));
  });
  for (ProgramKind k : {ProgramKind::WFRP, ProgramKind::SFRP, ProgramKind::WFRP_MFLP,
                        ProgramKind::SFRP_MFLP, ProgramKind::LBLP, ProgramKind::SFRK})
    if (u == to_string(k)) return k;
  throw Error(ErrorCode::InvalidParams, "unknown program kind " + s);
}

bool is_triangular(ProgramKind k) { return k == ProgramKind::SFRP || k == ProgramKind::SFRK; }

namespace {

bool has_c(ProgramKind k) { return k != ProgramKind::WFRP_MFLP && k != ProgramKind::SFRP_MFLP; }

int cells_for(ProgramKind k, int size) { return is_triangular(k) ? tri_cells(size) : size; }

const char* field_name(Field f) {
  switch (f) {
    case Field::F: return "f";
    case Field::Alpha: return "alpha";
    case Field::D: return "d";
    case Field::C: return "c";
    case Field::Q: return "q";
  }
  return "?";
}

std::string fmt_num(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

}  // namespace

FRSolution FRSolution::zeros(ProgramKind kind, int size) {
  const int cells = cells_for(kind, size);
  FRSolution s;
  s.alpha.assign(cells, 0.0);
  s.d.assign(cells, 0.0);
  if (has_c(kind)) s.c.assign(cells, 0.0);
  if (is_triangular(kind)) s.q.assign(cells, 0.0);
  return s;
}

nlohmann::json to_json(const FRSolution& s) {
  nlohmann::json j;
  j["f"] = s.f;
  j["alpha"] = s.alpha;
  j["d"] = s.d;
  if (!s.c.empty()) j["c"] = s.c;
  if (!s.q.empty()) j["q"] = s.q;
  return j;
}

FRSolution frsolution_from_json(const nlohmann::json& j) {
  try {
    FRSolution s;
    s.f = j.at("f").get<double>();
    s.alpha = j.at("alpha").get<std::vector<double>>();
    s.d = j.at("d").get<std::vector<double>>();
    if (j.contains("c")) s.c = j.at("c").get<std::vector<double>>();
    if (j.contains("q")) s.q = j.at("q").get<std::vector<double>>();
    return s;
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorCode::ParseError, ex.what());
  }
}

int FRProgram::var(Field field, int cell) const {
  if (field == Field::F) return 0;
  for (size_t slot = 0; slot < fields.size(); ++slot)
    if (fields[slot] == field) return 1 + static_cast<int>(slot) * cells + cell;
  throw Error(ErrorCode::ShapeMismatch, std::string("program has no field ") + field_name(field));
}

std::vector<double> FRProgram::flatten(const FRSolution& s) const {
  std::vector<double> x(num_vars(), 0.0);
  x[0] = s.f;
  for (Field fld : fields) {
    const std::vector<double>* src = nullptr;
    switch (fld) {
      case Field::Alpha: src = &s.alpha; break;
      case Field::D: src = &s.d; break;
      case Field::C: src = &s.c; break;
      case Field::Q: src = &s.q; break;
      case Field::F: break;
    }
    if (!src || static_cast<int>(src->size()) != cells)
      throw Error(ErrorCode::ShapeMismatch, std::string("field ") + field_name(fld) + " needs " +
                                                std::to_string(cells) + " entries");
    for (int k = 0; k < cells; ++k) x[var(fld, k)] = (*src)[k];
  }
  if (!has_c(kind) && !s.c.empty()) throw Error(ErrorCode::ShapeMismatch, "program has no c field");
  if (!is_triangular(kind) && !s.q.empty()) throw Error(ErrorCode::ShapeMismatch, "program has no q field");
  return x;
}

std::string FRProgram::file_stem() const {
  std::string s = to_string(kind);
  s += "_" + std::to_string(params.size);
  switch (kind) {
    case ProgramKind::SFRP:
    case ProgramKind::WFRP:
      s += "_" + fmt_num(params.gamma) + "_" + fmt_num(params.eta);
      break;
    case ProgramKind::SFRK:
      s += "_" + std::to_string(params.K);
      break;
    default:
      break;
  }
  return s;
}

namespace {

class Builder {
 public:
  explicit Builder(FRProgram& p) : p_(p) {}

  Term lin(int v, double coef, int q = -1) const {
    Term t;
    t.kind = Term::Kind::Linear;
    t.var = v;
    t.coef = coef;
    t.qvar = q;
    return t;
  }
  Term plus(LinExpr inner, double coef = 1.0, int q = -1) const {
    Term t;
    t.kind = Term::Kind::PlusPart;
    t.inner = std::move(inner);
    t.coef = coef;
    t.qvar = q;
    return t;
  }
  void add(const std::string& family, std::string name, std::vector<Term> lhs, Sense sense,
           double rhs) {
    if (std::find(p_.families.begin(), p_.families.end(), family) == p_.families.end())
      p_.families.push_back(family);
    p_.constraints.push_back({family, std::move(name), std::move(lhs), sense, rhs});
  }

 private:
  FRProgram& p_;
};

std::string idx1(int l) { return "l" + std::to_string(l + 1); }
std::string idx2(int a, int b) { return "a" + std::to_string(a + 1) + "_b" + std::to_string(b + 1); }

void build_triangular(FRProgram& p) {
  Builder B(p);
  const int n = p.params.size;
  const double g = p.params.gamma, eta = p.params.eta;
  auto A = [&](int a, int b) { return p.var(Field::Alpha, tri_index(a, b)); };
  auto D = [&](int a, int b) { return p.var(Field::D, tri_index(a, b)); };
  auto C = [&](int a, int b) { return p.var(Field::C, tri_index(a, b)); };
  auto Q = [&](int a, int b) { return p.var(Field::Q, tri_index(a, b)); };

  if (p.kind == ProgramKind::SFRK) {
    for (int a = 0; a < n; ++a)
      for (int b = 0; b <= a; ++b) p.objective.push_back(B.lin(A(a, b), 1.0, Q(a, b)));
  } else {
    const double kappa = (1.0 + g) / eta;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b <= a; ++b) {
        p.objective.push_back(B.lin(A(a, b), kappa, Q(a, b)));
        if (kappa != 1.0) p.objective.push_back(B.lin(C(a, b), -(kappa - 1.0), Q(a, b)));
      }
  }

  for (int a = 0; a < n; ++a)
    for (int b = 0; b <= a; ++b)
      for (int a2 = 0; a2 < n; ++a2)
        for (int b2 = b + 1; b2 <= a2; ++b2)
          B.add("SFR.i", "SFR.i_" + idx2(a, b) + "_" + idx2(a2, b2),
                {B.lin(A(a, b), 1.0), B.lin(A(a2, b2), -1.0)}, Sense::LE, 0.0);

  for (int a = 0; a < n; ++a)
    for (int b = 0; b <= a; ++b)
      for (int a2 = a + 1; a2 < n; ++a2)
        for (int b2 = 0; b2 <= a2; ++b2)
          B.add("SFR.ii", "SFR.ii_" + idx2(a, b) + "_" + idx2(a2, b2),
                {B.lin(A(a2, b2), g), B.lin(C(a, b), -1.0), B.lin(D(a, b), -1.0),
                 B.lin(D(a2, b2), -1.0)},
                Sense::LE, 0.0);

  for (int a = 0; a + 1 < n; ++a) {
    std::vector<Term> lhs;
    for (int a2 = a + 1; a2 < n; ++a2)
      for (int b2 = 0; b2 <= a2; ++b2) {
        LinExpr in;
        if (b2 <= a)
          in.terms = {{A(a2, b2), g}, {D(a2, b2), -1.0}};
        else
          in.terms = {{A(a, a), g}, {D(a2, b2), -1.0}};
        lhs.push_back(B.plus(std::move(in), 1.0, Q(a2, b2)));
      }
    lhs.push_back(B.lin(0, -eta));
    B.add("SFR.iii", "SFR.iii_a" + std::to_string(a + 1), std::move(lhs), Sense::LE, 0.0);
  }

  for (int a = 0; a < n; ++a)
    for (int b = 0; b <= a; ++b)
      B.add("SFR.iv", "SFR.iv_" + idx2(a, b), {B.lin(D(a, b), 1.0), B.lin(A(a, b), -1.0)},
            Sense::LE, 0.0);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b <= a; ++b)
      B.add("SFR.v", "SFR.v_" + idx2(a, b), {B.lin(C(a, b), 1.0), B.lin(A(a, b), -1.0)},
            Sense::LE, 0.0);

  {
    std::vector<Term> lhs{B.lin(0, 1.0)};
    for (int a = 0; a < n; ++a)
      for (int b = 0; b <= a; ++b) lhs.push_back(B.lin(D(a, b), 1.0, Q(a, b)));
    B.add("SFR.vi", "SFR.vi", std::move(lhs), Sense::LE, 1.0);
  }
  for (int b = 0; b < n; ++b) {
    std::vector<Term> lhs;
    for (int a = b; a < n; ++a) lhs.push_back(B.lin(Q(a, b), 1.0));
    B.add("SFR.vii", "SFR.vii_b" + std::to_string(b + 1), std::move(lhs), Sense::EQ, 1.0);
  }
}

void build_wfrp(FRProgram& p) {
  Builder B(p);
  const int m = p.params.size;
  const double g = p.params.gamma, eta = p.params.eta;
  const auto& chi = p.params.chi;
  auto A = [&](int l) { return p.var(Field::Alpha, l); };
  auto D = [&](int l) { return p.var(Field::D, l); };
  auto C = [&](int l) { return p.var(Field::C, l); };
  const double kappa = (1.0 + g) / eta;
  for (int l = 0; l < m; ++l) {
    p.objective.push_back(B.lin(A(l), kappa));
    if (kappa != 1.0) p.objective.push_back(B.lin(C(l), -(kappa - 1.0)));
  }
  for (int l = 0; l < m; ++l)
    for (int l2 = 0; l2 < m; ++l2)
      if (chi[l] < chi[l2])
        B.add("FR.i", "FR.i_" + idx1(l) + "_" + idx1(l2),
              {B.lin(A(l2), g), B.lin(C(l), -1.0), B.lin(D(l), -1.0), B.lin(D(l2), -1.0)},
              Sense::LE, 0.0);
  for (int l = 0; l < m; ++l) {
    std::vector<Term> lhs;
    for (int l2 = 0; l2 < m; ++l2) {
      if (!(chi[l2] >= chi[l])) continue;
      LinExpr in;
      if (l2 == l)
        in.terms = {{A(l), g}};
      else
        in.mins = {{A(l), A(l2), g}};
      in.terms.push_back({D(l2), -1.0});
      lhs.push_back(B.plus(std::move(in)));
    }
    lhs.push_back(B.lin(0, -eta));
    B.add("FR.ii", "FR.ii_" + idx1(l), std::move(lhs), Sense::LE, 0.0);
  }
  for (int l = 0; l < m; ++l)
    B.add("FR.iii", "FR.iii_" + idx1(l), {B.lin(C(l), 1.0), B.lin(A(l), -1.0)}, Sense::LE, 0.0);
  std::vector<Term> norm{B.lin(0, 1.0)};
  for (int l = 0; l < m; ++l) norm.push_back(B.lin(D(l), 1.0));
  B.add("FR.iv", "FR.iv", std::move(norm), Sense::LE, 1.0);
}

void build_mflp(FRProgram& p, bool strong) {
  Builder B(p);
  const int m = p.params.size;
  auto A = [&](int l) { return p.var(Field::Alpha, l); };
  auto D = [&](int l) { return p.var(Field::D, l); };
  for (int l = 0; l < m; ++l) p.objective.push_back(B.lin(A(l), 1.0));
  for (int l = 0; l < m; ++l)
    for (int l2 = l + 1; l2 < m; ++l2)
      B.add("MFLP.mono", "MFLP.mono_" + idx1(l) + "_" + idx1(l2),
            {B.lin(A(l), 1.0), B.lin(A(l2), -1.0)}, Sense::LE, 0.0);
  const int lo = strong ? 1 : 0;
  for (int l = lo; l < m; ++l)
    for (int l2 = lo; l2 < m; ++l2)
      if (l != l2)
        B.add("MFLP.tri", "MFLP.tri_" + idx1(l) + "_" + idx1(l2),
              {B.lin(A(l2), 1.0), B.lin(A(l), -1.0), B.lin(D(l), -1.0), B.lin(D(l2), -1.0)},
              Sense::LE, 0.0);
  for (int l = 0; l < m; ++l) {
    std::vector<Term> lhs;
    for (int l2 = strong ? l + 1 : l; l2 < m; ++l2) {
      LinExpr in;
      in.terms = {{A(l), 1.0}, {D(l2), -1.0}};
      lhs.push_back(B.plus(std::move(in)));
    }
    lhs.push_back(B.lin(0, -1.0));
    B.add("MFLP.open", "MFLP.open_" + idx1(l), std::move(lhs), Sense::LE, 0.0);
  }
  std::vector<Term> norm{B.lin(0, 1.0)};
  for (int l = 0; l < m; ++l) norm.push_back(B.lin(D(l), 1.0));
  B.add("MFLP.norm", "MFLP.norm", std::move(norm), Sense::LE, 1.0);
}

void build_lblp(FRProgram& p) {
  Builder B(p);
  const int m = p.params.size;
  auto A = [&](int l) { return p.var(Field::Alpha, l); };
  auto D = [&](int l) { return p.var(Field::D, l); };
  auto C = [&](int l) { return p.var(Field::C, l); };
  for (int l = 0; l < m; ++l) p.objective.push_back(B.lin(A(l), 1.0));
  for (int l = 0; l < m; ++l)
    for (int l2 = l + 1; l2 < m; ++l2)
      B.add("LB.mono", "LB.mono_" + idx1(l) + "_" + idx1(l2),
            {B.lin(A(l), 1.0), B.lin(A(l2), -1.0)}, Sense::LE, 0.0);
  for (int l = 0; l < m; ++l)
    for (int l2 = l; l2 < m; ++l2)
      B.add("LB.tri", "LB.tri_" + idx1(l) + "_" + idx1(l2),
            {B.lin(A(l2), 1.0), B.lin(C(l), -1.0), B.lin(D(l), -1.0), B.lin(D(l2), -1.0)},
            Sense::LE, 0.0);
  for (int l = 0; l < m; ++l)
    B.add("LB.cap", "LB.cap_" + idx1(l), {B.lin(C(l), 1.0), B.lin(A(l), -1.0)}, Sense::LE, 0.0);
  for (int l = 0; l < m; ++l) {
    std::vector<Term> lhs;
    for (int l2 = l; l2 < m; ++l2) {
      LinExpr in;
      in.terms = {{A(l), 1.0}, {D(l2), -1.0}};
      lhs.push_back(B.plus(std::move(in)));
    }
    lhs.push_back(B.lin(0, -2.0));
    B.add("LB.open", "LB.open_" + idx1(l), std::move(lhs), Sense::LE, 0.0);
  }
  std::vector<Term> norm{B.lin(0, 1.0)};
  for (int l = 0; l < m; ++l) norm.push_back(B.lin(D(l), 1.0));
  B.add("LB.norm", "LB.norm", std::move(norm), Sense::EQ, 1.0);
}

}  // namespace

FRProgram build(ProgramKind kind, const ProgramParams& params) {
  if (params.size < 1) throw Error(ErrorCode::InvalidParams, "program size must be >= 1");
  if (!(params.gamma >= 0.0 && params.gamma <= 1.0))
    throw Error(ErrorCode::InvalidParams, "gamma must lie in [0,1]");
  if (!(params.eta > 0.0) || is_inf(params.eta))
    throw Error(ErrorCode::InvalidParams, "eta must be positive and finite");
  FRProgram p;
  p.kind = kind;
  p.params = params;
  if (kind == ProgramKind::SFRK) {
    if (params.K < 1) throw Error(ErrorCode::InvalidParams, "K must be >= 1");
    p.params.gamma = 1.0;
    p.params.eta = params.K;
  }
  if (kind == ProgramKind::WFRP) {
    if (static_cast<int>(params.chi.size()) != params.size)
      throw Error(ErrorCode::InvalidParams, "chi needs one entry per index");
    for (double x : params.chi)
      if (!std::isfinite(x)) throw Error(ErrorCode::InvalidParams, "chi must be finite");
  }
  if (kind == ProgramKind::SFRP || kind == ProgramKind::WFRP)
    p.theory_warning = params.eta < 1.0 - kTol || params.eta > 1.0 + params.gamma + kTol;

  p.cells = cells_for(kind, params.size);
  p.fields = {Field::Alpha, Field::D};
  if (has_c(kind)) p.fields.push_back(Field::C);
  if (is_triangular(kind)) p.fields.push_back(Field::Q);
  p.var_names.push_back("f");
  for (Field fld : p.fields)
    for (int k = 0; k < p.cells; ++k) {
      std::string base;
      if (is_triangular(kind)) {
        int a = 0;
        while (tri_index(a + 1, 0) <= k) ++a;
        base = idx2(a, k - tri_index(a, 0));
      } else {
        base = idx1(k);
      }
      p.var_names.push_back(base + "_" + field_name(fld));
    }

  switch (kind) {
    case ProgramKind::SFRP:
    case ProgramKind::SFRK: build_triangular(p); break;
    case ProgramKind::WFRP: build_wfrp(p); break;
    case ProgramKind::WFRP_MFLP: build_mflp(p, false); break;
    case ProgramKind::SFRP_MFLP: build_mflp(p, true); break;
    case ProgramKind::LBLP: build_lblp(p); break;
  }
  return p;
}

namespace {

double eval_inner(const LinExpr& in, const std::vector<double>& x) {
  double v = in.constant;
  for (auto [var, coef] : in.terms) v += coef * x[var];
  for (const auto& mn : in.mins) v += mn.coef * std::min(x[mn.x], x[mn.y]);
  return v;
}

double eval_term(const Term& t, const std::vector<double>& x) {
  double v = t.kind == Term::Kind::Linear ? x[t.var] : pos(eval_inner(t.inner, x));
  v *= t.coef;
  if (t.qvar >= 0) v *= x[t.qvar];
  return v;
}

}  // namespace

double eval_lhs(const Constraint& c, const std::vector<double>& x) {
  double s = 0.0;
  for (const Term& t : c.lhs) s += eval_term(t, x);
  return s;
}

double eval_objective(const FRProgram& prog, const FRSolution& sol) {
  const auto x = prog.flatten(sol);
  double s = 0.0;
  for (const Term& t : prog.objective) s += eval_term(t, x);
  return s;
}

CheckReport check_solution(const FRProgram& prog, const FRSolution& sol, double tol) {
  const auto x = prog.flatten(sol);
  CheckReport rep;
  for (int v = 0; v < prog.num_vars(); ++v)
    if (!(x[v] >= -tol) || !std::isfinite(x[v]))
      rep.violations.push_back({"nonneg", prog.var_names[v], x[v], 0.0});
  for (const Constraint& c : prog.constraints) {
    const double lhs = eval_lhs(c, x);
    bool ok = false;
    switch (c.sense) {
      case Sense::LE: ok = lhs <= c.rhs + tol; break;
      case Sense::GE: ok = lhs >= c.rhs - tol; break;
      case Sense::EQ: ok = std::abs(lhs - c.rhs) <= tol; break;
    }
    if (!ok) rep.violations.push_back({c.family, c.name, lhs, c.rhs});
  }
  for (const Term& t : prog.objective) rep.objective += eval_term(t, x);
  rep.feasible = rep.violations.empty();
  return rep;
}

// ---------------------------------------------------------------------------
// Batching

namespace {

// Largest alpha; ties to smaller chi, then smaller index.
int argmax_alpha(const std::vector<double>& alpha, const std::vector<double>& chi,
                 const std::vector<int>& candidates) {
  int best = -1;
  for (int l : candidates) {
    if (best < 0 || alpha[l] > alpha[best] ||
        (alpha[l] == alpha[best] && (chi[l] < chi[best] || (chi[l] == chi[best] && l < best))))
      best = l;
  }
  return best;
}

void check_wfrp_shape(const ProgramParams& p, const FRSolution& s) {
  const size_t m = static_cast<size_t>(p.size);
  if (p.chi.size() != m || s.alpha.size() != m || s.d.size() != m || s.c.size() != m)
    throw Error(ErrorCode::ShapeMismatch, "WFRP solution shape does not match its parameters");
}

}  // namespace

std::pair<ProgramParams, FRSolution> fold_distance_upperbound(const ProgramParams& wfrp,
                                                              const FRSolution& sol) {
  check_wfrp_shape(wfrp, sol);
  std::vector<int> all(wfrp.size);
  std::iota(all.begin(), all.end(), 0);
  const int star = argmax_alpha(sol.alpha, wfrp.chi, all);
  double a_star = std::max(sol.alpha[star], sol.d[star]);
  double d_star = sol.d[star];
  ProgramParams out_p = wfrp;
  out_p.chi.clear();
  FRSolution out;
  out.f = sol.f;
  double dropped = 0.0;
  for (int l = 0; l < wfrp.size; ++l)
    if (l != star && sol.d[l] > sol.alpha[l]) dropped += sol.d[l];
  for (int l = 0; l < wfrp.size; ++l) {
    if (l != star && sol.d[l] > sol.alpha[l]) continue;
    out_p.chi.push_back(wfrp.chi[l]);
    if (l == star) {
      out.alpha.push_back(a_star + dropped);
      out.d.push_back(d_star + dropped);
    } else {
      out.alpha.push_back(sol.alpha[l]);
      out.d.push_back(sol.d[l]);
    }
    out.c.push_back(sol.c[l]);
  }
  out_p.size = static_cast<int>(out.alpha.size());
  return {out_p, out};
}

FRSolution batch_wfrp_to_sfrp(const ProgramParams& wfrp_in, const FRSolution& sol_in, int n) {
  if (n < 1) throw Error(ErrorCode::InvalidParams, "target n must be >= 1");
  auto [wfrp, sol] = fold_distance_upperbound(wfrp_in, sol_in);
  const int m = wfrp.size;
  const auto& chi = wfrp.chi;
  const auto& alpha = sol.alpha;
  const double g = wfrp.gamma;

  // Pivots: repeatedly the largest alpha among indices with smaller chi.
  std::vector<int> pivots;
  {
    double bound = kInf;
    for (;;) {
      std::vector<int> cand;
      for (int l = 0; l < m; ++l)
        if (chi[l] < bound) cand.push_back(l);
      if (cand.empty()) break;
      const int p = argmax_alpha(alpha, chi, cand);
      pivots.push_back(p);
      bound = chi[p];
    }
    std::reverse(pivots.begin(), pivots.end());
  }
  const int k = static_cast<int>(pivots.size());

  // Column group by chi, level by alpha; level <= group holds by pivot choice.
  std::vector<int> group(m), level(m);
  for (int l = 0; l < m; ++l) {
    int a = 0;
    while (a + 1 < k && chi[pivots[a + 1]] <= chi[l]) ++a;
    int b = 0;
    while (alpha[l] > alpha[pivots[b]]) ++b;
    group[l] = a;
    level[l] = b;
  }

  struct Block {
    int a, b;
    long count = 0;
    double sa = 0, sd = 0, sc = 0;
    double avg_alpha() const { return sa / count; }
  };
  std::map<std::pair<int, int>, Block> blocks;
  std::vector<long> level_count(k, 0);
  for (int l = 0; l < m; ++l) {
    auto& bl = blocks.try_emplace({group[l], level[l]}, Block{group[l], level[l]}).first->second;
    ++bl.count;
    bl.sa += alpha[l];
    bl.sd += sol.d[l];
    bl.sc += sol.c[l];
    ++level_count[level[l]];
  }
  std::vector<Block> order;
  for (auto& [key, bl] : blocks) order.push_back(bl);
  std::stable_sort(order.begin(), order.end(), [](const Block& x, const Block& y) {
    if (x.b != y.b) return x.b < y.b;
    if (x.avg_alpha() != y.avg_alpha()) return x.avg_alpha() < y.avg_alpha();
    return x.a < y.a;
  });

  // Integer mass axis: each index has length n, each output row length m.
  std::vector<int> column(k);
  {
    long cum = 0;
    for (int a = 0; a < k; ++a) {
      cum += level_count[a];
      const long num = cum * n;
      column[a] = static_cast<int>((num + m - 1) / m) - 1;
    }
  }

  const int cells = tri_cells(n);
  std::vector<double> len(cells, 0), sa(cells, 0), sd(cells, 0), sc(cells, 0);
  long pos = 0;
  for (const Block& bl : order) {
    long left = bl.count * n;
    const double aa = bl.sa / bl.count, ad = bl.sd / bl.count, ac = bl.sc / bl.count;
    while (left > 0) {
      const int row = static_cast<int>(pos / m);
      const long take = std::min(left, static_cast<long>(row + 1) * m - pos);
      const int col = column[bl.a];
      if (row > col) throw Error(ErrorCode::InvalidParams, "internal: piece below diagonal");
      const int cell = tri_index(col, row);
      len[cell] += take;
      sa[cell] += take * aa;
      sd[cell] += take * ad;
      sc[cell] += take * ac;
      pos += take;
      left -= take;
    }
  }

  const double scale = static_cast<double>(m) / n;
  FRSolution out;
  out.f = sol.f;
  out.alpha.assign(cells, 0);
  out.d.assign(cells, 0);
  out.c.assign(cells, 0);
  out.q.assign(cells, 0);
  // need[t]: largest (gamma*alpha - d)/2 over filled cells in columns after t.
  std::vector<double> need(n, 0.0);
  for (int t = 0; t < n; ++t)
    for (int r = 0; r <= t; ++r) {
      const int cell = tri_index(t, r);
      if (len[cell] == 0) continue;
      out.q[cell] = len[cell] / m;
      out.alpha[cell] = sa[cell] / len[cell] * scale;
      out.d[cell] = sd[cell] / len[cell] * scale;
      out.c[cell] = sc[cell] / len[cell] * scale;
      if (t > 0) need[t - 1] = std::max(need[t - 1], (g * out.alpha[cell] - out.d[cell]) / 2);
    }
  for (int t = n - 2; t >= 0; --t) need[t] = std::max(need[t], need[t + 1]);

  // Empty cells take the smallest value allowed by row order and by the cross-column bound.
  double below = 0.0;  // max alpha over finished rows
  for (int r = 0; r < n; ++r) {
    double row_max = below;
    for (int t = r; t < n; ++t) {
      const int cell = tri_index(t, r);
      if (len[cell] == 0) out.alpha[cell] = out.d[cell] = out.c[cell] = std::max(below, need[t]);
      row_max = std::max(row_max, out.alpha[cell]);
    }
    below = row_max;
  }
  return out;
}

int mflp_block_start(int m, int n, int a) {
  const int k = (m + n - 1) / n;
  if (a == 1) return 1;
  return 1 + m - k * (n + 1 - a);
}

FRSolution batch_mflp(const FRSolution& sol_in, int n) {
  FRSolution sol = sol_in;
  int m = static_cast<int>(sol.alpha.size());
  if (n < 1 || m < n) throw Error(ErrorCode::InvalidParams, "batch_mflp needs m >= n >= 1");
  if (sol.d.size() != sol.alpha.size()) throw Error(ErrorCode::ShapeMismatch, "alpha/d size mismatch");
  // Split every index into two half-copies until the first block is nonempty.
  while (mflp_block_start(m, n, 2) <= 1 && n > 1) {
    FRSolution dup;
    dup.f = sol.f;
    for (int l = 0; l < m; ++l)
      for (int rep = 0; rep < 2; ++rep) {
        dup.alpha.push_back(sol.alpha[l] / 2);
        dup.d.push_back(sol.d[l] / 2);
      }
    sol = std::move(dup);
    m *= 2;
  }
  FRSolution out;
  out.f = sol.f;
  out.alpha.assign(n, 0.0);
  out.d.assign(n, 0.0);
  for (int a = 1; a <= n; ++a) {
    const int lo = mflp_block_start(m, n, a) - 1;
    const int hi = a < n ? mflp_block_start(m, n, a + 1) - 1 : m;
    for (int l = lo; l < hi; ++l) {
      out.alpha[a - 1] += sol.alpha[l];
      out.d[a - 1] += sol.d[l];
    }
  }
  return out;
}

FRSolution scale_k_solution(const FRSolution& sol, int K, int K_new) {
  if (K < 1 || K_new < 1 || K_new > K) throw Error(ErrorCode::InvalidParams, "need 1 <= K' <= K");
  const double s = static_cast<double>(K_new) / K;
  FRSolution out = sol;
  for (double& x : out.alpha) x *= s;
  for (double& x : out.d) x *= s;
  for (double& x : out.c) x *= s;
  return out;
}

// ---------------------------------------------------------------------------
// LP export

namespace {

class LpWriter {
 public:
  explicit LpWriter(const FRProgram& p) : p_(p) {}

  std::string run() {
    std::ostringstream body;
    body << "\\ " << p_.file_stem() << "\n";
    body << "Maximize\n obj:";
    Line obj;
    std::vector<std::string> quad;
    for (const Term& t : p_.objective) {
      if (t.qvar >= 0)
        quad.push_back(signed_num(2.0 * t.coef) + " " + name(t.qvar) + " * " + name(t.var));
      else
        obj.add(name(t.var), t.coef);
    }
    body << obj.text();
    if (!quad.empty()) body << " + [" << join(quad) << " ] / 2";
    if (obj.empty() && quad.empty()) body << " 0 f";
    body << "\nSubject To\n";

    std::ostringstream aux;
    for (const Constraint& c : p_.constraints) {
      Line lin;
      std::vector<std::string> q;
      double rhs = c.rhs;
      for (const Term& t : c.lhs) {
        std::string v;
        if (t.kind == Term::Kind::Linear) {
          v = name(t.var);
        } else {
          v = plus_var(t.inner, aux);
        }
        if (t.qvar >= 0)
          q.push_back(signed_num(t.coef) + " " + name(t.qvar) + " * " + v);
        else
          lin.add(v, t.coef);
      }
      body << " " << c.name << ":" << lin.text();
      if (!q.empty()) body << " + [" << join(q) << " ]";
      if (lin.empty() && q.empty()) body << " 0 f";
      body << " " << sense(c.sense) << " " << fmt_num(rhs) << "\n";
    }
    body << aux.str();
    body << "Bounds\n";
    for (const auto& v : p_.var_names) body << " " << v << " >= 0\n";
    for (const auto& z : extra_) body << " " << z << " >= 0\n";
    if (!mins_.empty()) {
      body << "General Constraints\n";
      for (const auto& [key, w] : mins_)
        body << " gc_" << w << ": " << w << " = MIN ( " << name(key.first) << " , "
             << name(key.second) << " )\n";
    }
    body << "End\n";
    return body.str();
  }

 private:
  // Linear row; repeated variables are merged in first-appearance order.
  struct Line {
    std::vector<std::pair<std::string, double>> parts;
    void add(const std::string& v, double coef) {
      for (auto& [name, c] : parts)
        if (name == v) {
          c += coef;
          return;
        }
      parts.emplace_back(v, coef);
    }
    bool empty() const { return parts.empty(); }
    std::string text() const {
      std::string out;
      for (size_t i = 0; i < parts.size(); ++i) {
        if (i > 0 && i % 8 == 0) out += "\n  ";
        out += " " + signed_num(parts[i].second) + " " + parts[i].first;
      }
      return out;
    }
  };

  static std::string join(const std::vector<std::string>& parts) {
    std::string out;
    for (size_t i = 0; i < parts.size(); ++i) {
      if (i > 0 && i % 6 == 0) out += "\n  ";
      out += " " + parts[i];
    }
    return out;
  }
  static std::string signed_num(double c) {
    return (c < 0 ? "- " : "+ ") + fmt_num(std::abs(c));
  }
  static const char* sense(Sense s) {
    switch (s) {
      case Sense::LE: return "<=";
      case Sense::GE: return ">=";
      case Sense::EQ: return "=";
    }
    return "<=";
  }
  std::string name(int v) const { return p_.var_names[v]; }

  std::string min_var(int x, int y) {
    auto key = std::make_pair(std::min(x, y), std::max(x, y));
    auto it = mins_.find(key);
    if (it != mins_.end()) return it->second;
    std::string w = "w_" + name(key.first) + "_" + name(key.second);
    mins_.emplace(key, w);
    extra_.push_back(w);
    return w;
  }

  // z >= inner and z >= 0; returns z's name.
  std::string plus_var(const LinExpr& in, std::ostringstream& aux) {
    std::string z = "z" + std::to_string(++nz_);
    extra_.push_back(z);
    Line l;
    l.add(z, 1.0);
    for (auto [var, coef] : in.terms) l.add(name(var), -coef);
    for (const auto& mn : in.mins) l.add(min_var(mn.x, mn.y), -mn.coef);
    aux << " def_" << z << ":" << l.text() << " >= " << fmt_num(in.constant) << "\n";
    return z;
  }

  const FRProgram& p_;
  int nz_ = 0;
  std::vector<std::string> extra_;
  std::map<std::pair<int, int>, std::string> mins_;
};

}  // namespace

std::string export_lp_text(const FRProgram& prog) { return LpWriter(prog).run(); }

std::string export_lp(const FRProgram& prog, const std::string& dir) {
  std::filesystem::path path = std::filesystem::path(dir) / (prog.file_stem() + ".lp");
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IO, "cannot write " + path.string());
  out << export_lp_text(prog);
  if (!out) throw Error(ErrorCode::IO, "write failed for " + path.string());
  return path.string();
}

}  // namespace lflp
