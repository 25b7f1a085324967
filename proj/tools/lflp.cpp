// lflp: command-line front end for the two-location facility location toolkit.
//
// Exit codes: 0 success, 1 a check failed (violation, infeasible point,
// certificate shortfall), 2 usage or input error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "lflp/baselines.hpp"
#include "lflp/bench.hpp"
#include "lflp/certify.hpp"
#include "lflp/engine.hpp"
#include "lflp/frp.hpp"
#include "lflp/gen.hpp"
#include "lflp/hardness.hpp"
#include "lflp/instance.hpp"

using nlohmann::json;
namespace fs = std::filesystem;
using namespace lflp;

namespace {

struct Globals {
  std::uint64_t seed = 1;
  std::string out;
  int workers = 1;
  double tolerance = -1.0;  // negative: module default
};

void emit(const json& j, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << j.dump(2) << '\n';
    return;
  }
  if (fs::path(path).has_parent_path()) fs::create_directories(fs::path(path).parent_path());
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IO, "cannot write " + path);
  out << j.dump(2) << '\n';
}

json read_json(const std::string& path) {
  try {
    if (path == "-") return json::parse(std::cin);
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IO, "cannot open " + path);
    return json::parse(in);
  } catch (const json::exception& ex) {
    throw Error(ErrorCode::ParseError, path + ": " + ex.what());
  }
}

// Accepts a bare solution or the wrapper written by `frp batch`.
json read_solution_json(const std::string& path) {
  json j = read_json(path);
  if (j.is_object() && j.contains("solution") && j["solution"].is_object()) return j["solution"];
  return j;
}

json cost_json(const CostReport& c) {
  return {{"opening_cost", real_to_json(c.opening_cost)},
          {"connection_cost", real_to_json(c.connection_cost)},
          {"total", real_to_json(c.total)},
          {"unserved", c.unserved},
          {"assignment", c.assignment}};
}

SideMap load_sides(const Instance& inst, int K, const std::string& path) {
  if (path.empty()) {
    if (K == 1) return SideMap::home_only(inst);
    if (K == 2) return SideMap::two_location(inst);
    throw Error(ErrorCode::InvalidParams, "K >= 3 needs --sides with K locations per edge");
  }
  SideMap sm;
  sm.K = K;
  sm.sides = read_json(path).get<std::vector<std::vector<int>>>();
  if (sm.sides.size() != inst.edges().size())
    throw Error(ErrorCode::ShapeMismatch, "--sides needs one row per edge");
  for (const auto& row : sm.sides) {
    if (static_cast<int>(row.size()) != K) throw Error(ErrorCode::ShapeMismatch, "--sides row length must equal K");
    for (int l : row)
      if (l < 0 || l >= inst.n()) throw Error(ErrorCode::UnknownId, "--sides location out of range");
  }
  return sm;
}

// ---------------------------------------------------------------- gen

struct GenArgs {
  int n = 30;
  double fbar = 20.0, iota = 0.2;
  std::string centroids, od, opening;
};

int cmd_gen(const Globals& g, const GenArgs& a) {
  Instance inst;
  if (!a.od.empty()) {
    if (a.centroids.empty() || a.opening.empty())
      throw Error(ErrorCode::InvalidParams, "--od needs --centroids and --opening");
    inst = load_od(a.centroids, a.od, a.opening, a.fbar);
  } else {
    SynthConfig c;
    c.n = a.n;
    c.seed = g.seed;
    c.fbar = a.fbar;
    c.iota = a.iota;
    inst = gen_synthetic(c);
  }
  emit(to_json(inst), g.out);
  return 0;
}

// ---------------------------------------------------------------- run

struct RunArgs {
  std::string instance, policy = "2gr", sides, trace;
  double gamma = 1.0, eta = -1.0;
  int K = 2;
};

int cmd_run(const Globals& g, const RunArgs& a) {
  const Instance inst = load_instance(a.instance);
  json j;
  j["policy"] = a.policy;
  const Trace* trace = nullptr;
  EngineResult er;
  Solution sol;
  CostReport cost;
  if (a.policy == "2gr" || a.policy == "2grp") {
    const Params p{a.gamma, a.eta < 0 ? 1.0 : a.eta};
    er = run_two_chance(inst, p);
    trace = &er.trace;
    sol = er.solution;
    if (a.policy == "2grp") sol = myopic_prune(inst, sol);
    cost = total_cost(inst, sol);
    j["gamma"] = p.gamma;
    j["eta"] = p.eta;
    j["eta_warning"] = er.eta_warning;
  } else if (a.policy == "jmmsv") {
    er = jmmsv(inst);
    trace = &er.trace;
    sol = er.solution;
    cost = total_cost(inst, sol);
  } else if (a.policy == "grh" || a.policy == "grw") {
    const PolicyResult r = a.policy == "grh" ? gr_home(inst) : gr_work(inst);
    sol = r.solution;
    cost = r.cost;
  } else if (a.policy == "kgr") {
    const double eta = a.eta < 0 ? static_cast<double>(a.K) : a.eta;
    const SideMap sm = load_sides(inst, a.K, a.sides);
    er = run_k_chance(inst, a.K, canonical_discounts(a.K), eta, sm);
    trace = &er.trace;
    sol = er.solution;
    cost = hyper_cost(inst, sm, sol);
    j["K"] = a.K;
    j["eta"] = eta;
    j["eta_warning"] = er.eta_warning;
  } else if (a.policy == "opt") {
    const PolicyResult r = brute_force_opt(inst);
    sol = r.solution;
    cost = r.cost;
  } else {
    throw Error(ErrorCode::InvalidParams, "unknown policy " + a.policy);
  }
  j["solution"] = sol.opened;
  j["cost"] = cost_json(cost);
  std::string trace_path = a.trace;
  if (trace && trace_path.empty() && !g.out.empty() && g.out != "-")
    trace_path = fs::path(g.out).replace_extension(".trace.jsonl").string();
  if (trace && !trace_path.empty()) {
    std::ofstream out(trace_path);
    if (!out) throw Error(ErrorCode::IO, "cannot write " + trace_path);
    write_trace_jsonl(inst, *trace, out);
    j["trace"] = trace_path;
  } else {
    j["trace"] = nullptr;
  }
  emit(j, g.out);
  return 0;
}

// ---------------------------------------------------------------- bench

struct BenchArgs {
  int seeds = 100, n = 30;
  std::vector<double> fbar{20.0};
  double iota = 0.2;
  bool unpruned = false;
};

int cmd_bench(const Globals& g, const BenchArgs& a) {
  const std::string dir = g.out.empty() ? "bench_out" : g.out;
  fs::create_directories(dir);
  json summary = json::array();
  for (double fb : a.fbar) {
    BenchConfig c;
    for (int k = 0; k < a.seeds; ++k) c.seeds.push_back(g.seed + static_cast<std::uint64_t>(k));
    c.n = a.n;
    c.fbar = fb;
    c.iota = a.iota;
    c.normalize_pruned = !a.unpruned;
    c.workers = g.workers;
    const auto results = run_bench(c);
    std::ostringstream name;
    name << "bench_n" << a.n << "_fbar" << fb << ".csv";
    std::ofstream csv(fs::path(dir) / name.str());
    if (!csv) throw Error(ErrorCode::IO, "cannot write into " + dir);
    write_bench_csv(results, csv);
    json s = to_json(summarize(results));
    s["fbar"] = fb;
    s["n"] = a.n;
    s["iota"] = a.iota;
    s["normalization"] = a.unpruned ? "2GR*" : "2GRP*";
    s["csv"] = (fs::path(dir) / name.str()).string();
    summary.push_back(s);
  }
  std::ofstream js(fs::path(dir) / "summary.json");
  js << summary.dump(2) << '\n';
  std::cout << summary.dump(2) << '\n';
  return 0;
}

// ---------------------------------------------------------------- certify

struct CertifyArgs {
  std::string instance, trace;
  double gamma = 1.0, eta = 1.0;
  bool regions = false;
};

int cmd_certify(const Globals& g, const CertifyArgs& a) {
  const Instance inst = load_instance(a.instance);
  const double tol = g.tolerance > 0 ? g.tolerance : kCertTol;
  Trace tr;
  if (a.trace.empty()) {
    tr = run_two_chance(inst, {a.gamma, a.eta}).trace;
  } else {
    std::ifstream in(a.trace);
    if (!in) throw Error(ErrorCode::IO, "cannot open " + a.trace);
    tr = read_trace_jsonl(inst, in);
  }
  json j;
  bool ok = true;
  const StructuralReport rep = check_structural(inst, tr, a.gamma, a.eta, tol);
  j["structural"] = {{"checks", rep.checks}, {"violations", rep.violations.size()}};
  if (!rep.ok()) {
    ok = false;
    j["structural"]["witness"] = to_json(rep.violations.front());
  }
  try {
    const DualCertificate cert = dual_certificate(inst, tr, a.gamma, a.eta, tol);
    j["dual"] = {{"ok", true}, {"sum_mu", cert.total}, {"cost", real_to_json(cert.cost)}};
  } catch (const Error& ex) {
    if (ex.code() != ErrorCode::CertificateFailure) throw;
    ok = false;
    j["dual"] = {{"ok", false}, {"message", ex.what()}};
  }
  if (a.regions) {
    const CostReport cr = total_cost(inst, Solution::of(tr.opened()));
    json regs = json::array();
    for (int i : tr.opened()) {
      ServiceRegion reg{i, {}};
      for (size_t e = 0; e < cr.assignment.size(); ++e)
        if (cr.assignment[e] == i) reg.edges.push_back(static_cast<int>(e));
      if (reg.edges.empty()) continue;
      json r{{"facility", i}};
      try {
        const RegionSolution rs = wfrp_from_region(inst, tr, a.gamma, a.eta, reg);
        ProgramParams pp = rs.params;
        const CheckReport ck = check_solution(build(ProgramKind::WFRP, pp), rs.sol);
        r["feasible"] = ck.feasible;
        r["objective"] = ck.objective;
        if (!ck.feasible) {
          ok = false;
          r["violation"] = ck.violations.front().name;
        }
      } catch (const Error& ex) {
        if (ex.code() != ErrorCode::NonIntegralMass && ex.code() != ErrorCode::DegenerateRegion) throw;
        r["skipped"] = ex.what();
      }
      regs.push_back(r);
    }
    j["regions"] = regs;
  }
  j["pass"] = ok;
  emit(j, g.out);
  return ok ? 0 : 1;
}

// ---------------------------------------------------------------- frp

struct FrpArgs {
  std::string kind = "sfrp", solution, from = "wfrp", dir = ".";
  int size = -1, K = 2, target = 2;
  double gamma = 1.0, eta = 1.0;
  std::vector<double> chi;
};

ProgramParams frp_params(const FrpArgs& a, const json* sol) {
  ProgramParams pp;
  pp.size = a.size;
  pp.gamma = a.gamma;
  pp.eta = a.eta;
  pp.K = a.K;
  pp.chi = a.chi;
  if (sol && sol->contains("chi") && pp.chi.empty()) pp.chi = sol->at("chi").get<std::vector<double>>();
  return pp;
}

int infer_size(ProgramKind kind, const FRSolution& s) {
  const int cells = static_cast<int>(s.alpha.size());
  if (!is_triangular(kind)) return cells;
  int n = 0;
  while (tri_cells(n) < cells) ++n;
  if (tri_cells(n) != cells) throw Error(ErrorCode::ShapeMismatch, "cell count is not triangular");
  return n;
}

void default_chi(ProgramParams& pp) {
  if (pp.chi.empty())
    for (int l = 1; l <= pp.size; ++l) pp.chi.push_back(l);
}

int cmd_frp_build(const Globals& g, const FrpArgs& a) {
  const ProgramKind kind = program_kind_from_string(a.kind);
  ProgramParams pp = frp_params(a, nullptr);
  if (pp.size < 1) throw Error(ErrorCode::InvalidParams, "--size is required");
  if (kind == ProgramKind::WFRP) default_chi(pp);
  const FRProgram prog = build(kind, pp);
  json j{{"kind", to_string(kind)},
         {"stem", prog.file_stem()},
         {"variables", prog.num_vars()},
         {"constraints", prog.constraints.size()},
         {"families", prog.families},
         {"theory_warning", prog.theory_warning}};
  emit(j, g.out);
  return 0;
}

int cmd_frp_check(const Globals& g, const FrpArgs& a) {
  const ProgramKind kind = program_kind_from_string(a.kind);
  const json sj = read_solution_json(a.solution);
  const FRSolution sol = frsolution_from_json(sj);
  ProgramParams pp = frp_params(a, &sj);
  if (pp.size < 1) pp.size = infer_size(kind, sol);
  if (kind == ProgramKind::WFRP) default_chi(pp);
  const double tol = g.tolerance > 0 ? g.tolerance : kCheckTol;
  const CheckReport rep = check_solution(build(kind, pp), sol, tol);
  json viol = json::array();
  for (const auto& v : rep.violations)
    viol.push_back({{"family", v.family}, {"name", v.name}, {"lhs", v.lhs}, {"rhs", v.rhs}});
  emit({{"feasible", rep.feasible}, {"objective", rep.objective}, {"violations", viol}}, g.out);
  return rep.feasible ? 0 : 1;
}

int cmd_frp_batch(const Globals& g, const FrpArgs& a) {
  const ProgramKind from = program_kind_from_string(a.from);
  const json sj = read_solution_json(a.solution);
  const FRSolution sol = frsolution_from_json(sj);
  ProgramParams pp = frp_params(a, &sj);
  pp.size = static_cast<int>(sol.alpha.size());
  FRSolution out;
  ProgramKind to;
  double obj_in;
  if (from == ProgramKind::WFRP) {
    default_chi(pp);
    obj_in = check_solution(build(from, pp), sol).objective;
    out = batch_wfrp_to_sfrp(pp, sol, a.target);
    to = ProgramKind::SFRP;
  } else if (from == ProgramKind::WFRP_MFLP) {
    obj_in = check_solution(build(from, pp), sol).objective;
    out = batch_mflp(sol, a.target);
    to = ProgramKind::SFRP_MFLP;
  } else {
    throw Error(ErrorCode::InvalidParams, "--from must be WFRP or WFRP_MFLP");
  }
  ProgramParams tp = pp;
  tp.size = a.target;
  tp.chi.clear();
  const CheckReport rep = check_solution(build(to, tp), out);
  emit({{"kind", to_string(to)},
        {"n", a.target},
        {"feasible", rep.feasible},
        {"objective_in", obj_in},
        {"objective_out", rep.objective},
        {"solution", to_json(out)}},
       g.out);
  return rep.feasible ? 0 : 1;
}

int cmd_frp_export(const Globals& g, const FrpArgs& a) {
  const ProgramKind kind = program_kind_from_string(a.kind);
  ProgramParams pp = frp_params(a, nullptr);
  if (pp.size < 1) throw Error(ErrorCode::InvalidParams, "--size is required");
  if (kind == ProgramKind::WFRP) default_chi(pp);
  const std::string dir = g.out.empty() ? a.dir : g.out;
  fs::create_directories(dir);
  std::cout << export_lp(build(kind, pp), dir) << '\n';
  return 0;
}

// ---------------------------------------------------------------- lower-bound

struct LowerBoundArgs {
  std::string solution, save;
  std::vector<double> eps{1e-1, 1e-2, 1e-3};
  double gamma = 1.0, eta = 2.0;
};

int cmd_lower_bound(const Globals& g, const LowerBoundArgs& a) {
  const FRSolution sol = frsolution_from_json(read_solution_json(a.solution));
  ProgramParams pp;
  pp.size = static_cast<int>(sol.alpha.size());
  const double objective = check_solution(build(ProgramKind::LBLP, pp), sol).objective;
  json rows = json::array();
  for (double eps : a.eps) {
    const Instance inst = lblp_to_instance(sol, eps);
    if (!a.save.empty()) save_instance(inst, a.save);
    const double alg = run_two_chance(inst, {a.gamma, a.eta}).cost.total;
    json r{{"eps", eps}, {"alg", real_to_json(alg)}};
    if (inst.n() <= kBruteForceMaxN) {
      const double opt = brute_force_opt(inst).cost.total;
      r["opt"] = opt;
      r["ratio"] = alg / opt;
    } else {
      const double hub = total_cost(inst, Solution::of({inst.n() - 1})).total;
      r["opt_upper"] = hub;
      r["ratio_lower"] = alg / hub;
    }
    rows.push_back(r);
  }
  emit({{"lblp_objective", objective}, {"gamma", a.gamma}, {"eta", a.eta}, {"runs", rows}}, g.out);
  return 0;
}

// ---------------------------------------------------------------- vc

struct VcArgs {
  std::string graph;
  double sentinel = kInf, gamma = 1.0, eta = 1.0;
};

int cmd_vc(const Globals& g, const VcArgs& a) {
  const VCGraph graph = load_vc_graph(a.graph);
  const Instance inst = vc_to_2lflp(graph, a.sentinel);
  const EngineResult r = run_two_chance(inst, {a.gamma, a.eta});
  const bool cover = is_vertex_cover(graph, r.solution.opened);
  json j{{"solution", r.solution.opened}, {"cost", real_to_json(r.cost.total)}, {"is_cover", cover}};
  bool ok = cover;
  if (graph.n() <= 24) {
    const auto [best, w] = min_vertex_cover(graph);
    j["min_cover"] = best;
    j["min_cover_weight"] = w;
    j["within_factor_2"] = r.cost.total <= 2.0 * w + kTol;
    ok = ok && r.cost.total <= 2.0 * w + kTol;
  }
  emit(j, g.out);
  return ok ? 0 : 1;
}

// ---------------------------------------------------------------- opt

int cmd_opt(const Globals& g, const std::string& path) {
  const PolicyResult r = brute_force_opt(load_instance(path));
  emit({{"solution", r.solution.opened}, {"cost", cost_json(r.cost)}}, g.out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-location facility location toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "Base random seed");
  app.add_option("--out", g.out, "Output file or directory");
  app.add_option("--workers", g.workers, "Worker threads for bench")->check(CLI::PositiveNumber);
  app.add_option("--tolerance", g.tolerance, "Override the check tolerance");

  GenArgs gen;
  auto* sg = app.add_subcommand("gen", "Generate a synthetic instance or load OD CSVs");
  sg->add_option("--n", gen.n, "Number of locations");
  sg->add_option("--fbar", gen.fbar, "Mean opening cost (or scale for --opening values)");
  sg->add_option("--iota", gen.iota, "Distance decay");
  sg->add_option("--centroids", gen.centroids, "CSV id,x,y");
  sg->add_option("--od", gen.od, "CSV home_id,work_id,count");
  sg->add_option("--opening", gen.opening, "CSV id,value");

  RunArgs run;
  auto* sr = app.add_subcommand("run", "Run one policy on an instance");
  sr->add_option("--instance", run.instance)->required();
  sr->add_option("--policy", run.policy)->check(CLI::IsMember({"2gr", "2grp", "jmmsv", "grh", "grw", "kgr", "opt"}));
  sr->add_option("--gamma", run.gamma);
  sr->add_option("--eta", run.eta, "Opening cost scalar (default 1, or K for kgr)");
  sr->add_option("--K", run.K)->check(CLI::PositiveNumber);
  sr->add_option("--sides", run.sides, "JSON rows of K locations per edge (kgr)");
  sr->add_option("--trace", run.trace, "Trace JSONL output path");

  BenchArgs bench;
  auto* sb = app.add_subcommand("bench", "Normalized-cost benchmark over the parameter grid");
  sb->add_option("--seeds", bench.seeds, "Number of consecutive seeds from --seed");
  sb->add_option("--n", bench.n);
  sb->add_option("--fbar", bench.fbar)->expected(1, -1);
  sb->add_option("--iota", bench.iota);
  sb->add_flag("--unpruned", bench.unpruned, "Normalize by 2-GR* instead of 2-GRP*");

  CertifyArgs cert;
  auto* sc = app.add_subcommand("certify", "Check trace properties and the dual certificate");
  sc->add_option("--instance", cert.instance)->required();
  sc->add_option("--trace", cert.trace, "Replay this trace instead of running the engine");
  sc->add_option("--gamma", cert.gamma);
  sc->add_option("--eta", cert.eta);
  sc->add_flag("--regions", cert.regions, "Also extract and check WFRP points per facility");

  FrpArgs frp;
  auto* sf = app.add_subcommand("frp", "Factor-revealing programs");
  sf->require_subcommand(1);
  auto frp_common = [&](CLI::App* s) {
    s->add_option("--gamma", frp.gamma);
    s->add_option("--eta", frp.eta);
    s->add_option("--K", frp.K);
    s->add_option("--chi", frp.chi)->delimiter(',');
  };
  auto* fb = sf->add_subcommand("build", "Summarize a program");
  fb->add_option("--kind", frp.kind)->required();
  fb->add_option("--size,--n,--m", frp.size);
  frp_common(fb);
  auto* fc = sf->add_subcommand("check", "Check a solution vector");
  fc->add_option("--kind", frp.kind)->required();
  fc->add_option("--size,--n,--m", frp.size);
  fc->add_option("--solution", frp.solution, "JSON file or - for stdin")->required();
  frp_common(fc);
  auto* fbt = sf->add_subcommand("batch", "Batch a weak solution into the strong program");
  fbt->add_option("--from", frp.from);
  fbt->add_option("--target", frp.target)->required();
  fbt->add_option("--solution", frp.solution)->required();
  frp_common(fbt);
  auto* fe = sf->add_subcommand("export", "Write the program as an LP file");
  fe->add_option("kind", frp.kind)->required();
  fe->add_option("--size,--n,--m", frp.size);
  fe->add_option("--dir", frp.dir);
  frp_common(fe);

  LowerBoundArgs lb;
  auto* sl = app.add_subcommand("lower-bound", "Instance from an LBLP solution and its ratio");
  sl->add_option("--solution", lb.solution)->required();
  sl->add_option("--eps", lb.eps)->expected(1, -1);
  sl->add_option("--gamma", lb.gamma);
  sl->add_option("--eta", lb.eta);
  sl->add_option("--save", lb.save, "Write the instance for the last eps");

  VcArgs vc;
  auto* sv = app.add_subcommand("vc", "Vertex cover reduction");
  sv->add_option("--graph", vc.graph)->required();
  sv->add_option("--sentinel", vc.sentinel, "Distance between distinct vertices (default inf)");
  sv->add_option("--gamma", vc.gamma);
  sv->add_option("--eta", vc.eta);

  std::string opt_instance;
  auto* so = app.add_subcommand("opt", "Exact optimum by enumeration");
  so->add_option("--instance", opt_instance)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (*sg) return cmd_gen(g, gen);
    if (*sr) return cmd_run(g, run);
    if (*sb) return cmd_bench(g, bench);
    if (*sc) return cmd_certify(g, cert);
    if (*fb) return cmd_frp_build(g, frp);
    if (*fc) return cmd_frp_check(g, frp);
    if (*fbt) return cmd_frp_batch(g, frp);
    if (*fe) return cmd_frp_export(g, frp);
    if (*sl) return cmd_lower_bound(g, lb);
    if (*sv) return cmd_vc(g, vc);
    if (*so) return cmd_opt(g, opt_instance);
  } catch (const Error& ex) {
    std::cerr << "lflp: " << ex.what() << '\n';
    return 2;
  } catch (const std::exception& ex) {
    std::cerr << "lflp: " << ex.what() << '\n';
    return 2;
  }
  return 2;
}
