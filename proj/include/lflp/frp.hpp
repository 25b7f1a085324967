#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "lflp/common.hpp"

namespace lflp {

enum class ProgramKind { WFRP, SFRP, WFRP_MFLP, SFRP_MFLP, LBLP, SFRK };

const char* to_string(ProgramKind k);
ProgramKind program_kind_from_string(const std::string& s);

// Triangular programs index cells (a, b) with b <= a; the rest index l in [m].
bool is_triangular(ProgramKind k);

struct ProgramParams {
  int size = 1;  // m for one-dimensional programs, n for triangular ones
  double gamma = 1.0;
  double eta = 1.0;
  int K = 2;                // SFRK only
  std::vector<double> chi;  // WFRP only, one entry per index
};

enum class Field { F, Alpha, D, C, Q };

// 0-based cell index of (a, b), b <= a, in a triangular program.
inline int tri_index(int a, int b) { return a * (a + 1) / 2 + b; }
inline int tri_cells(int n) { return n * (n + 1) / 2; }

struct FRSolution {
  double f = 0.0;
  std::vector<double> alpha, d, c, q;  // per cell; c or q empty when the kind lacks it

  static FRSolution zeros(ProgramKind kind, int size);
};

nlohmann::json to_json(const FRSolution& s);
FRSolution frsolution_from_json(const nlohmann::json& j);

// Linear expression over variables, optionally containing min(x, y) atoms.
struct LinExpr {
  std::vector<std::pair<int, double>> terms;
  struct MinAtom {
    int x, y;
    double coef;
  };
  std::vector<MinAtom> mins;
  double constant = 0.0;
};

// coef * [q *] v, or coef * [q *] (inner)^+.
struct Term {
  enum class Kind { Linear, PlusPart } kind = Kind::Linear;
  double coef = 1.0;
  int var = -1;   // Linear
  int qvar = -1;  // optional multiplier
  LinExpr inner;  // PlusPart
};

enum class Sense { LE, EQ, GE };

struct Constraint {
  std::string family;
  std::string name;
  std::vector<Term> lhs;
  Sense sense = Sense::LE;
  double rhs = 0.0;
};

struct FRProgram {
  ProgramKind kind = ProgramKind::SFRP;
  ProgramParams params;
  int cells = 0;
  std::vector<Field> fields;  // per-cell fields present, in layout order
  std::vector<std::string> var_names;
  std::vector<Term> objective;
  std::vector<Constraint> constraints;
  std::vector<std::string> families;  // in first-appearance order
  bool theory_warning = false;

  int var(Field field, int cell) const;
  int num_vars() const { return static_cast<int>(var_names.size()); }
  std::vector<double> flatten(const FRSolution& s) const;
  std::string file_stem() const;
};

FRProgram build(ProgramKind kind, const ProgramParams& params);

struct Violation {
  std::string family;
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
};

struct CheckReport {
  bool feasible = true;
  double objective = 0.0;
  std::vector<Violation> violations;
};

inline constexpr double kCheckTol = 1e-8;

CheckReport check_solution(const FRProgram& prog, const FRSolution& sol,
                           double tol = kCheckTol);
// Value of one constraint's left-hand side.
double eval_lhs(const Constraint& c, const std::vector<double>& x);
double eval_objective(const FRProgram& prog, const FRSolution& sol);

// Converts a WFRP(m, chi, gamma, eta) solution into an SFRP(n, gamma, eta)
// solution by grouping indices along pivot alpha-levels.
FRSolution batch_wfrp_to_sfrp(const ProgramParams& wfrp, const FRSolution& sol, int n);

// Folds indices with d > alpha into the largest-alpha index. Returns the
// surviving WFRP instance (params with the reduced chi) and solution.
std::pair<ProgramParams, FRSolution> fold_distance_upperbound(const ProgramParams& wfrp,
                                                              const FRSolution& sol);

// Consecutive uniform batching of a WFRP_MFLP(m) solution into SFRP_MFLP(n).
FRSolution batch_mflp(const FRSolution& sol, int n);
// 1-based start of block a (1 <= a <= n) when batching m indices into n.
int mflp_block_start(int m, int n, int a);

// SFRK(n, K) solution to SFRK(n, K') with alpha, d, c scaled by K'/K.
FRSolution scale_k_solution(const FRSolution& sol, int K, int K_new);

// CPLEX-style LP text; (.)^+ terms become auxiliary variables.
std::string export_lp_text(const FRProgram& prog);
// Writes {dir}/{stem}.lp and returns the path.
std::string export_lp(const FRProgram& prog, const std::string& dir);

}  // namespace lflp
