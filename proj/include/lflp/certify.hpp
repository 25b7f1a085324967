#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "lflp/engine.hpp"
#include "lflp/frp.hpp"
#include "lflp/instance.hpp"

namespace lflp {

inline constexpr double kCertTol = 1e-7;

struct StructuralViolation {
  std::string item;  // "i", "ii" or "iii"
  int facility = -1;
  int edge = -1, side = -1;
  int edge2 = -1, side2 = -1;
  double lhs = 0.0, rhs = 0.0;
};

struct StructuralReport {
  std::vector<StructuralViolation> violations;
  long checks = 0;
  bool ok() const { return violations.empty(); }
};

// Exhaustive check of the three trace properties for a two-location trace.
StructuralReport check_structural(const Instance& inst, const Trace& trace, double gamma,
                                  double eta, double tol = kCertTol);
// Throws ViolationFound with the first witness.
void require_structural(const Instance& inst, const Trace& trace, double gamma, double eta,
                        double tol = kCertTol);

nlohmann::json to_json(const StructuralViolation& v);

struct DualCertificate {
  std::vector<double> mu;
  std::vector<int> edge_class;  // 1 or 2
  std::vector<int> h_side;      // side playing H in the formula, -1 if none
  double total = 0.0;
  double cost = 0.0;
};

// Per-edge duals; throws CertificateFailure when their sum falls short of the
// solution cost.
DualCertificate dual_certificate(const Instance& inst, const Trace& trace, double gamma,
                                 double eta, double tol = kCertTol);

// sigma_i(e): 0 (H) unless the W side is strictly closer to i.
int sigma_side(const Instance& inst, const Edge& e, int i);

struct ServiceRegion {
  int facility = -1;
  std::vector<int> edges;
};

struct RegionSolution {
  ProgramParams params;  // WFRP parameters, chi included
  FRSolution sol;
  double N = 0.0;
  std::vector<int> source_edge;  // per unit copy
};

// Normalized WFRP point built from a region of a trace; edges are expanded
// into unit copies, so masses must be integral.
RegionSolution wfrp_from_region(const Instance& inst, const Trace& trace, double gamma, double eta,
                                const ServiceRegion& region);

}  // namespace lflp
