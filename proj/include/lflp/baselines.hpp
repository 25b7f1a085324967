#pragma once

#include <vector>

#include "lflp/engine.hpp"
#include "lflp/instance.hpp"

namespace lflp {

// Classic single-location demand: clients with a mass and a distance to every
// facility.
struct ClientInstance {
  std::vector<double> f;
  std::vector<double> mass;
  std::vector<std::vector<double>> dist;  // [client][facility]

  int facilities() const { return static_cast<int>(f.size()); }
  int clients() const { return static_cast<int>(mass.size()); }
};

// Each edge becomes a client at distance d(e, i).
ClientInstance edge_expansion(const Instance& inst);
// Each location becomes a client carrying the mass of edges whose home (or
// work) it is; the other location is ignored.
ClientInstance project_home(const Instance& inst);
ClientInstance project_work(const Instance& inst);

struct ClientResult {
  Solution solution;
  std::vector<double> alpha;
  std::vector<int> served_by;
  std::vector<Event> events;  // Connect events carry the client in `edge`
};

ClientResult jmmsv_clients(const ClientInstance& ci);

// JMMSV on the edge expansion of inst, reported as a one-sided trace.
EngineResult jmmsv(const Instance& inst);

struct PolicyResult {
  Solution solution;
  CostReport cost;  // evaluated on the two-location instance
};

PolicyResult gr_home(const Instance& inst);
PolicyResult gr_work(const Instance& inst);

Solution myopic_prune(const Instance& inst, const Solution& sol);

inline constexpr int kBruteForceMaxN = 22;

// Exact optimum by subset enumeration; ties go to the lexicographically
// smallest set. Throws BudgetExceeded when n > kBruteForceMaxN.
PolicyResult brute_force_opt(const Instance& inst);

}  // namespace lflp
