#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "lflp/instance.hpp"

namespace lflp {

struct Params {
  double gamma = 1.0;
  double eta = 1.0;

  void validate() const;
  // True when eta lies outside [1, 1 + gamma], where the analysis applies.
  bool outside_theory_range() const;
};

enum class EventKind { Open, Connect };

struct Event {
  EventKind kind = EventKind::Open;
  double t = 0.0;
  int facility = -1;
  int edge = -1;  // Connect only
  int side = -1;  // Connect only; 0 = H, 1 = W for two-location edges
};

inline constexpr int kNone = -1;

struct Trace {
  int K = 2;
  std::vector<Event> events;
  std::vector<double> alpha;                      // per edge
  std::vector<std::vector<int>> psi;              // [edge][side], kNone if unconnected
  std::vector<std::vector<double>> connect_time;  // [edge][side], termination if unconnected
  double termination = 0.0;

  std::vector<int> opened() const;
};

struct EngineResult {
  Solution solution;
  Trace trace;
  CostReport cost;
  bool eta_warning = false;
};

// A hyperedge view of an instance: each edge carries K locations.
struct SideMap {
  int K = 2;
  std::vector<std::vector<int>> sides;  // [edge][L]

  static SideMap two_location(const Instance& inst);
  static SideMap home_only(const Instance& inst);
};

// Discount vector for the K-side process, indexed by the number of connected
// sides; must satisfy 1 = g[0] >= g[1] >= ... >= g[K] = 0.
std::vector<double> canonical_discounts(int K);
void validate_discounts(const std::vector<double>& discounts, int K);

// Cost under the K-side rule: each edge pays its mass times the distance from
// the nearest of its locations to the nearest opened facility.
CostReport hyper_cost(const Instance& inst, const SideMap& sides, const Solution& sol);

// One growing term mass * (t - d)^+ of the opening condition.
struct Breakpoint {
  double d = 0.0;
  double mass = 0.0;
};

// Smallest t >= t_now with frozen + sum mass*(t - d)^+ >= target, given
// breakpoints sorted by d. Returns inf when the sum never reaches target.
double lhs_crossing_time(double t_now, double frozen, const std::vector<Breakpoint>& sorted,
                         double target);

// Event-driven state of the K-side greedy process. Exposed so tests can probe
// intermediate states; run_k_chance drives it to completion.
class ChanceProcess {
 public:
  ChanceProcess(const Instance& inst, const SideMap& sides, std::vector<double> discounts,
                double eta);

  bool done() const { return n_unconnected_ == 0; }
  double now() const { return t_; }

  // Earliest time an unconnected edge reaches an opened facility.
  double next_event_a_time() const;
  // Exact crossing time of facility i's opening condition from the current
  // state; inf when it never fires. i must be unopened.
  double next_event_b_time(int i) const;
  // Left-hand side of facility i's opening condition at time t >= now().
  double opening_lhs(int i, double t) const;

  // Advances to the next event instant and processes every event there.
  void step();
  void run();

  EngineResult result() const;

 private:
  double side_dist(int e, int L, int i) const;
  void open(int i, double t);
  void connect(int e, int L, int i, double t);
  void remove_from_u(int e, int i, double t);
  void process_instant(double t);

  const Instance* inst_;
  SideMap sides_;
  std::vector<double> disc_;
  double eta_;
  int n_ = 0, m_ = 0;

  std::vector<double> dmin_;              // [i * m + e] = min over sides
  std::vector<std::vector<int>> order_;   // per facility, edges sorted by dmin
  std::vector<char> in_u_;
  std::vector<int> nconn_;
  std::vector<double> best_open_;         // per edge, min dmin over opened facilities
  std::vector<char> is_open_;
  std::vector<int> opened_;               // in opening order
  int n_unconnected_ = 0;
  double t_ = 0.0;
  long batches_ = 0;
  Trace trace_;
};

EngineResult run_two_chance(const Instance& inst, const Params& p);
EngineResult run_k_chance(const Instance& inst, int K, const std::vector<double>& discounts,
                          double eta, const SideMap& side_map);

// JSON Lines trace serialization; one event per line.
void write_trace_jsonl(const Instance& inst, const Trace& trace, std::ostream& out);
// Rebuilds alpha, psi and connect times from the event log alone.
Trace read_trace_jsonl(const Instance& inst, std::istream& in);

}  // namespace lflp
