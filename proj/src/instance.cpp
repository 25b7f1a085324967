#include "lflp/instance.hpp"

#include <algorithm>
#include <fstream>
#include <map>

namespace lflp {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidInstance: return "InvalidInstance";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::NonTermination: return "NonTermination";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::ViolationFound: return "ViolationFound";
    case ErrorCode::CertificateFailure: return "CertificateFailure";
    case ErrorCode::DegenerateRegion: return "DegenerateRegion";
    case ErrorCode::NonIntegralMass: return "NonIntegralMass";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::InfeasibleInput: return "InfeasibleInput";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::UnknownId: return "UnknownId";
    case ErrorCode::MissingData: return "MissingData";
    case ErrorCode::IO: return "IO";
  }
  return "Error";
}

Instance Instance::from_matrix(int n, std::vector<double> dist,
                               const std::vector<Flow>& flows,
                               std::vector<double> opening) {
  if (n < 0) throw Error(ErrorCode::InvalidInstance, "negative n");
  if (dist.size() != static_cast<size_t>(n) * n)
    throw Error(ErrorCode::InvalidInstance, "distance matrix must be n x n");
  if (opening.size() != static_cast<size_t>(n))
    throw Error(ErrorCode::InvalidInstance, "opening vector must have n entries");
  for (int i = 0; i < n; ++i) {
    if (dist[static_cast<size_t>(i) * n + i] != 0.0)
      throw Error(ErrorCode::InvalidInstance, "nonzero diagonal at " + std::to_string(i));
    for (int j = 0; j < n; ++j) {
      double a = dist[static_cast<size_t>(i) * n + j];
      if (std::isnan(a) || a < 0.0)
        throw Error(ErrorCode::InvalidInstance, "negative or NaN distance");
      if (a != dist[static_cast<size_t>(j) * n + i])
        throw Error(ErrorCode::InvalidInstance, "asymmetric distance matrix");
    }
    if (std::isnan(opening[i]) || opening[i] < 0.0)
      throw Error(ErrorCode::InvalidInstance, "negative or NaN opening cost");
  }
  std::map<std::pair<int, int>, double> merged;
  for (const Flow& fl : flows) {
    if (fl.h < 0 || fl.h >= n || fl.w < 0 || fl.w >= n)
      throw Error(ErrorCode::InvalidInstance, "flow endpoint out of range");
    if (!std::isfinite(fl.mass) || fl.mass < 0.0)
      throw Error(ErrorCode::InvalidInstance, "flow mass must be finite and >= 0");
    if (fl.mass == 0.0) continue;
    merged[{fl.h, fl.w}] += fl.mass;
  }
  Instance inst;
  inst.n_ = n;
  inst.dist_ = std::move(dist);
  inst.opening_ = std::move(opening);
  for (const auto& [key, mass] : merged) inst.edges_.push_back({key.first, key.second, mass});
  return inst;
}

Instance Instance::from_coords(const std::vector<std::pair<double, double>>& coords,
                               const std::vector<Flow>& flows,
                               std::vector<double> opening) {
  const int n = static_cast<int>(coords.size());
  std::vector<double> dist(static_cast<size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double v = std::hypot(coords[i].first - coords[j].first,
                            coords[i].second - coords[j].second);
      dist[static_cast<size_t>(i) * n + j] = v;
      dist[static_cast<size_t>(j) * n + i] = v;
    }
  Instance inst = from_matrix(n, std::move(dist), flows, std::move(opening));
  inst.metric_ = true;
  inst.coords_ = coords;
  return inst;
}

int Instance::find_edge(int h, int w) const {
  auto it = std::lower_bound(edges_.begin(), edges_.end(), std::make_pair(h, w),
                             [](const Edge& e, const std::pair<int, int>& key) {
                               return std::make_pair(e.h, e.w) < key;
                             });
  if (it == edges_.end() || it->h != h || it->w != w) return -1;
  return static_cast<int>(it - edges_.begin());
}

Instance Instance::with_opening(std::vector<double> opening) const {
  if (opening.size() != opening_.size())
    throw Error(ErrorCode::InvalidInstance, "opening vector must have n entries");
  Instance copy = *this;
  copy.opening_ = std::move(opening);
  return copy;
}

Instance Instance::with_metric_flag(bool metric) const {
  Instance copy = *this;
  copy.metric_ = metric;
  return copy;
}

Solution Solution::of(std::vector<int> ids) {
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return Solution{std::move(ids)};
}

bool Solution::contains(int i) const {
  return std::binary_search(opened.begin(), opened.end(), i);
}

double edge_distance(const Instance& inst, const Edge& e, int i) {
  return std::min(inst.d(e.h, i), inst.d(e.w, i));
}

CostReport total_cost(const Instance& inst, const Solution& sol) {
  CostReport rep;
  for (int i : sol.opened) rep.opening_cost += inst.f(i);
  rep.assignment.assign(inst.edges().size(), -1);
  for (size_t k = 0; k < inst.edges().size(); ++k) {
    const Edge& e = inst.edges()[k];
    double best = kInf;
    for (int i : sol.opened) {
      double v = edge_distance(inst, e, i);
      if (v < best) {
        best = v;
        rep.assignment[k] = i;
      }
    }
    if (is_inf(best)) {
      ++rep.unserved;
      rep.assignment[k] = -1;
      rep.connection_cost = kInf;
    } else {
      rep.connection_cost += e.mass * best;
    }
  }
  rep.total = rep.opening_cost + rep.connection_cost;
  return rep;
}

std::vector<Triple> check_metric(const Instance& inst) {
  std::vector<Triple> out;
  const int n = inst.n();
  for (int i = 0; i < n; ++i)
    for (int k = i + 1; k < n; ++k) {
      double dik = inst.d(i, k);
      for (int j = 0; j < n; ++j) {
        if (j == i || j == k) continue;
        double a = inst.d(i, j), b = inst.d(j, k);
        if (is_inf(a) || is_inf(b) || is_inf(dik)) continue;
        if (dik > a + b + kTol) {
          out.push_back({i, j, k});
          break;
        }
      }
    }
  return out;
}

nlohmann::json real_to_json(double x) {
  if (is_inf(x)) return "inf";
  return x;
}

double real_from_json(const nlohmann::json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "inf") return kInf;
    throw Error(ErrorCode::ParseError, "unexpected string " + j.get<std::string>());
  }
  if (!j.is_number()) throw Error(ErrorCode::ParseError, "expected a number");
  return j.get<double>();
}

nlohmann::json to_json(const Instance& inst) {
  nlohmann::json j;
  j["n"] = inst.n();
  if (inst.coords()) {
    nlohmann::json cs = nlohmann::json::array();
    for (auto [x, y] : *inst.coords()) cs.push_back({x, y});
    j["coords"] = cs;
  } else {
    nlohmann::json rows = nlohmann::json::array();
    for (int i = 0; i < inst.n(); ++i) {
      nlohmann::json row = nlohmann::json::array();
      for (int k = 0; k < inst.n(); ++k) row.push_back(real_to_json(inst.d(i, k)));
      rows.push_back(row);
    }
    j["dist"] = rows;
  }
  nlohmann::json op = nlohmann::json::array();
  for (double f : inst.opening()) op.push_back(real_to_json(f));
  j["opening"] = op;
  nlohmann::json fl = nlohmann::json::array();
  for (const Edge& e : inst.edges()) fl.push_back({e.h, e.w, e.mass});
  j["flows"] = fl;
  if (!inst.coords() && inst.metric()) j["metric"] = true;
  return j;
}

Instance instance_from_json(const nlohmann::json& j) {
  try {
    const int n = j.at("n").get<int>();
    std::vector<double> opening;
    for (const auto& v : j.at("opening")) opening.push_back(real_from_json(v));
    std::vector<Flow> flows;
    for (const auto& f : j.at("flows")) {
      if (!f.is_array() || f.size() != 3) throw Error(ErrorCode::ParseError, "flow must be [h,w,mass]");
      flows.push_back({f[0].get<int>(), f[1].get<int>(), real_from_json(f[2])});
    }
    const bool has_coords = j.contains("coords"), has_dist = j.contains("dist");
    if (has_coords == has_dist)
      throw Error(ErrorCode::ParseError, "exactly one of coords/dist is required");
    if (has_coords) {
      std::vector<std::pair<double, double>> coords;
      for (const auto& c : j.at("coords")) coords.emplace_back(c.at(0).get<double>(), c.at(1).get<double>());
      if (static_cast<int>(coords.size()) != n) throw Error(ErrorCode::ParseError, "coords size != n");
      return Instance::from_coords(coords, flows, std::move(opening));
    }
    std::vector<double> dist;
    const auto& rows = j.at("dist");
    if (static_cast<int>(rows.size()) != n) throw Error(ErrorCode::ParseError, "dist rows != n");
    for (const auto& row : rows) {
      if (static_cast<int>(row.size()) != n) throw Error(ErrorCode::ParseError, "dist cols != n");
      for (const auto& v : row) dist.push_back(real_from_json(v));
    }
    Instance inst = Instance::from_matrix(n, std::move(dist), flows, std::move(opening));
    if (j.value("metric", false)) inst = inst.with_metric_flag(true);
    return inst;
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorCode::ParseError, ex.what());
  }
}

Instance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IO, "cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorCode::ParseError, ex.what());
  }
  return instance_from_json(j);
}

void save_instance(const Instance& inst, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IO, "cannot write " + path);
  out << to_json(inst).dump(1) << "\n";
}

}  // namespace lflp
