#include "lflp/gen.hpp"

#include <fstream>
#include <map>
#include <random>
#include <sstream>

namespace lflp {

void SynthConfig::validate() const {
  if (n < 2) throw Error(ErrorCode::InvalidParams, "n must be >= 2");
  if (!(fbar > 0.0) || is_inf(fbar)) throw Error(ErrorCode::InvalidParams, "fbar must be positive");
  if (!(iota >= 0.0) || is_inf(iota)) throw Error(ErrorCode::InvalidParams, "iota must be >= 0");
  if (!(pop_mean > 0.0)) throw Error(ErrorCode::InvalidParams, "population mean must be positive");
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t stream_seed(std::uint64_t seed, Stream s) {
  return splitmix64(splitmix64(seed) ^ static_cast<std::uint64_t>(s));
}

Instance gen_synthetic(const SynthConfig& cfg) {
  cfg.validate();
  const int n = cfg.n;
  std::mt19937_64 rc(stream_seed(cfg.seed, Stream::Coords));
  std::mt19937_64 rp(stream_seed(cfg.seed, Stream::Population));
  std::mt19937_64 ra(stream_seed(cfg.seed, Stream::Attractiveness));
  std::mt19937_64 ro(stream_seed(cfg.seed, Stream::Opening));
  std::normal_distribution<double> normal(0.0, 1.0);
  std::exponential_distribution<double> pop(1.0 / cfg.pop_mean);
  std::exponential_distribution<double> attr(1.0);
  std::exponential_distribution<double> cost(1.0 / cfg.fbar);

  std::vector<std::pair<double, double>> coords(n);
  for (auto& [x, y] : coords) {
    x = normal(rc);
    y = normal(rc);
  }
  std::vector<double> N(n), rho(n), f(n);
  for (double& v : N) v = pop(rp);
  for (double& v : rho) v = attr(ra);
  for (double& v : f) v = cost(ro);

  std::vector<Flow> flows;
  for (int i = 0; i < n; ++i) {
    std::vector<double> w(n);
    double total = 0.0;
    for (int j = 0; j < n; ++j) {
      const double d = std::hypot(coords[i].first - coords[j].first, coords[i].second - coords[j].second);
      w[j] = rho[j] * std::exp(-cfg.iota * d);
      total += w[j];
    }
    for (int j = 0; j < n; ++j) flows.push_back({i, j, N[i] * w[j] / total});
  }
  return Instance::from_coords(coords, flows, std::move(f));
}

namespace {

std::vector<std::vector<std::string>> read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IO, "cannot open " + path);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      const auto b = cell.find_first_not_of(" \t\"");
      const auto e = cell.find_last_not_of(" \t\"");
      cells.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
    }
    rows.push_back(std::move(cells));
  }
  return rows;
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  try {
    size_t used = 0;
    out = std::stod(s, &used);
    return used == s.size();
  } catch (const std::exception&) {
    return false;
  }
}

double need_double(const std::string& s, const std::string& where) {
  double v;
  if (!parse_double(s, v)) throw Error(ErrorCode::ParseError, where + ": not a number '" + s + "'");
  return v;
}

// Drops a header row whose numeric columns fail to parse.
void skip_header(std::vector<std::vector<std::string>>& rows, size_t numeric_col) {
  double tmp;
  if (!rows.empty() && rows[0].size() > numeric_col && !parse_double(rows[0][numeric_col], tmp))
    rows.erase(rows.begin());
}

}  // namespace

Instance load_od(const std::string& centroid_csv, const std::string& od_csv,
                 const std::string& opening_csv, double fbar) {
  auto cent = read_csv(centroid_csv);
  skip_header(cent, 1);
  std::map<std::string, int> index;
  std::vector<std::pair<double, double>> coords;
  for (size_t r = 0; r < cent.size(); ++r) {
    const auto& row = cent[r];
    const std::string where = centroid_csv + ":" + std::to_string(r + 1);
    if (row.size() < 3) throw Error(ErrorCode::ParseError, where + ": expected id,x,y");
    if (!index.emplace(row[0], static_cast<int>(coords.size())).second)
      throw Error(ErrorCode::ParseError, where + ": duplicate id " + row[0]);
    coords.emplace_back(need_double(row[1], where), need_double(row[2], where));
  }
  const int n = static_cast<int>(coords.size());
  auto lookup = [&](const std::string& id, const std::string& where) {
    auto it = index.find(id);
    if (it == index.end()) throw Error(ErrorCode::UnknownId, where + ": unknown id " + id);
    return it->second;
  };

  auto od = read_csv(od_csv);
  skip_header(od, 2);
  std::vector<Flow> flows;
  for (size_t r = 0; r < od.size(); ++r) {
    const auto& row = od[r];
    const std::string where = od_csv + ":" + std::to_string(r + 1);
    if (row.size() < 3) throw Error(ErrorCode::ParseError, where + ": expected home_id,work_id,count");
    const double count = need_double(row[2], where);
    if (count < 0) throw Error(ErrorCode::ParseError, where + ": negative count");
    flows.push_back({lookup(row[0], where), lookup(row[1], where), count});
  }

  auto op = read_csv(opening_csv);
  skip_header(op, 1);
  std::vector<double> value(n, 0.0);
  std::vector<char> present(n, 0);
  for (size_t r = 0; r < op.size(); ++r) {
    const auto& row = op[r];
    const std::string where = opening_csv + ":" + std::to_string(r + 1);
    if (row.size() < 2) throw Error(ErrorCode::ParseError, where + ": expected id,value");
    const int id = lookup(row[0], where);
    if (row[1].empty()) continue;
    value[id] = need_double(row[1], where);
    present[id] = 1;
  }
  int missing = 0;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    if (present[i])
      sum += value[i];
    else
      ++missing;
  }
  if (missing > 0) {
    if (missing * 20 > n)
      throw Error(ErrorCode::MissingData, std::to_string(missing) + " of " + std::to_string(n) +
                                              " ids lack an opening value (limit 5%)");
    const double mean = sum / (n - missing);
    for (int i = 0; i < n; ++i)
      if (!present[i]) value[i] = mean;
  }
  std::vector<double> f(n);
  for (int i = 0; i < n; ++i) f[i] = fbar * value[i];
  return Instance::from_coords(coords, flows, std::move(f));
}

}  // namespace lflp
