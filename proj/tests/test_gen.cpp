#include <catch2/catch_amalgamated.hpp>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>

#include "lflp/gen.hpp"

using namespace lflp;
using Catch::Approx;

namespace {

const std::string kData = LFLP_DATA_DIR;

struct TempDir {
  std::filesystem::path path;
  TempDir() : path(std::filesystem::temp_directory_path() / "lflp_test_gen") {
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(path / name) << text;
    return (path / name).string();
  }
};

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::IO;
}

std::vector<double> row_sums(const Instance& inst) {
  std::vector<double> s(inst.n(), 0.0);
  for (const Edge& e : inst.edges()) s[e.h] += e.mass;
  return s;
}

}  // namespace

TEST_CASE("stream seeds are distinct and stable", "[gen]") {
  CHECK(splitmix64(0) == 0xe220a8397b1dcdafULL);
  CHECK(stream_seed(1, Stream::Coords) != stream_seed(1, Stream::Population));
  CHECK(stream_seed(1, Stream::Coords) != stream_seed(2, Stream::Coords));
  CHECK(stream_seed(7, Stream::Opening) == stream_seed(7, Stream::Opening));
}

TEST_CASE("synthetic generation is deterministic per seed", "[gen]") {
  SynthConfig cfg;
  cfg.n = 15;
  cfg.seed = 9;
  CHECK(to_json(gen_synthetic(cfg)).dump() == to_json(gen_synthetic(cfg)).dump());
  SynthConfig other = cfg;
  other.seed = 10;
  CHECK(to_json(gen_synthetic(cfg)).dump() != to_json(gen_synthetic(other)).dump());
}

TEST_CASE("changing fbar leaves the other streams untouched", "[gen]") {
  SynthConfig a;
  a.n = 10;
  SynthConfig b = a;
  b.fbar = 100;
  Instance ia = gen_synthetic(a), ib = gen_synthetic(b);
  CHECK(ia.dist() == ib.dist());
  REQUIRE(ia.edges().size() == ib.edges().size());
  for (size_t e = 0; e < ia.edges().size(); ++e) CHECK(ia.edges()[e].mass == ib.edges()[e].mass);
  for (int i = 0; i < a.n; ++i) CHECK(ib.f(i) == Approx(5 * ia.f(i)));
}

TEST_CASE("synthetic config validation", "[gen]") {
  SynthConfig cfg;
  cfg.n = 1;
  CHECK_THROWS_AS(gen_synthetic(cfg), Error);
  cfg.n = 5;
  cfg.fbar = 0;
  CHECK_THROWS_AS(gen_synthetic(cfg), Error);
  cfg.fbar = 1;
  cfg.iota = -1;
  CHECK_THROWS_AS(gen_synthetic(cfg), Error);
}

TEST_CASE("zero decay gives proportional rows", "[gen]") {
  SynthConfig cfg;
  cfg.n = 8;
  cfg.iota = 0;
  Instance inst = gen_synthetic(cfg);
  const auto sums = row_sums(inst);
  for (int w = 0; w < inst.n(); ++w) {
    const double share = inst.edges()[inst.find_edge(0, w)].mass / sums[0];
    for (int h = 1; h < inst.n(); ++h)
      CHECK(inst.edges()[inst.find_edge(h, w)].mass / sums[h] == Approx(share).epsilon(1e-12));
  }
}

TEST_CASE("property: synthetic rows are nonnegative and sum to the population", "[gen][property]") {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    SynthConfig cfg;
    cfg.n = 2 + static_cast<int>(seed % 20);
    cfg.seed = seed;
    cfg.iota = (seed % 5) * 0.25;
    Instance inst = gen_synthetic(cfg);
    CHECK(inst.coords().has_value());
    for (const Edge& e : inst.edges()) CHECK(e.mass > 0.0);
    const auto sums = row_sums(inst);
    // Populations are redrawn from their own stream.
    std::mt19937_64 rp(stream_seed(seed, Stream::Population));
    std::exponential_distribution<double> pop(1.0 / cfg.pop_mean);
    for (int h = 0; h < inst.n(); ++h) {
      const double N = pop(rp);
      CHECK(inst.find_edge(h, h) >= 0);
      CHECK(std::abs(sums[h] - N) <= 1e-9 * N);
    }
    CHECK(to_json(instance_from_json(to_json(inst))) == to_json(inst));
  }
}

TEST_CASE("OD loader builds the toy fixture", "[gen]") {
  Instance inst =
      load_od(kData + "/od_centroids.csv", kData + "/od_flows.csv", kData + "/od_opening.csv", 2.0);
  CHECK(inst.n() == 3);
  CHECK(inst.d(0, 1) == 3.0);
  CHECK(inst.d(0, 2) == 4.0);
  CHECK(inst.d(1, 2) == 5.0);
  CHECK(inst.opening() == std::vector<double>{3.0, 4.0, 1.0});
  REQUIRE(inst.edges().size() == 3);
  CHECK(inst.edges()[inst.find_edge(0, 1)].mass == 6.0);
  CHECK(inst.edges()[inst.find_edge(1, 2)].mass == 2.0);
  CHECK(inst.edges()[inst.find_edge(2, 2)].mass == 4.0);
  CHECK(to_json(instance_from_json(to_json(inst))) == to_json(inst));
}

TEST_CASE("OD loader fills a few missing opening values with the mean", "[gen]") {
  TempDir tmp;
  std::string cent = "id,x,y\n", open = "id,value\n";
  for (int i = 0; i < 20; ++i) {
    cent += "z" + std::to_string(i) + "," + std::to_string(i) + ",0\n";
    if (i != 7) open += "z" + std::to_string(i) + "," + std::to_string(i + 1) + "\n";
  }
  const std::string c = tmp.write("c.csv", cent), o = tmp.write("o.csv", open);
  const std::string od = tmp.write("od.csv", "z0,z1,3\n");
  Instance inst = load_od(c, od, o);
  double mean = 0.0;
  for (int i = 0; i < 20; ++i)
    if (i != 7) mean += i + 1;
  mean /= 19;
  CHECK(inst.f(7) == Approx(mean));
  CHECK(inst.f(3) == 4.0);

  const std::string few = tmp.write("few.csv", "id,value\nz0,1\n");
  CHECK(code_of([&] { load_od(c, od, few); }) == ErrorCode::MissingData);
}

TEST_CASE("OD loader errors", "[gen]") {
  TempDir tmp;
  const std::string c = tmp.write("c.csv", "A,0,0\nB,1,0\n");
  const std::string o = tmp.write("o.csv", "A,1\nB,1\n");
  CHECK(code_of([&] { load_od(c, tmp.write("od.csv", "A,Q,1\n"), o); }) == ErrorCode::UnknownId);
  CHECK(code_of([&] { load_od(c, tmp.write("od2.csv", "A,B,1\nA,B,x\n"), o); }) == ErrorCode::ParseError);
  CHECK(code_of([&] { load_od(c, tmp.write("od3.csv", "A,B,-1\n"), o); }) == ErrorCode::ParseError);
  CHECK(code_of([&] { load_od(tmp.write("dup.csv", "A,0,0\nA,1,0\n"), tmp.write("od4.csv", ""), o); }) ==
        ErrorCode::ParseError);
  CHECK(code_of([&] { load_od(c, tmp.write("od5.csv", "A,B,1\nA,B\n"), o); }) == ErrorCode::ParseError);
  CHECK(code_of([&] { load_od(c, (tmp.path / "missing.csv").string(), o); }) == ErrorCode::IO);
}
