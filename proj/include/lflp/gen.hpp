#pragma once

#include <cstdint>
#include <string>

#include "lflp/instance.hpp"

namespace lflp {

struct SynthConfig {
  int n = 30;
  std::uint64_t seed = 1;
  double fbar = 20.0;  // mean opening cost
  double iota = 0.2;   // distance decay in the commute choice model
  double pop_mean = 100.0;

  void validate() const;
};

// Independent, seedable stream for one generated field.
enum class Stream : std::uint64_t { Coords = 1, Population = 2, Attractiveness = 3, Opening = 4 };
std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t stream_seed(std::uint64_t seed, Stream s);

Instance gen_synthetic(const SynthConfig& cfg);

// Centroids CSV: id,x,y. OD CSV: home_id,work_id,count. Opening CSV: id,value;
// f = fbar * value. Up to 5% of ids may lack an opening value; those get the
// mean of the present values. A header row is skipped when its numeric
// columns do not parse.
Instance load_od(const std::string& centroid_csv, const std::string& od_csv,
                 const std::string& opening_csv, double fbar = 1.0);

}  // namespace lflp
