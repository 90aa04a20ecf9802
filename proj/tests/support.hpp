#pragma once

#include <vector>

#include "udg/rng.hpp"
#include "udg/vdplus.hpp"

namespace udg::test {

inline std::vector<WeightedSite> random_sites(Rng& rng, int n, int first_id = 0, double width = 10.0,
                                              double ylo = -3.0, double yhi = -0.01, double wmax = 1.0) {
  std::vector<WeightedSite> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    out.push_back({first_id + i, rng.uniform(-width, width), rng.uniform(ylo, yhi), rng.uniform(-wmax, wmax)});
  }
  return out;
}

inline Point random_query(Rng& rng, double width) {
  if (rng.uniform() < 0.1) return {rng.uniform(-50 * width, 50 * width), rng.uniform(0.0, 50 * width)};
  return {rng.uniform(-1.2 * width, 1.2 * width), rng.uniform(0.0, 10.0)};
}

// Weighted distances of the best and second-best sites at q.
inline std::pair<double, double> top_two(const std::vector<WeightedSite>& sites, Point q) {
  double a = kInf;
  double b = kInf;
  for (const auto& s : sites) {
    const double d = weighted_distance(s, q);
    if (d < a) {
      b = a;
      a = d;
    } else if (d < b) {
      b = d;
    }
  }
  return {a, b};
}

}  // namespace udg::test
