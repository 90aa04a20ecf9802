#include "udg/gen.hpp"

#include <cmath>
#include <numbers>

#include "udg/rng.hpp"

namespace udg {

GenKind parse_gen_kind(const std::string& name) {
  if (name == "uniform") return GenKind::Uniform;
  if (name == "clusters") return GenKind::Clusters;
  if (name == "onecell") return GenKind::OneCell;
  if (name == "chain") return GenKind::Chain;
  throw Error(ErrorCode::ParseError, "unknown generator '" + name + "'");
}

const char* to_string(GenKind kind) {
  switch (kind) {
    case GenKind::Uniform:
      return "uniform";
    case GenKind::Clusters:
      return "clusters";
    case GenKind::OneCell:
      return "onecell";
    case GenKind::Chain:
      return "chain";
  }
  return "?";
}

std::vector<Point> generate_points(GenKind kind, std::size_t n, std::uint64_t seed, double density) {
  if (!(density > 0.0)) throw Error(ErrorCode::ParseError, "density must be positive");
  Rng rng(seed);
  std::vector<Point> out;
  out.reserve(n);
  const double side = std::sqrt(static_cast<double>(n)) / density;
  switch (kind) {
    case GenKind::Uniform:
      for (std::size_t i = 0; i < n; ++i) out.push_back({rng.uniform(0.0, side), rng.uniform(0.0, side)});
      break;
    case GenKind::Clusters: {
      const std::size_t k = std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(static_cast<double>(n)) / 4));
      std::vector<Point> centers;
      for (std::size_t c = 0; c < k; ++c) centers.push_back({rng.uniform(0.0, side), rng.uniform(0.0, side)});
      for (std::size_t i = 0; i < n; ++i) {
        const Point c = centers[rng.below(k)];
        out.push_back({c.x + 0.75 * rng.normal(), c.y + 0.75 * rng.normal()});
      }
      break;
    }
    case GenKind::OneCell:
      for (std::size_t i = 0; i < n; ++i) out.push_back({rng.uniform(0.0, 0.5), rng.uniform(0.0, 0.5)});
      break;
    case GenKind::Chain: {
      Point p{0.0, 0.0};
      double heading = rng.uniform(0.0, 2.0 * std::numbers::pi);
      for (std::size_t i = 0; i < n; ++i) {
        out.push_back(p);
        heading += 0.3 * rng.normal();
        const double step = rng.uniform(0.3, 0.95);
        p = p + Point{step * std::cos(heading), step * std::sin(heading)};
      }
      break;
    }
  }
  return out;
}

std::vector<WeightedSite> generate_sites(std::size_t n, std::uint64_t seed, double width, double wmax) {
  Rng rng(seed);
  std::vector<WeightedSite> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = rng.uniform(-width, width);
    const double y = rng.uniform(-3.0, -0.01);
    out.push_back({static_cast<int>(i), x, y, rng.uniform(-wmax, wmax)});
  }
  return out;
}

std::vector<NNOp> generate_ops(std::size_t n, std::uint64_t seed, double query_share, double width) {
  Rng rng(seed);
  std::vector<NNOp> ops;
  ops.reserve(n);
  int id = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0 && rng.uniform() < query_share) {
      ops.push_back(QueryOp{{rng.uniform(-width, width), rng.uniform(0.0, 3.0)}});
    } else {
      const double x = rng.uniform(-width, width);
      const double y = rng.uniform(-3.0, -0.01);
      ops.push_back(InsertOp{{id++, x, y, rng.uniform(-1.0, 1.0)}});
    }
  }
  return ops;
}

}  // namespace udg
