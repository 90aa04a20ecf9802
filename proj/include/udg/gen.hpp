// Seeded instance generators for the SSSP solvers and the benchmarks.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "udg/awnn.hpp"
#include "udg/geom.hpp"

namespace udg {

enum class GenKind { Uniform, Clusters, OneCell, Chain };

// Throws ParseError for an unknown name.
GenKind parse_gen_kind(const std::string& name);
const char* to_string(GenKind kind);

// uniform: square of side sqrt(n) / density. clusters: Gaussian blobs with
// centers in that square. onecell: every point in the cell [0, 1/2)^2.
// chain: a turning walk with steps in [0.3, 0.95].
std::vector<Point> generate_points(GenKind kind, std::size_t n, std::uint64_t seed, double density = 1.0);

// Sites below the axis with weights in [-wmax, wmax].
std::vector<WeightedSite> generate_sites(std::size_t n, std::uint64_t seed, double width, double wmax = 1.0);

// n mixed ops, the first an insert. Sites as above, queries in
// [-width, width] x [0, 3].
std::vector<NNOp> generate_ops(std::size_t n, std::uint64_t seed, double query_share = 0.5, double width = 30.0);

}  // namespace udg
