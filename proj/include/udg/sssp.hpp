// Single-source shortest paths in weighted unit-disk graphs.
//
// Points are bucketed into a grid of side-1/2 cells: two points in one cell
// are always adjacent, and every neighbor of a point lies in the 5x5 patch
// around its cell. The main loop repeatedly takes the active point c with the
// smallest tentative distance, relaxes the active points of every cell in
// c's patch into c's cell and back, and then retires c's cell.
//
// A cell-pair relaxation sorts the source points by distance, assigns each
// target to its first adjacent source, and answers all targets with a single
// insertion-only nearest-neighbor structure filled from the back of that
// order. Same-cell relaxations split at the median and query half-plane
// diagrams of one half from the other.

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <utility>
#include <span>
#include <unordered_map>
#include <vector>

#include "udg/geom.hpp"

namespace udg {

struct Cell {
  std::int64_t i = 0;
  std::int64_t j = 0;
  bool operator==(const Cell&) const = default;
};

struct CellHash {
  std::size_t operator()(const Cell& c) const {
    return std::hash<std::int64_t>()(c.i * 0x9e3779b97f4a7c15LL ^ c.j);
  }
};

// Half-open cell [i/2, (i+1)/2) x [j/2, (j+1)/2).
Cell cell_of(Point p);

struct GridIndex {
  std::vector<Cell> cell;  // per point
  std::unordered_map<Cell, std::vector<int>, CellHash> members;
};

GridIndex build_grid(std::span<const Point> pts);

// The 25 cells around c in row-major order (j outer, i inner, ascending).
std::array<Cell, 25> patch(Cell c);

struct DistTable {
  std::vector<double> dist;
  std::vector<int> pred;  // -1 for the source and unreached points
};

// Rotation by a multiple of 90 degrees followed by a translation. Applied to
// a cell pair it puts the source points strictly below the x-axis and the
// target points on or above it.
struct Isometry {
  int quarter_turns = 0;
  Point shift;

  Point apply(Point p) const;
  // Throws NotSeparated when the postcondition fails for these point sets.
  static Isometry separating(std::span<const Point> sources, std::span<const Point> targets, Cell from, Cell to);
};

struct SsspOptions {
  // Pairs with |A| * |B| at most this are relaxed by direct scan. Zero routes
  // everything through the nearest-neighbor machinery.
  std::size_t direct_cutoff = 64;
};

struct SsspStats {
  std::size_t iterations = 0;
  std::size_t pair_updates = 0;
  std::size_t same_cell_updates = 0;
  std::size_t patch_points = 0;  // sum of active points over the patches visited
  std::size_t nonadjacent = 0;   // structure answers farther than 1 (should stay 0)
  bool monotone = true;          // extracted distances never decreased
};

// Relaxes every b in B from the sources A through dist' = `snapshot`:
// dist[b] = min(dist[b], min over adjacent a of snapshot[a] + |a - b|).
// A and B lie in the distinct cells `from` and `to`.
void update_pair(std::span<const Point> pts, std::span<const int> A, std::span<const int> B, Cell from, Cell to,
                 std::span<const double> snapshot, DistTable& dt, const SsspOptions& opts = {},
                 SsspStats* stats = nullptr);

// For sources sorted by snapshot distance, the index of the first source
// within distance 1 of each target (-1 when there is none).
std::vector<int> first_neighbor_partition(std::span<const Point> pts, std::span<const int> sorted_a,
                                          std::span<const int> B, Cell from, Cell to,
                                          const SsspOptions& opts = {});

// All pairs inside one cell are edges.
void same_cell_update(std::span<const Point> pts, std::span<const int> C, std::span<const double> snapshot,
                      DistTable& dt, const SsspOptions& opts = {});

DistTable sssp_wangxue(std::span<const Point> pts, int source, const SsspOptions& opts = {},
                       SsspStats* stats = nullptr);

std::vector<std::pair<int, int>> build_udg_edges(std::span<const Point> pts);
DistTable dijkstra_baseline(std::span<const Point> pts, int source);

// Largest relative difference |a - b| / max(1, |b|) over finite entries; kInf
// when the reachable sets differ.
double max_relative_deviation(const DistTable& a, const DistTable& b);

// Replays predecessor chains; true when every finite distance is reproduced
// within 1e-9 (1 + dist) through edges of length at most 1.
bool predecessors_consistent(std::span<const Point> pts, int source, const DistTable& dt);

}  // namespace udg
