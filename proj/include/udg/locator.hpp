// Point location in a half-plane diagram.
//
// Vertical ray shooting: the arcs of the diagram are cut into x-monotone
// pieces and stored in a segment tree over their x-extents; every node keeps
// the pieces spanning its slab sorted bottom to top. The first piece below a
// query point borders the face containing it, so the owner is the nearer of
// that piece's two sites. With nothing below, the l-edge under the point
// decides.
//
// The locator refers to the diagram it was built from; keep the diagram alive.

#pragma once

#include <cstddef>
#include <vector>

#include "udg/vdplus.hpp"

namespace udg {

class Locator {
 public:
  explicit Locator(const HalfPlaneVD& vd);

  // Throws QueryBelowLine for q.y < 0 and EmptyStructure on an empty diagram.
  Nearest locate(Point q) const;
  std::size_t depth() const { return depth_; }
  std::size_t piece_count() const { return pieces_.size(); }

 private:
  struct Piece {
    BisectorCurve curve;
    double t0 = 0.0;
    double t1 = 0.0;
    double x0 = 0.0;
    double x1 = 0.0;
    int s0 = -1;  // site indices
    int s1 = -1;
  };

  double y_at(const Piece& p, double x) const;
  void insert(int node, std::size_t lo, std::size_t hi, int piece);
  void sort_node(int node, std::size_t lo, std::size_t hi);

  const HalfPlaneVD* vd_;
  std::vector<Piece> pieces_;
  std::vector<double> xs_;                  // slab boundaries
  std::vector<std::vector<int>> node_pieces_;
  std::size_t leaves_ = 0;
  std::size_t depth_ = 1;
};

Locator build_locator(const SpokedVD& vd);

// Reference location by testing every face; returns the face index or -1.
int flat_locate(const HalfPlaneVD& vd, Point q);

}  // namespace udg
