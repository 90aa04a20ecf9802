// Half-plane additively-weighted Voronoi diagrams.
//
// All sites lie strictly below the x-axis; the diagram describes the closed
// upper half-plane. Because every region is star-shaped with respect to its
// site, every connected piece of a region above the axis touches the axis in
// exactly one interval (its l-edge). Faces are therefore stored left to
// right, one per l-edge, and each face keeps the chain of boundary vertices
// met when sweeping counter-clockwise around its site: from the right end of
// its l-edge, over the top, to the left end. Angles of these vertices seen
// from the site increase along the chain and stay inside [0, pi].
//
// Vertices are either on the axis, strictly above it, or symbolic points at
// infinity carrying a unit direction. Consecutive chain vertices are joined
// by a piece of the bisector with the neighbouring site, or by a stretch of
// the boundary at infinity.

#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <vector>

#include "udg/geom.hpp"

namespace udg {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class VertexKind : std::uint8_t { OnLine, Inner, AtInfinity };

struct VdVertex {
  VertexKind kind = VertexKind::Inner;
  // Position, or the unit direction for AtInfinity.
  Point p;
  friend bool operator==(const VdVertex&, const VdVertex&) = default;
};

struct BoundaryPiece {
  // Site index of the face across this piece; -1 for a stretch at infinity.
  int neighbor = -1;
  int twin_face = -1;
  int twin_piece = -1;
  friend bool operator==(const BoundaryPiece&, const BoundaryPiece&) = default;
};

struct VdFace {
  int site = -1;  // index into HalfPlaneVD::sites
  double lx0 = -kInf;
  double lx1 = kInf;
  std::vector<int> verts;              // chain, right end first
  std::vector<BoundaryPiece> pieces;  // pieces[i] joins verts[i] and verts[i + 1]
  friend bool operator==(const VdFace&, const VdFace&) = default;
};

struct LEdge {
  double x0 = -kInf;
  double x1 = kInf;
  int site_id = -1;
};

struct HalfPlaneVD {
  std::vector<WeightedSite> sites;
  std::vector<VdVertex> vertices;
  std::vector<VdFace> faces;  // ordered by l-edge, left to right

  bool empty() const { return faces.empty(); }
  std::vector<LEdge> l_edge_seq() const;
  // Face whose l-edge contains x (closed on the left); -1 if the diagram is empty.
  int face_on_line(double x) const;
  std::size_t arc_count() const;
  std::size_t inner_vertex_count() const;
  std::size_t line_vertex_count() const;
  // V - E + F with all points at infinity collapsed into one vertex and the
  // axis split into l-edges. Equals 1 for a well-formed diagram.
  long euler_characteristic() const;

  friend bool operator==(const HalfPlaneVD&, const HalfPlaneVD&) = default;
};

// Weighted nearest site by linear scan; ties go to the smaller id.
struct Nearest {
  int site_id = -1;
  double distance = kInf;
};
Nearest nearest_site_bruteforce(std::span<const WeightedSite> sites, Point q);

HalfPlaneVD singleton_vd(const WeightedSite& s);

struct BuildOptions {
  std::uint64_t seed = 0x5eed;
  // Perturbation applied to site coordinates and weights when a merge reports
  // a degeneracy. Zero disables retries.
  double perturb = 1e-7;
  int max_retries = 5;
};

// Divide and conquer over index halves, merging with merge_vdplus.
HalfPlaneVD build_vdplus(std::span<const WeightedSite> sites, const BuildOptions& opts = {});

// Same, but degeneracies propagate instead of triggering a perturbed rebuild.
HalfPlaneVD build_vdplus_exact(std::span<const WeightedSite> sites);

// Rebuild with every site perturbed; used after a merge failure.
HalfPlaneVD build_vdplus_perturbed(std::span<const WeightedSite> sites, const BuildOptions& opts);

// Sub-region view used for constant-time contour stepping: each face is cut by
// spokes from its site to every chain vertex. A sub-region is one chain piece
// together with the two spokes bounding it and the axis between them.
struct Spoke {
  int face = -1;
  int vertex_index = -1;
  Point from;  // on the axis (clipped part only)
  Point to;    // the vertex, or a unit direction when at_infinity
  bool at_infinity = false;
  bool degenerate = false;  // vertex on the axis: nothing above it
};

struct SubRegion {
  int face = -1;
  int piece = -1;
  int boundary_pieces = 0;
};

class SpokedVD {
 public:
  explicit SpokedVD(const HalfPlaneVD& base);

  const HalfPlaneVD& base() const { return *base_; }
  // Angle of chain vertex `index` of `face` seen from the face's site.
  double angle(int face, int index) const { return angles_[offsets_[face] + index]; }
  // Sector of `face` containing the direction of angle `theta` from its site.
  int sector_of(int face, double theta) const;

  std::vector<Spoke> spokes() const;
  std::vector<SubRegion> subregions() const;

 private:
  const HalfPlaneVD* base_;
  std::vector<double> angles_;
  std::vector<std::size_t> offsets_;
};

SpokedVD add_spokes(const HalfPlaneVD& vd);

}  // namespace udg
