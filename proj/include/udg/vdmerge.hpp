// Merging two half-plane diagrams whose site sets are disjoint.
//
// The merged diagram differs from its inputs only along the contour: the
// bisector edges between a site of one input and a site of the other. The
// contour crosses the axis at seeds, found by one left-to-right sweep over
// both l-edge sequences; every contour path above the axis starts at a seed
// and is traced through the spoke sub-regions of both inputs. The output is
// stitched from the surviving pieces of the input chains and the traced paths.

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "udg/vdplus.hpp"

namespace udg {

struct ContourSeed {
  Point point;
  int site_a = -1;  // site index in the first diagram
  int site_b = -1;  // site index in the second diagram
  int face_a = -1;
  int face_b = -1;
  bool a_left = false;  // the first diagram wins immediately left of the seed
};

enum class NodeKind : std::uint8_t { Seed, ArcA, ArcB, Infinity };

struct ContourNode {
  NodeKind kind = NodeKind::Seed;
  Point p;       // position, or direction for Infinity
  int seed = -1; // for Seed nodes
  // For ArcA / ArcB: the crossed piece, seen from both of its faces.
  int face_from = -1;
  int piece_from = -1;
  int face_to = -1;
  int piece_to = -1;
};

// One contour path above the axis. Edge i joins nodes i and i + 1 and is a
// piece of the bisector of sites_a[i] and sites_b[i].
struct ContourComponent {
  std::vector<ContourNode> nodes;
  std::vector<int> sites_a;
  std::vector<int> sites_b;
  bool a_left = false;  // the first diagram lies left of the direction of travel
};

struct MergeStats {
  std::size_t seeds = 0;
  std::size_t components = 0;
  std::size_t trace_steps = 0;
  std::size_t arc_crossings = 0;
  std::size_t spoke_crossings = 0;
  std::size_t max_spoke_crossings = 0;  // over all spokes of both inputs

  MergeStats& operator+=(const MergeStats& o);
};

struct TraceEvent {
  enum Kind : std::uint8_t { Start, CrossArcA, CrossArcB, CrossSpokeA, CrossSpokeB, HitLine, ToInfinity };
  Kind kind = Start;
  int site_a = -1;  // ids
  int site_b = -1;
  Point p;
};

const char* to_string(TraceEvent::Kind k);

struct MergeOptions {
  MergeStats* stats = nullptr;
  std::vector<TraceEvent>* trace_log = nullptr;
};

// Seeds sorted by x. Throws DegenerateTangency when a contour root falls on an
// l-edge endpoint.
std::vector<ContourSeed> ell_intersections(const HalfPlaneVD& va, const HalfPlaneVD& vb);

class SeedRegistry {
 public:
  explicit SeedRegistry(std::vector<ContourSeed> seeds)
      : seeds_(std::move(seeds)), consumed_(seeds_.size(), false) {}

  const std::vector<ContourSeed>& seeds() const { return seeds_; }
  bool consumed(std::size_t i) const { return consumed_[i]; }
  void consume(std::size_t i) { consumed_[i] = true; }
  std::size_t remaining() const;

 private:
  std::vector<ContourSeed> seeds_;
  std::vector<bool> consumed_;
};

// Traces the path starting at seed `start` and consumes every seed it reaches.
// Throws TraceStall when the walk finds no admissible crossing.
ContourComponent trace_component(const SpokedVD& sa, const SpokedVD& sb, std::size_t start,
                                 SeedRegistry& registry, const MergeOptions& opts = {});

// Sites of the result: the sites of va followed by those of vb.
HalfPlaneVD merge_vdplus(const HalfPlaneVD& va, const HalfPlaneVD& vb, const MergeOptions& opts = {});

}  // namespace udg
