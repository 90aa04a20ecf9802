// Text formats and SVG output.
//
// Point files hold `x y` per line, site files `x y w`; `#` starts a comment
// and blank lines are skipped. Ids are the record order. Diagrams serialize
// to a line-oriented text form that parses back to an equal diagram.

#pragma once

#include <string>
#include <vector>

#include "udg/sssp.hpp"
#include "udg/vdmerge.hpp"
#include "udg/vdplus.hpp"

namespace udg {

// Throws ParseError naming the offending line.
std::vector<Point> parse_points(const std::string& text);
std::vector<WeightedSite> parse_sites(const std::string& text);
std::string format_points(const std::vector<Point>& pts);
std::string format_sites(const std::vector<WeightedSite>& sites);

std::string serialize_vd(const HalfPlaneVD& vd);
HalfPlaneVD parse_vd(const std::string& text);

// `id,x,y,dist,pred` rows sorted by id; unreachable distances are `inf` and a
// missing predecessor is empty.
std::string format_dist_csv(const std::vector<Point>& pts, const DistTable& dt);

// One <path class="arc"> per arc and one <path class="ledge"> per l-edge,
// plus the sites and, when given, the traced contour points.
std::string svg_diagram(const HalfPlaneVD& vd, const std::vector<TraceEvent>* trace = nullptr);
// One <path class="edge"> per tree edge.
std::string svg_tree(const std::vector<Point>& pts, const DistTable& dt);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

}  // namespace udg
