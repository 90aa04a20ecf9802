#include "udg/io.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace udg {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string short_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

struct Line {
  int number = 0;
  std::vector<std::string> tokens;
};

std::vector<Line> tokenize(const std::string& text) {
  std::vector<Line> out;
  std::istringstream in(text);
  std::string raw;
  int number = 0;
  while (std::getline(in, raw)) {
    ++number;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    std::istringstream ls(raw);
    Line line{number, {}};
    std::string tok;
    while (ls >> tok) line.tokens.push_back(tok);
    if (!line.tokens.empty()) out.push_back(std::move(line));
  }
  return out;
}

Error parse_error(const Line& line, const std::string& what) {
  return Error(ErrorCode::ParseError, "line " + std::to_string(line.number) + ": " + what);
}

double to_double(const Line& line, const std::string& tok, bool allow_inf = false) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (end != tok.c_str() + tok.size() || tok.empty() || errno == ERANGE || std::isnan(v) ||
      (!allow_inf && std::isinf(v))) {
    throw parse_error(line, "bad number '" + tok + "'");
  }
  return v;
}

int to_int(const Line& line, const std::string& tok) {
  errno = 0;
  char* end = nullptr;
  const long v = std::strtol(tok.c_str(), &end, 10);
  if (end != tok.c_str() + tok.size() || tok.empty() || errno == ERANGE || v < -2147483647L || v > 2147483647L) {
    throw parse_error(line, "bad integer '" + tok + "'");
  }
  return static_cast<int>(v);
}

}  // namespace

std::vector<Point> parse_points(const std::string& text) {
  std::vector<Point> out;
  for (const Line& line : tokenize(text)) {
    if (line.tokens.size() != 2) throw parse_error(line, "expected 'x y'");
    out.push_back({to_double(line, line.tokens[0]), to_double(line, line.tokens[1])});
  }
  return out;
}

std::vector<WeightedSite> parse_sites(const std::string& text) {
  std::vector<WeightedSite> out;
  for (const Line& line : tokenize(text)) {
    if (line.tokens.size() != 3) throw parse_error(line, "expected 'x y w'");
    out.push_back({static_cast<int>(out.size()), to_double(line, line.tokens[0]), to_double(line, line.tokens[1]),
                   to_double(line, line.tokens[2])});
  }
  return out;
}

std::string format_points(const std::vector<Point>& pts) {
  std::string out;
  for (const Point& p : pts) out += num(p.x) + ' ' + num(p.y) + '\n';
  return out;
}

std::string format_sites(const std::vector<WeightedSite>& sites) {
  std::string out;
  for (const auto& s : sites) out += num(s.x) + ' ' + num(s.y) + ' ' + num(s.w) + '\n';
  return out;
}

// ---------------------------------------------------------------------------

namespace {

const char* kind_name(VertexKind k) {
  switch (k) {
    case VertexKind::OnLine:
      return "line";
    case VertexKind::Inner:
      return "inner";
    case VertexKind::AtInfinity:
      return "inf";
  }
  return "?";
}

}  // namespace

std::string serialize_vd(const HalfPlaneVD& vd) {
  std::string out = "vdplus\n";
  out += "sites " + std::to_string(vd.sites.size()) + '\n';
  for (const auto& s : vd.sites) {
    out += std::to_string(s.id) + ' ' + num(s.x) + ' ' + num(s.y) + ' ' + num(s.w) + '\n';
  }
  out += "vertices " + std::to_string(vd.vertices.size()) + '\n';
  for (const auto& v : vd.vertices) out += std::string(kind_name(v.kind)) + ' ' + num(v.p.x) + ' ' + num(v.p.y) + '\n';
  out += "faces " + std::to_string(vd.faces.size()) + '\n';
  for (const auto& f : vd.faces) {
    out += "face " + std::to_string(f.site) + ' ' + num(f.lx0) + ' ' + num(f.lx1) + ' ' +
           std::to_string(f.pieces.size()) + '\n';
    out += "verts";
    for (int v : f.verts) out += ' ' + std::to_string(v);
    out += '\n';
    for (const auto& p : f.pieces) {
      out += "piece " + std::to_string(p.neighbor) + ' ' + std::to_string(p.twin_face) + ' ' +
             std::to_string(p.twin_piece) + '\n';
    }
  }
  out += "end\n";
  return out;
}

HalfPlaneVD parse_vd(const std::string& text) {
  const auto lines = tokenize(text);
  std::size_t at = 0;
  auto next = [&](const char* tag, std::size_t fields) -> const Line& {
    if (at >= lines.size()) throw Error(ErrorCode::ParseError, std::string("unexpected end, wanted ") + tag);
    const Line& l = lines[at++];
    if (l.tokens[0] != tag) throw parse_error(l, std::string("expected '") + tag + "'");
    if (fields != 0 && l.tokens.size() != fields) throw parse_error(l, "wrong field count");
    return l;
  };
  auto count = [&](const Line& l) {
    const int c = to_int(l, l.tokens[1]);
    if (c < 0) throw parse_error(l, "negative count");
    return static_cast<std::size_t>(c);
  };
  auto index = [&](const Line& l, const std::string& tok, std::size_t bound) {
    const int v = to_int(l, tok);
    if (v < -1 || v >= static_cast<int>(bound)) throw parse_error(l, "index out of range");
    return v;
  };

  HalfPlaneVD vd;
  next("vdplus", 1);
  const std::size_t ns = count(next("sites", 2));
  for (std::size_t i = 0; i < ns; ++i) {
    if (at >= lines.size()) throw Error(ErrorCode::ParseError, "unexpected end in sites");
    const Line& l = lines[at++];
    if (l.tokens.size() != 4) throw parse_error(l, "expected 'id x y w'");
    vd.sites.push_back({to_int(l, l.tokens[0]), to_double(l, l.tokens[1]), to_double(l, l.tokens[2]),
                        to_double(l, l.tokens[3])});
  }
  const std::size_t nv = count(next("vertices", 2));
  for (std::size_t i = 0; i < nv; ++i) {
    if (at >= lines.size()) throw Error(ErrorCode::ParseError, "unexpected end in vertices");
    const Line& l = lines[at++];
    if (l.tokens.size() != 3) throw parse_error(l, "expected 'kind x y'");
    VdVertex v;
    if (l.tokens[0] == "line") {
      v.kind = VertexKind::OnLine;
    } else if (l.tokens[0] == "inner") {
      v.kind = VertexKind::Inner;
    } else if (l.tokens[0] == "inf") {
      v.kind = VertexKind::AtInfinity;
    } else {
      throw parse_error(l, "unknown vertex kind");
    }
    v.p = {to_double(l, l.tokens[1]), to_double(l, l.tokens[2])};
    vd.vertices.push_back(v);
  }
  const std::size_t nf = count(next("faces", 2));
  for (std::size_t i = 0; i < nf; ++i) {
    const Line& fl = next("face", 5);
    VdFace f;
    f.site = index(fl, fl.tokens[1], ns);
    if (f.site < 0) throw parse_error(fl, "face without site");
    f.lx0 = to_double(fl, fl.tokens[2], true);
    f.lx1 = to_double(fl, fl.tokens[3], true);
    const std::size_t np = count(Line{fl.number, {"", fl.tokens[4]}});
    const Line& vl = next("verts", np + 2);
    for (std::size_t k = 1; k < vl.tokens.size(); ++k) {
      const int v = index(vl, vl.tokens[k], nv);
      if (v < 0) throw parse_error(vl, "vertex index out of range");
      f.verts.push_back(v);
    }
    for (std::size_t k = 0; k < np; ++k) {
      const Line& pl = next("piece", 4);
      f.pieces.push_back({index(pl, pl.tokens[1], ns), index(pl, pl.tokens[2], nf), to_int(pl, pl.tokens[3])});
    }
    vd.faces.push_back(std::move(f));
  }
  next("end", 1);
  if (at != lines.size()) throw parse_error(lines[at], "trailing content");
  return vd;
}

std::string format_dist_csv(const std::vector<Point>& pts, const DistTable& dt) {
  std::string out = "id,x,y,dist,pred\n";
  for (std::size_t i = 0; i < pts.size(); ++i) {
    out += std::to_string(i) + ',' + num(pts[i].x) + ',' + num(pts[i].y) + ',' +
           (std::isfinite(dt.dist[i]) ? num(dt.dist[i]) : std::string("inf")) + ',' +
           (dt.pred[i] >= 0 ? std::to_string(dt.pred[i]) : std::string()) + '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

struct ViewBox {
  double x0, x1, y0, y1;  // world coordinates
  bool inside(Point p) const { return p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1; }
};

ViewBox view_of(const HalfPlaneVD& vd) {
  double lo = 0.0, hi = 0.0, bottom = 0.0;
  if (!vd.sites.empty()) {
    lo = hi = vd.sites[0].x;
    bottom = vd.sites[0].y;
  }
  for (const auto& s : vd.sites) {
    lo = std::min(lo, s.x);
    hi = std::max(hi, s.x);
    bottom = std::min(bottom, s.y);
  }
  for (const auto& v : vd.vertices) {
    if (v.kind == VertexKind::AtInfinity) continue;
    lo = std::min(lo, v.p.x);
    hi = std::max(hi, v.p.x);
  }
  const double margin = 1.0 + 0.25 * (hi - lo);
  double top = 0.5 * (hi - lo) + margin;
  for (const auto& v : vd.vertices) {
    if (v.kind == VertexKind::Inner) top = std::max(top, v.p.y + margin);
  }
  return {lo - margin, hi + margin, bottom - margin, top};
}

std::string svg_open(const ViewBox& box) {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" + short_num(box.x0) + ' ' + short_num(-box.y1) +
         ' ' + short_num(box.x1 - box.x0) + ' ' + short_num(box.y1 - box.y0) + "\">\n" +
         "<style>path,polyline{fill:none;vector-effect:non-scaling-stroke}" +
         ".arc{stroke:#246}.ledge{stroke:#c40;stroke-width:2}.edge{stroke:#444}" +
         ".contour{stroke:#0a0;stroke-dasharray:4 2}.axis{stroke:#aaa}circle{fill:#222}</style>\n";
}

std::string xy(Point p) { return short_num(p.x) + ',' + short_num(-p.y); }

// Curve parameter of a chain vertex on the bisector.
double param_at(const BisectorCurve& c, const VdVertex& v, double far) {
  if (v.kind != VertexKind::AtInfinity) return c.param_of(v.p);
  return dot(c.asymptote(1), v.p) >= dot(c.asymptote(-1), v.p) ? far : -far;
}

std::string arc_path(const BisectorCurve& c, const VdVertex& a, const VdVertex& b, const ViewBox& box) {
  constexpr double kFar = 40.0;
  double t0 = param_at(c, a, kFar);
  double t1 = param_at(c, b, kFar);
  // Pull infinite ends back to where the curve leaves the view.
  auto clip = [&](double t_fixed, double t_inf) {
    const double step = t_inf > t_fixed ? 0.05 : -0.05;
    double t = t_fixed;
    while ((step > 0 ? t < t_inf : t > t_inf) && box.inside(c.point_at(t))) t += step;
    return t;
  };
  const bool inf0 = a.kind == VertexKind::AtInfinity;
  const bool inf1 = b.kind == VertexKind::AtInfinity;
  if (inf0 && inf1) {
    const double mid = c.param_of(c.center());
    t0 = clip(mid, t0);
    t1 = clip(mid, t1);
  } else if (inf0) {
    t0 = clip(t1, t0);
  } else if (inf1) {
    t1 = clip(t0, t1);
  }
  constexpr int kSamples = 48;
  std::string d = "M" + xy(inf0 ? c.point_at(t0) : a.p);
  for (int i = 1; i < kSamples; ++i) d += " L" + xy(c.point_at(t0 + (t1 - t0) * i / kSamples));
  d += " L" + xy(inf1 ? c.point_at(t1) : b.p);
  return "<path class=\"arc\" d=\"" + d + "\"/>\n";
}

}  // namespace

std::string svg_diagram(const HalfPlaneVD& vd, const std::vector<TraceEvent>* trace) {
  const ViewBox box = view_of(vd);
  std::string out = svg_open(box);
  out += "<path class=\"axis\" d=\"M" + xy({box.x0, 0.0}) + " L" + xy({box.x1, 0.0}) + "\"/>\n";
  for (std::size_t f = 0; f < vd.faces.size(); ++f) {
    const VdFace& face = vd.faces[f];
    const double x0 = std::max(face.lx0, box.x0);
    const double x1 = std::min(face.lx1, box.x1);
    out += "<path class=\"ledge\" d=\"M" + xy({x0, 0.0}) + " L" + xy({x1, 0.0}) + "\"/>\n";
    for (std::size_t k = 0; k < face.pieces.size(); ++k) {
      const BoundaryPiece& p = face.pieces[k];
      if (p.neighbor < 0) continue;
      // Each arc is stored on both sides; draw it from the lower face index.
      if (p.twin_face >= 0 && static_cast<std::size_t>(p.twin_face) < f) continue;
      if (p.twin_face == static_cast<int>(f) && p.twin_piece < static_cast<int>(k)) continue;
      const auto curve = BisectorCurve::classify(vd.sites[face.site], vd.sites[p.neighbor]);
      out += arc_path(curve, vd.vertices[face.verts[k]], vd.vertices[face.verts[k + 1]], box);
    }
  }
  const double r = 0.004 * (box.x1 - box.x0);
  for (const auto& s : vd.sites) {
    out += "<circle cx=\"" + short_num(s.x) + "\" cy=\"" + short_num(-s.y) + "\" r=\"" + short_num(r) + "\"/>\n";
  }
  if (trace && !trace->empty()) {
    std::string pts;
    for (const auto& e : *trace) {
      if (!std::isfinite(e.p.x) || !std::isfinite(e.p.y) || e.kind == TraceEvent::ToInfinity) continue;
      if (!pts.empty()) pts += ' ';
      pts += xy(e.p);
    }
    out += "<polyline class=\"contour\" points=\"" + pts + "\"/>\n";
  }
  out += "</svg>\n";
  return out;
}

std::string svg_tree(const std::vector<Point>& pts, const DistTable& dt) {
  ViewBox box{0.0, 1.0, 0.0, 1.0};
  if (!pts.empty()) box = {pts[0].x, pts[0].x, pts[0].y, pts[0].y};
  for (const Point& p : pts) {
    box.x0 = std::min(box.x0, p.x);
    box.x1 = std::max(box.x1, p.x);
    box.y0 = std::min(box.y0, p.y);
    box.y1 = std::max(box.y1, p.y);
  }
  box.x0 -= 0.5;
  box.x1 += 0.5;
  box.y0 -= 0.5;
  box.y1 += 0.5;
  std::string out = svg_open(box);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (dt.pred[i] < 0) continue;
    out += "<path class=\"edge\" d=\"M" + xy(pts[dt.pred[i]]) + " L" + xy(pts[i]) + "\"/>\n";
  }
  const double r = 0.003 * std::max(box.x1 - box.x0, box.y1 - box.y0);
  for (const Point& p : pts) {
    out += "<circle cx=\"" + short_num(p.x) + "\" cy=\"" + short_num(-p.y) + "\" r=\"" + short_num(r) + "\"/>\n";
  }
  out += "</svg>\n";
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ParseError, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) throw Error(ErrorCode::ParseError, "cannot write " + path);
}

}  // namespace udg
