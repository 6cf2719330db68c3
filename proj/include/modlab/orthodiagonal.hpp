#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "modlab/dirichlet.hpp"
#include "modlab/error.hpp"
#include "modlab/geometry.hpp"
#include "modlab/plane_network.hpp"

namespace modlab {

enum class Color : std::uint8_t { Black, White };

struct MapVertex {
  VertexId id = 0;
  Point position;
  Color color = Color::Black;
};

// Corners [v1, w1, v2, w2] counterclockwise; v black, w white.
using Quad = std::array<VertexId, 4>;

// The four boundary arcs as counterclockwise vertex paths; consecutive arcs
// share exactly their common endpoint.
struct BoundaryArcs {
  std::vector<VertexId> s1, t1, s2, t2;
};

// Triangulation edges on the domain boundary, which carry no quad. Present
// only on maps ingested from a mesh.
struct BoundaryLayer {
  std::vector<std::pair<VertexId, VertexId>> edges;
  std::vector<VertexId> cycle;  // black vertices, counterclockwise
  BoundaryArcs arcs;            // black vertices per arc, in cycle order
};

struct OrthodiagonalMap {
  std::vector<MapVertex> vertices;
  std::vector<Quad> quads;
  std::vector<VertexId> boundary;  // counterclockwise cycle of quad sides
  BoundaryArcs arcs;
  std::optional<BoundaryLayer> layer;

  Point position(VertexId v) const { return vertices[static_cast<std::size_t>(v)].position; }
  Color color(VertexId v) const { return vertices[static_cast<std::size_t>(v)].color; }
};

// Primal and dual networks of a map. Edge k of both networks comes from quad
// k, so the pairing between them is the identity on edge ids.
struct DualPair {
  PlaneNetwork primal;
  PlaneNetwork dual;
  std::vector<VertexId> primalToMap;
  std::vector<VertexId> dualToMap;

  EdgeId pairedEdge(EdgeId e) const { return e; }
};

namespace detail {

// Counterclockwise boundary cycle of the union of quads: sides used by
// exactly one quad, chained head to tail.
inline std::vector<VertexId> quadBoundary(const OrthodiagonalMap& map) {
  std::map<std::pair<VertexId, VertexId>, int> sides;
  for (const Quad& q : map.quads)
    for (int k = 0; k < 4; ++k) sides[{q[static_cast<std::size_t>(k)], q[static_cast<std::size_t>((k + 1) % 4)]}]++;
  std::map<VertexId, VertexId> next;
  for (const auto& [side, count] : sides) {
    if (sides.count({side.second, side.first})) continue;
    if (count != 1) throw TopologyError("quad side used twice in the same direction");
    if (!next.emplace(side.first, side.second).second)
      throw TopologyError("map boundary is not a simple closed curve at vertex " + std::to_string(side.first));
  }
  if (next.empty()) throw TopologyError("map has no boundary");
  std::vector<VertexId> cycle{next.begin()->first};
  while (true) {
    const auto it = next.find(cycle.back());
    if (it == next.end()) throw TopologyError("map boundary is open");
    if (it->second == cycle.front()) break;
    cycle.push_back(it->second);
    if (cycle.size() > next.size()) throw TopologyError("map boundary is not a single cycle");
  }
  if (cycle.size() != next.size()) throw TopologyError("map boundary has several components");
  return cycle;
}

inline std::vector<VertexId> cyclicRun(const std::vector<VertexId>& cycle, std::size_t from, std::size_t to) {
  std::vector<VertexId> out;
  const std::size_t n = cycle.size();
  for (std::size_t i = from;; i = (i + 1) % n) {
    out.push_back(cycle[i]);
    if (i == to) break;
  }
  return out;
}

// Splits a cycle at four corner vertices, given in the order
// T2/S1, S1/T1, T1/S2, S2/T2.
inline BoundaryArcs arcsFromCorners(const std::vector<VertexId>& cycle, const std::array<VertexId, 4>& corners) {
  std::array<std::size_t, 4> pos{};
  for (std::size_t k = 0; k < 4; ++k) {
    const auto it = std::find(cycle.begin(), cycle.end(), corners[k]);
    if (it == cycle.end()) throw TopologyError("corner vertex not on the boundary");
    pos[k] = static_cast<std::size_t>(it - cycle.begin());
  }
  return {cyclicRun(cycle, pos[0], pos[1]), cyclicRun(cycle, pos[1], pos[2]), cyclicRun(cycle, pos[2], pos[3]),
          cyclicRun(cycle, pos[3], pos[0])};
}

enum ArcBit : unsigned { S1Bit = 1, T1Bit = 2, S2Bit = 4, T2Bit = 8 };

// Splits a cycle by per-vertex arc membership bits; each arc must be one
// contiguous run.
inline BoundaryArcs arcsFromLabels(const std::vector<VertexId>& cycle, const std::vector<unsigned>& labels) {
  const std::size_t n = cycle.size();
  auto run = [&](unsigned bit, const char* name) {
    std::size_t start = n;
    std::size_t starts = 0;
    for (std::size_t i = 0; i < n; ++i)
      if ((labels[i] & bit) && !(labels[(i + n - 1) % n] & bit)) {
        start = i;
        ++starts;
      }
    if (starts != 1) throw TopologyError(std::string("boundary arc ") + name + " is not one contiguous run");
    std::vector<VertexId> out;
    for (std::size_t i = start; labels[i] & bit; i = (i + 1) % n) out.push_back(cycle[i]);
    return out;
  };
  return {run(S1Bit, "S1"), run(T1Bit, "T1"), run(S2Bit, "S2"), run(T2Bit, "T2")};
}

// A diagonal a->b is inside the quad when the other two corners lie strictly
// on opposite sides, `right` to the right of a->b.
inline bool diagonalInside(Point a, Point b, Point right, Point left) {
  return orient2d(a, b, right) < 0 && orient2d(a, b, left) > 0;
}

inline void requireUnique(const std::vector<VertexId>& a, const std::vector<VertexId>& b, const char* what) {
  std::vector<VertexId> x = a, y = b, common;
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  std::set_intersection(x.begin(), x.end(), y.begin(), y.end(), std::back_inserter(common));
  if (common.size() != 1) throw TopologyError(std::string(what) + " do not meet in exactly one vertex");
}

}  // namespace detail

// Structural checks of a map; empty result means valid.
inline std::vector<Violation> validateMap(const OrthodiagonalMap& map, double angleTolerance = 1e-9) {
  std::vector<Violation> out;
  for (std::size_t i = 0; i < map.vertices.size(); ++i)
    if (map.vertices[i].id != static_cast<VertexId>(i)) out.push_back({"dense vertex ids", "vertex " + std::to_string(i)});
  for (std::size_t k = 0; k < map.quads.size(); ++k) {
    const Quad& q = map.quads[k];
    const std::string name = "quad " + std::to_string(k);
    bool ok = true;
    for (VertexId v : q) ok = ok && v >= 0 && static_cast<std::size_t>(v) < map.vertices.size();
    if (!ok) {
      out.push_back({"quad corners exist", name});
      continue;
    }
    if (map.color(q[0]) != Color::Black || map.color(q[2]) != Color::Black || map.color(q[1]) != Color::White ||
        map.color(q[3]) != Color::White)
      out.push_back({"quad colors alternate", name});
    const std::array<Point, 4> pts{map.position(q[0]), map.position(q[1]), map.position(q[2]), map.position(q[3])};
    if (!(signedArea(pts) > 0.0)) out.push_back({"quad counterclockwise", name});
    const Point d1 = pts[2] - pts[0];
    const Point d2 = pts[3] - pts[1];
    const double denom = norm(d1) * norm(d2);
    if (!(denom > 0.0) || std::abs(dot(d1, d2)) > std::sin(angleTolerance) * denom)
      out.push_back({"diagonals orthogonal", name});
  }
  try {
    const auto cycle = detail::quadBoundary(map);
    std::vector<VertexId> sorted = cycle;
    std::sort(sorted.begin(), sorted.end());
    std::vector<VertexId> given = map.boundary;
    std::sort(given.begin(), given.end());
    if (sorted != given) out.push_back({"boundary matches quads", "boundary"});
    detail::requireUnique(map.arcs.s1, map.arcs.t1, "S1 and T1");
    detail::requireUnique(map.arcs.t1, map.arcs.s2, "T1 and S2");
    detail::requireUnique(map.arcs.s2, map.arcs.t2, "S2 and T2");
    detail::requireUnique(map.arcs.t2, map.arcs.s1, "T2 and S1");
  } catch (const TopologyError& ex) {
    out.push_back({"simple boundary with four arcs", ex.what()});
  }
  return out;
}

inline double primalWeight(const OrthodiagonalMap& map, const Quad& q) {
  const double vv = distance(map.position(q[0]), map.position(q[2]));
  const double ww = distance(map.position(q[1]), map.position(q[3]));
  if (!(vv > 0.0) || !(ww > 0.0)) throw DegenerateQuad("zero-length diagonal");
  return ww / vv;
}

namespace detail {

struct NetworkParts {
  std::vector<Vertex> vertices;
  std::vector<Edge> edges;
  std::vector<VertexId> toMap;
  std::vector<VertexId> fromMap;
};

// Network over the vertices of one color with one edge per quad.
inline NetworkParts quadNetwork(const OrthodiagonalMap& map, Color color, bool includeAll) {
  NetworkParts parts;
  parts.fromMap.assign(map.vertices.size(), -1);
  std::vector<char> used(map.vertices.size(), 0);
  const std::size_t offset = color == Color::Black ? 0 : 1;
  for (const Quad& q : map.quads) {
    used[static_cast<std::size_t>(q[offset])] = 1;
    used[static_cast<std::size_t>(q[offset + 2])] = 1;
  }
  for (const MapVertex& v : map.vertices) {
    if (v.color != color || (!includeAll && !used[static_cast<std::size_t>(v.id)])) continue;
    const auto id = static_cast<VertexId>(parts.vertices.size());
    parts.fromMap[static_cast<std::size_t>(v.id)] = id;
    parts.toMap.push_back(v.id);
    parts.vertices.push_back({id, v.position});
  }
  for (std::size_t k = 0; k < map.quads.size(); ++k) {
    const Quad& q = map.quads[k];
    const double sigmaBlack = primalWeight(map, q);
    const Point a = map.position(q[offset]);
    const Point b = map.position(q[offset + 2]);
    const Point right = map.position(q[offset + 1]);
    const Point left = map.position(q[(offset + 3) % 4]);
    Edge e{static_cast<EdgeId>(k), parts.fromMap[static_cast<std::size_t>(q[offset])],
           parts.fromMap[static_cast<std::size_t>(q[offset + 2])],
           color == Color::Black ? sigmaBlack : 1.0 / sigmaBlack, std::nullopt};
    if (!diagonalInside(a, b, right, left)) e.bend = midpoint(right, left);
    parts.edges.push_back(e);
  }
  return parts;
}

inline std::vector<VertexId> translate(const std::vector<VertexId>& ids, const std::vector<VertexId>& fromMap,
                                       Color color, const OrthodiagonalMap& map) {
  std::vector<VertexId> out;
  for (VertexId v : ids)
    if (map.color(v) == color && fromMap[static_cast<std::size_t>(v)] >= 0)
      out.push_back(fromMap[static_cast<std::size_t>(v)]);
  return out;
}

}  // namespace detail

// Primal network on black vertices (A = black on S1, B = black on S2) and
// dual network on white vertices (A = white on T1, B = white on T2), with
// canonical weights |w1w2|/|v1v2| and the reciprocal.
inline DualPair dualPair(const OrthodiagonalMap& map) {
  auto black = detail::quadNetwork(map, Color::Black, false);
  auto white = detail::quadNetwork(map, Color::White, false);
  auto side = [&](const std::vector<VertexId>& arc, const detail::NetworkParts& p, Color c) {
    return detail::translate(arc, p.fromMap, c, map);
  };
  DualPair pair;
  pair.primal = PlaneNetwork(std::move(black.vertices), std::move(black.edges), side(map.arcs.s1, black, Color::Black),
                             side(map.arcs.s2, black, Color::Black), side(map.boundary, black, Color::Black));
  pair.dual = PlaneNetwork(std::move(white.vertices), std::move(white.edges), side(map.arcs.t1, white, Color::White),
                           side(map.arcs.t2, white, Color::White), side(map.boundary, white, Color::White));
  pair.primalToMap = std::move(black.toMap);
  pair.dualToMap = std::move(white.toMap);
  return pair;
}

// Primal network of an ingested map with its triangulation boundary edges
// added back, each carrying conductance eps / (number of boundary edges).
inline PlaneNetwork assignBoundaryConductance(const OrthodiagonalMap& map, double eps) {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw PreconditionError("boundary conductance scale must be positive");
  if (!map.layer) throw PreconditionError("map carries no triangulation boundary layer");
  auto black = detail::quadNetwork(map, Color::Black, true);
  const double sigma = eps / static_cast<double>(map.layer->edges.size());
  for (auto [u, v] : map.layer->edges)
    black.edges.push_back({static_cast<EdgeId>(black.edges.size()), black.fromMap[static_cast<std::size_t>(u)],
                           black.fromMap[static_cast<std::size_t>(v)], sigma, std::nullopt});
  auto side = [&](const std::vector<VertexId>& arc) { return detail::translate(arc, black.fromMap, Color::Black, map); };
  return PlaneNetwork(std::move(black.vertices), std::move(black.edges), side(map.layer->arcs.s1),
                      side(map.layer->arcs.s2), side(map.layer->cycle));
}

struct FulkersonResult {
  double primalModulus = 0.0;
  double dualModulus = 0.0;
  double product = 0.0;
};

inline FulkersonResult fulkersonCheck(const DualPair& pair, const SolverOptions& options = {}) {
  FulkersonResult r;
  r.primalModulus = solveStandard(pair.primal, options).energy;
  r.dualModulus = solveStandard(pair.dual, options).energy;
  r.product = r.primalModulus * r.dualModulus;
  return r;
}

// Number of edges of the primal path whose paired dual edge lies on the dual path.
inline int dualCrossingCount(const DualPair& pair, const Path& primalPath, const Path& dualPath) {
  std::set<EdgeId> dualEdges(dualPath.edges.begin(), dualPath.edges.end());
  int count = 0;
  for (EdgeId e : primalPath.edges) count += dualEdges.count(pair.pairedEdge(e)) ? 1 : 0;
  return count;
}

namespace detail {

// Square-lattice map with spacing 1/n. `inside(a, b)` selects the primal
// lattice points; corners are lattice points in T2/S1, S1/T1, T1/S2, S2/T2
// order.
template <class Inside>
OrthodiagonalMap latticeMap(long aMin, long aMax, long bMin, long bMax, long n, Inside inside,
                            const std::array<std::pair<long, long>, 4>& corners) {
  OrthodiagonalMap map;
  std::map<std::pair<long, long>, VertexId> black;
  std::map<std::pair<long, long>, VertexId> white;  // keyed by lower-left lattice corner of the cell
  const double h = 1.0 / static_cast<double>(n);
  for (long b = bMin; b <= bMax; ++b)
    for (long a = aMin; a <= aMax; ++a)
      if (inside(a, b)) {
        const auto id = static_cast<VertexId>(map.vertices.size());
        black[{a, b}] = id;
        map.vertices.push_back({id, {static_cast<double>(a) * h, static_cast<double>(b) * h}, Color::Black});
      }
  auto cell = [&](long a, long b) {
    auto [it, added] = white.try_emplace({a, b}, -1);
    if (added) {
      it->second = static_cast<VertexId>(map.vertices.size());
      map.vertices.push_back({it->second, {(static_cast<double>(a) + 0.5) * h, (static_cast<double>(b) + 0.5) * h},
                              Color::White});
    }
    return it->second;
  };
  // Edges in row-major order of their lower/left endpoint: right, then up.
  std::vector<std::pair<long, long>> order;
  for (const auto& kv : black) order.push_back(kv.first);
  std::sort(order.begin(), order.end(), [](auto x, auto y) { return std::tie(x.second, x.first) < std::tie(y.second, y.first); });
  for (auto [a, b] : order) {
    const VertexId v = black.at({a, b});
    if (black.count({a + 1, b})) map.quads.push_back({v, cell(a, b - 1), black.at({a + 1, b}), cell(a, b)});
    if (black.count({a, b + 1})) map.quads.push_back({v, cell(a, b), black.at({a, b + 1}), cell(a - 1, b)});
  }
  map.boundary = quadBoundary(map);
  std::array<VertexId, 4> c{};
  for (std::size_t k = 0; k < 4; ++k) c[k] = black.at(corners[k]);
  map.arcs = arcsFromCorners(map.boundary, c);
  return map;
}

}  // namespace detail

// Square grid of spacing 1/n on [0, L] x [0, 1]; S1 is the left side.
inline OrthodiagonalMap gridMap(int L, int n) {
  if (L < 1 || n < 1) throw PreconditionError("grid parameters must be positive");
  const long w = static_cast<long>(L) * n;
  return detail::latticeMap(0, w, 0, n, n, [&](long a, long b) { return a >= 0 && a <= w && b >= 0 && b <= n; },
                            {{{0, n}, {0, 0}, {w, 0}, {w, n}}});
}

// Axis-aligned grid of spacing 1/n on the L x 1 rectangle (side 1 scaled by
// sqrt 2) rotated by 45 degrees: 0 <= x + y <= 2L and 0 <= y - x <= 2.
inline OrthodiagonalMap rotatedGridMap(int L, int n) {
  if (L < 1 || n < 1) throw PreconditionError("grid parameters must be positive");
  const long ln = static_cast<long>(L) * n;
  auto inside = [&](long a, long b) { return a + b >= 0 && a + b <= 2 * ln && b - a >= 0 && b - a <= 2 * n; };
  return detail::latticeMap(-n, ln, 0, ln + n, n, inside, {{{-n, n}, {0, 0}, {ln, ln}, {ln - n, ln + n}}});
}

// ---- Triangle-format mesh ingestion ----

struct TriangleMesh {
  std::vector<Point> nodes;
  std::vector<int> markers;
  std::vector<std::array<int, 3>> triangles;
};

namespace detail {

inline std::vector<std::vector<std::string>> tokenLines(std::istream& in) {
  std::vector<std::vector<std::string>> out;
  std::string line;
  while (std::getline(in, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::vector<std::string> toks;
    for (std::string t; ls >> t;) toks.push_back(t);
    if (!toks.empty()) out.push_back(std::move(toks));
  }
  return out;
}

inline long parseInt(const std::string& s, const std::string& where) {
  std::size_t used = 0;
  long v = 0;
  try {
    v = std::stol(s, &used);
  } catch (const std::exception&) {
    throw ParseError(where + ": expected an integer, got '" + s + "'");
  }
  if (used != s.size()) throw ParseError(where + ": expected an integer, got '" + s + "'");
  return v;
}

inline double parseReal(const std::string& s, const std::string& where) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ParseError(where + ": expected a number, got '" + s + "'");
  }
  if (used != s.size() || !std::isfinite(v)) throw ParseError(where + ": expected a finite number, got '" + s + "'");
  return v;
}

}  // namespace detail

// Parses .node and .ele text. Indices may be 0- or 1-based; the base is
// taken from the first node id.
inline TriangleMesh parseTriangleMesh(std::istream& nodeIn, std::istream& eleIn) {
  TriangleMesh mesh;
  const auto nodeLines = detail::tokenLines(nodeIn);
  if (nodeLines.empty() || nodeLines[0].size() < 2) throw ParseError("node file: missing header");
  const long count = detail::parseInt(nodeLines[0][0], "node header");
  const long dim = detail::parseInt(nodeLines[0][1], "node header");
  const long attrs = nodeLines[0].size() > 2 ? detail::parseInt(nodeLines[0][2], "node header") : 0;
  const long markerCols = nodeLines[0].size() > 3 ? detail::parseInt(nodeLines[0][3], "node header") : 0;
  if (dim != 2) throw ParseError("node file: only two-dimensional meshes are supported");
  if (count < 3 || attrs < 0 || markerCols < 0 || markerCols > 1) throw ParseError("node file: bad header");
  if (static_cast<long>(nodeLines.size()) - 1 != count) throw ParseError("node file: node count does not match header");
  const std::size_t width = static_cast<std::size_t>(3 + attrs + markerCols);
  long base = 0;
  for (long i = 0; i < count; ++i) {
    const auto& t = nodeLines[static_cast<std::size_t>(i + 1)];
    const std::string where = "node line " + std::to_string(i + 2);
    if (t.size() != width) throw ParseError(where + ": wrong column count");
    const long id = detail::parseInt(t[0], where);
    if (i == 0) {
      if (id != 0 && id != 1) throw ParseError(where + ": first node id must be 0 or 1");
      base = id;
    }
    if (id != base + i) throw ParseError(where + ": node ids must be consecutive");
    mesh.nodes.push_back({detail::parseReal(t[1], where), detail::parseReal(t[2], where)});
    mesh.markers.push_back(markerCols ? static_cast<int>(detail::parseInt(t.back(), where)) : 0);
  }

  const auto eleLines = detail::tokenLines(eleIn);
  if (eleLines.empty() || eleLines[0].size() < 2) throw ParseError("ele file: missing header");
  const long tris = detail::parseInt(eleLines[0][0], "ele header");
  const long perTri = detail::parseInt(eleLines[0][1], "ele header");
  const long triAttrs = eleLines[0].size() > 2 ? detail::parseInt(eleLines[0][2], "ele header") : 0;
  if (tris < 1 || (perTri != 3 && perTri != 6) || triAttrs < 0) throw ParseError("ele file: bad header");
  if (static_cast<long>(eleLines.size()) - 1 != tris) throw ParseError("ele file: triangle count does not match header");
  for (long i = 0; i < tris; ++i) {
    const auto& t = eleLines[static_cast<std::size_t>(i + 1)];
    const std::string where = "ele line " + std::to_string(i + 2);
    if (static_cast<long>(t.size()) != 1 + perTri + triAttrs) throw ParseError(where + ": wrong column count");
    std::array<int, 3> tri{};
    for (std::size_t k = 0; k < 3; ++k) {
      const long v = detail::parseInt(t[k + 1], where) - base;
      if (v < 0 || v >= count) throw ParseError(where + ": node index out of range");
      tri[k] = static_cast<int>(v);
    }
    if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2]) throw ParseError(where + ": repeated node");
    mesh.triangles.push_back(tri);
  }
  return mesh;
}

inline TriangleMesh readTriangleMesh(const std::string& nodePath, const std::string& elePath) {
  std::ifstream node(nodePath);
  if (!node) throw ParseError("cannot open " + nodePath);
  std::ifstream ele(elePath);
  if (!ele) throw ParseError("cannot open " + elePath);
  return parseTriangleMesh(node, ele);
}

namespace detail {

// Node markers: 1..4 for S1, T1, S2, T2; two-digit codes 12, 23, 34, 41 for
// the corner shared by two arcs.
inline unsigned markerBits(int marker) {
  switch (marker) {
    case 0: return 0;
    case 1: return S1Bit;
    case 2: return T1Bit;
    case 3: return S2Bit;
    case 4: return T2Bit;
    case 12: return S1Bit | T1Bit;
    case 23: return T1Bit | S2Bit;
    case 34: return S2Bit | T2Bit;
    case 41: return T2Bit | S1Bit;
    default: throw ParseError("unknown boundary marker " + std::to_string(marker));
  }
}

}  // namespace detail

struct IngestOptions {
  double orthogonalityTolerance = 1e-9;
  double maxCircumradiusRatio = 1e6;
};

// Orthodiagonal map of a Delaunay triangulation: one quad per interior edge
// joining its endpoints with the circumcenters of the two adjacent triangles.
inline OrthodiagonalMap ingestTriangulation(const TriangleMesh& mesh, const IngestOptions& options = {}) {
  const std::size_t nn = mesh.nodes.size();
  std::vector<std::array<int, 3>> tris = mesh.triangles;
  std::vector<Point> centers(tris.size());
  for (std::size_t t = 0; t < tris.size(); ++t) {
    auto& tri = tris[t];
    const Point p0 = mesh.nodes[static_cast<std::size_t>(tri[0])];
    const int o = orient2d(p0, mesh.nodes[static_cast<std::size_t>(tri[1])], mesh.nodes[static_cast<std::size_t>(tri[2])]);
    if (o == 0) throw DegenerateQuad("triangle " + std::to_string(t) + " is degenerate");
    if (o < 0) std::swap(tri[1], tri[2]);
    const Point a = mesh.nodes[static_cast<std::size_t>(tri[0])];
    const Point b = mesh.nodes[static_cast<std::size_t>(tri[1])];
    const Point c = mesh.nodes[static_cast<std::size_t>(tri[2])];
    if (!circumcenter(a, b, c, centers[t])) throw DegenerateQuad("triangle " + std::to_string(t) + " is degenerate");
    const double shortest = std::min({distance(a, b), distance(b, c), distance(c, a)});
    if (distance(centers[t], a) > options.maxCircumradiusRatio * shortest)
      throw DegenerateQuad("triangle " + std::to_string(t) + " has an excessive circumradius");
  }

  // Directed edge (u, v) of a counterclockwise triangle -> triangle index.
  std::map<std::pair<int, int>, std::size_t> halfEdges;
  for (std::size_t t = 0; t < tris.size(); ++t)
    for (std::size_t k = 0; k < 3; ++k) {
      const std::pair<int, int> he{tris[t][k], tris[t][(k + 1) % 3]};
      if (!halfEdges.emplace(he, t).second) throw TopologyError("triangles overlap along an edge");
    }

  OrthodiagonalMap map;
  for (std::size_t i = 0; i < nn; ++i) map.vertices.push_back({static_cast<VertexId>(i), mesh.nodes[i], Color::Black});
  std::vector<VertexId> whiteOf(tris.size(), -1);
  auto white = [&](std::size_t t) {
    if (whiteOf[t] < 0) {
      whiteOf[t] = static_cast<VertexId>(map.vertices.size());
      map.vertices.push_back({whiteOf[t], centers[t], Color::White});
    }
    return whiteOf[t];
  };

  BoundaryLayer layer;
  std::map<int, int> boundaryNext;
  for (const auto& [he, t] : halfEdges) {
    const auto twin = halfEdges.find({he.second, he.first});
    if (twin == halfEdges.end()) {
      layer.edges.emplace_back(he.first, he.second);
      if (!boundaryNext.emplace(he.first, he.second).second)
        throw TopologyError("triangulation boundary is not simple at node " + std::to_string(he.first));
      continue;
    }
    if (he.first > he.second) continue;
    // (u, v) has triangle t on its left and the twin triangle on its right.
    const Point u = mesh.nodes[static_cast<std::size_t>(he.first)];
    const Point v = mesh.nodes[static_cast<std::size_t>(he.second)];
    const Point cl = centers[t];
    const Point cr = centers[twin->second];
    const Point d = v - u;
    const Point normal{-d.y, d.x};
    const double pl = dot(cl - u, normal);
    const double pr = dot(cr - u, normal);
    const Point w = cl - cr;
    if (norm(w) <= 1e-12 * norm(d)) throw DegenerateQuad("cocircular triangles share edge " + std::to_string(he.first) + "-" + std::to_string(he.second));
    if (!(pl > pr)) throw NonDelaunay("edge " + std::to_string(he.first) + "-" + std::to_string(he.second) + " is not locally Delaunay");
    if (std::abs(dot(d, w)) > options.orthogonalityTolerance * norm(d) * norm(w))
      throw NonDelaunay("circumcenter segment not orthogonal to edge " + std::to_string(he.first) + "-" + std::to_string(he.second));
    map.quads.push_back({static_cast<VertexId>(he.first), white(twin->second), static_cast<VertexId>(he.second), white(t)});
  }
  if (map.quads.empty()) throw TopologyError("triangulation has no interior edge");
  std::sort(layer.edges.begin(), layer.edges.end());

  // Triangulation boundary cycle, started at a node of S1 that follows T2.
  std::vector<int> tcycle{boundaryNext.begin()->first};
  while (true) {
    const int nxt = boundaryNext.at(tcycle.back());
    if (nxt == tcycle.front()) break;
    tcycle.push_back(nxt);
    if (tcycle.size() > boundaryNext.size()) throw TopologyError("triangulation boundary is not a cycle");
  }
  if (tcycle.size() != boundaryNext.size()) throw TopologyError("triangulation is not simply connected");

  std::vector<unsigned> bits(map.vertices.size(), 0);
  for (std::size_t i = 0; i < nn; ++i) bits[i] = detail::markerBits(mesh.markers[i]);
  for (int v : tcycle)
    if (bits[static_cast<std::size_t>(v)] == 0) throw ParseError("boundary node " + std::to_string(v) + " has no arc marker");

  layer.cycle.assign(tcycle.begin(), tcycle.end());
  {
    std::vector<unsigned> labels;
    for (VertexId v : layer.cycle) labels.push_back(bits[static_cast<std::size_t>(v)]);
    // Corner nodes belong to the S arc for network boundary sets.
    layer.arcs = detail::arcsFromLabels(layer.cycle, labels);
  }

  map.boundary = detail::quadBoundary(map);
  std::vector<unsigned> labels(map.boundary.size(), 0);
  const std::size_t nb = map.boundary.size();
  for (std::size_t i = 0; i < nb; ++i) {
    const VertexId v = map.boundary[i];
    if (map.color(v) == Color::Black) {
      labels[i] = bits[static_cast<std::size_t>(v)];
      if (labels[i] == 0) throw ParseError("node " + std::to_string(v) + " on the map boundary has no arc marker");
    }
  }
  for (std::size_t i = 0; i < nb; ++i) {
    if (map.color(map.boundary[i]) == Color::Black) continue;
    const unsigned prev = labels[(i + nb - 1) % nb];
    const unsigned next = labels[(i + 1) % nb];
    labels[i] = (prev & next) ? (prev & next) : (prev | next);
  }
  map.arcs = detail::arcsFromLabels(map.boundary, labels);
  map.layer = std::move(layer);
  return map;
}

inline OrthodiagonalMap ingestTriangulation(const std::string& nodePath, const std::string& elePath,
                                            const IngestOptions& options = {}) {
  return ingestTriangulation(readTriangleMesh(nodePath, elePath), options);
}

// ---- JSON ----

inline nlohmann::json toJson(const OrthodiagonalMap& map) {
  using nlohmann::json;
  json black = json::array(), white = json::array();
  for (const MapVertex& v : map.vertices)
    (v.color == Color::Black ? black : white).push_back({{"id", v.id}, {"x", v.position.x}, {"y", v.position.y}});
  json quads = json::array();
  for (const Quad& q : map.quads) quads.push_back(q);
  auto arcsJson = [](const BoundaryArcs& a) {
    return json{{"S1", a.s1}, {"T1", a.t1}, {"S2", a.s2}, {"T2", a.t2}};
  };
  json j{{"V_black", std::move(black)}, {"V_white", std::move(white)}, {"quads", std::move(quads)},
         {"arcs", arcsJson(map.arcs)}};
  if (map.layer) {
    json edges = json::array();
    for (auto [u, v] : map.layer->edges) edges.push_back({u, v});
    j["boundary_layer"] = {{"edges", std::move(edges)}, {"cycle", map.layer->cycle}, {"arcs", arcsJson(map.layer->arcs)}};
  }
  return j;
}

inline OrthodiagonalMap mapFromJson(const nlohmann::json& j) {
  try {
    OrthodiagonalMap map;
    std::vector<MapVertex> vs;
    for (const auto& v : j.at("V_black"))
      vs.push_back({v.at("id").get<VertexId>(), {v.at("x").get<double>(), v.at("y").get<double>()}, Color::Black});
    for (const auto& v : j.at("V_white"))
      vs.push_back({v.at("id").get<VertexId>(), {v.at("x").get<double>(), v.at("y").get<double>()}, Color::White});
    std::sort(vs.begin(), vs.end(), [](const MapVertex& a, const MapVertex& b) { return a.id < b.id; });
    for (std::size_t i = 0; i < vs.size(); ++i)
      if (vs[i].id != static_cast<VertexId>(i)) throw ParseError("map vertex ids must be dense");
    map.vertices = std::move(vs);
    for (const auto& q : j.at("quads")) {
      const auto corners = q.get<std::vector<VertexId>>();
      if (corners.size() != 4) throw ParseError("quad must list four corners");
      for (VertexId c : corners)
        if (c < 0 || static_cast<std::size_t>(c) >= map.vertices.size()) throw ParseError("quad corner out of range");
      map.quads.push_back({corners[0], corners[1], corners[2], corners[3]});
    }
    auto readArcs = [](const nlohmann::json& a) {
      return BoundaryArcs{a.at("S1").get<std::vector<VertexId>>(), a.at("T1").get<std::vector<VertexId>>(),
                          a.at("S2").get<std::vector<VertexId>>(), a.at("T2").get<std::vector<VertexId>>()};
    };
    map.arcs = readArcs(j.at("arcs"));
    map.boundary = detail::quadBoundary(map);
    if (j.contains("boundary_layer")) {
      const auto& l = j.at("boundary_layer");
      BoundaryLayer layer;
      for (const auto& e : l.at("edges")) layer.edges.emplace_back(e.at(0).get<VertexId>(), e.at(1).get<VertexId>());
      layer.cycle = l.at("cycle").get<std::vector<VertexId>>();
      layer.arcs = readArcs(l.at("arcs"));
      map.layer = std::move(layer);
    }
    return map;
  } catch (const nlohmann::json::exception& ex) {
    throw ParseError(std::string("map json: ") + ex.what());
  }
}

}  // namespace modlab
