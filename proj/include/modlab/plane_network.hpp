#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "modlab/error.hpp"
#include "modlab/geometry.hpp"

namespace modlab {

using VertexId = std::int32_t;
using EdgeId = std::int32_t;

struct Vertex {
  VertexId id = 0;
  Point position;
};

struct Edge {
  EdgeId id = 0;
  VertexId u = 0;
  VertexId v = 0;
  double sigma = 1.0;
  // Optional interior bend point; the edge is then the polyline u -> bend -> v.
  std::optional<Point> bend;
};

// An edge together with a traversal direction. `forward` means u -> v.
struct DirectedEdge {
  EdgeId edge = 0;
  bool forward = true;

  DirectedEdge reversed() const { return {edge, !forward}; }
  friend bool operator==(const DirectedEdge&, const DirectedEdge&) = default;
};

// A simple path: vertices[0] in A, vertices.back() in B and
// edges[i] joins vertices[i] and vertices[i + 1].
struct Path {
  std::vector<VertexId> vertices;
  std::vector<EdgeId> edges;

  friend bool operator==(const Path&, const Path&) = default;
};

// Counterclockwise cyclic order of incident edge ids at every vertex.
using RotationSystem = std::vector<std::vector<EdgeId>>;

struct Violation {
  std::string invariant;
  std::string element;
};

// Embedded weighted plane graph with two designated boundary vertex sets.
// Immutable once built; the rotation system is derived from edge geometry.
class PlaneNetwork {
 public:
  PlaneNetwork() = default;

  PlaneNetwork(std::vector<Vertex> vertices, std::vector<Edge> edges, std::vector<VertexId> boundaryA,
               std::vector<VertexId> boundaryB, std::vector<VertexId> outerBoundary)
      : vertices_(std::move(vertices)),
        edges_(std::move(edges)),
        a_(std::move(boundaryA)),
        b_(std::move(boundaryB)),
        boundary_(std::move(outerBoundary)) {
    index();
  }

  std::size_t vertexCount() const { return vertices_.size(); }
  std::size_t edgeCount() const { return edges_.size(); }
  const std::vector<Vertex>& vertices() const { return vertices_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const Vertex& vertex(VertexId v) const { return vertices_[static_cast<std::size_t>(v)]; }
  const Edge& edge(EdgeId e) const { return edges_[static_cast<std::size_t>(e)]; }
  Point position(VertexId v) const { return vertex(v).position; }
  double sigma(EdgeId e) const { return edge(e).sigma; }

  const std::vector<VertexId>& boundaryA() const { return a_; }
  const std::vector<VertexId>& boundaryB() const { return b_; }
  const std::vector<VertexId>& outerBoundary() const { return boundary_; }
  bool inA(VertexId v) const { return role_[static_cast<std::size_t>(v)] == 1; }
  bool inB(VertexId v) const { return role_[static_cast<std::size_t>(v)] == 2; }

  // Position of v in the outer boundary cycle, or -1.
  int boundaryIndex(VertexId v) const { return boundaryPos_[static_cast<std::size_t>(v)]; }

  // Incident edges of v in counterclockwise order.
  const std::vector<EdgeId>& rotation(VertexId v) const { return rotation_[static_cast<std::size_t>(v)]; }
  const RotationSystem& rotationSystem() const { return rotation_; }

  // Index of e inside rotation(v).
  int rotationIndex(VertexId v, EdgeId e) const {
    const auto& rot = rotation(v);
    for (std::size_t i = 0; i < rot.size(); ++i)
      if (rot[i] == e) return static_cast<int>(i);
    return -1;
  }

  VertexId opposite(EdgeId e, VertexId v) const {
    const Edge& ed = edge(e);
    return ed.u == v ? ed.v : ed.u;
  }

  // First point after `from` along the polyline of e; the departure direction.
  Point departure(EdgeId e, VertexId from) const {
    const Edge& ed = edge(e);
    if (ed.bend) return *ed.bend;
    return position(opposite(e, from));
  }

  // Polyline of e traversed starting at `from`.
  std::vector<Point> polyline(EdgeId e, VertexId from) const {
    const Edge& ed = edge(e);
    std::vector<Point> pts{position(from)};
    if (ed.bend) pts.push_back(*ed.bend);
    pts.push_back(position(opposite(e, from)));
    return pts;
  }

  // A point in the relative interior of e.
  Point interiorPoint(EdgeId e) const {
    const Edge& ed = edge(e);
    return midpoint(position(ed.u), ed.bend ? *ed.bend : position(ed.v));
  }

  VertexId tail(DirectedEdge d) const { return d.forward ? edge(d.edge).u : edge(d.edge).v; }
  VertexId head(DirectedEdge d) const { return d.forward ? edge(d.edge).v : edge(d.edge).u; }

  // True when the network had two incident edges leaving a vertex at the same
  // angle; the stored rotation then uses an arbitrary but stable tie order.
  bool hasAngularTie() const { return tie_.has_value(); }
  const std::optional<std::pair<EdgeId, EdgeId>>& angularTie() const { return tie_; }

 private:
  void index();

  std::vector<Vertex> vertices_;
  std::vector<Edge> edges_;
  std::vector<VertexId> a_;
  std::vector<VertexId> b_;
  std::vector<VertexId> boundary_;

  std::vector<std::uint8_t> role_;
  std::vector<int> boundaryPos_;
  RotationSystem rotation_;
  std::optional<std::pair<EdgeId, EdgeId>> tie_;
};

namespace detail {

inline bool validVertex(const std::vector<Vertex>& vs, VertexId v) {
  return v >= 0 && static_cast<std::size_t>(v) < vs.size();
}

// Sorts incident edges counterclockwise by departure angle; reports the
// first exact tie it sees.
inline std::vector<EdgeId> sortIncident(const PlaneNetwork& net, VertexId v, std::vector<EdgeId> incident,
                                        std::optional<std::pair<EdgeId, EdgeId>>& tie) {
  const Point origin = net.position(v);
  std::stable_sort(incident.begin(), incident.end(), [&](EdgeId a, EdgeId b) {
    return angleLess(origin, net.departure(a, v), net.departure(b, v));
  });
  for (std::size_t i = 0; i + 1 < incident.size() && !tie; ++i) {
    if (sameDirection(origin, net.departure(incident[i], v), net.departure(incident[i + 1], v)))
      tie = std::make_pair(incident[i], incident[i + 1]);
  }
  return incident;
}

}  // namespace detail

inline void PlaneNetwork::index() {
  const std::size_t n = vertices_.size();
  role_.assign(n, 0);
  boundaryPos_.assign(n, -1);
  for (VertexId v : a_)
    if (detail::validVertex(vertices_, v)) role_[static_cast<std::size_t>(v)] = 1;
  for (VertexId v : b_)
    if (detail::validVertex(vertices_, v) && role_[static_cast<std::size_t>(v)] == 0)
      role_[static_cast<std::size_t>(v)] = 2;
  for (std::size_t i = 0; i < boundary_.size(); ++i)
    if (detail::validVertex(vertices_, boundary_[i])) boundaryPos_[static_cast<std::size_t>(boundary_[i])] = static_cast<int>(i);

  std::vector<std::vector<EdgeId>> incident(n);
  for (const Edge& e : edges_) {
    if (!detail::validVertex(vertices_, e.u) || !detail::validVertex(vertices_, e.v) || e.u == e.v) continue;
    incident[static_cast<std::size_t>(e.u)].push_back(e.id);
    incident[static_cast<std::size_t>(e.v)].push_back(e.id);
  }
  rotation_.assign(n, {});
  tie_.reset();
  for (std::size_t v = 0; v < n; ++v)
    rotation_[v] = detail::sortIncident(*this, static_cast<VertexId>(v), std::move(incident[v]), tie_);
}

// Counterclockwise rotation system sorted by first-segment departure angle,
// starting from angle 0. Throws AngularTie on coincident departures.
inline RotationSystem angularRotation(const PlaneNetwork& net) {
  if (const auto& tie = net.angularTie())
    throw AngularTie("edges " + std::to_string(tie->first) + " and " + std::to_string(tie->second) +
                     " leave a shared vertex at the same angle");
  return net.rotationSystem();
}

namespace detail {

struct SegmentRef {
  EdgeId edge;
  Point a;
  Point b;
};

inline void checkPlanarity(const PlaneNetwork& net, std::vector<Violation>& out) {
  std::vector<SegmentRef> segs;
  double minX = std::numeric_limits<double>::infinity(), minY = minX;
  double maxX = -minX, maxY = -minX;
  for (const Edge& e : net.edges()) {
    if (!validVertex(net.vertices(), e.u) || !validVertex(net.vertices(), e.v) || e.u == e.v) continue;
    const auto pts = net.polyline(e.id, e.u);
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
      segs.push_back({e.id, pts[i], pts[i + 1]});
      for (Point p : {pts[i], pts[i + 1]}) {
        minX = std::min(minX, p.x);
        minY = std::min(minY, p.y);
        maxX = std::max(maxX, p.x);
        maxY = std::max(maxY, p.y);
      }
    }
  }
  if (segs.empty()) return;

  // Uniform bucket grid over segment bounding boxes.
  const std::size_t cells = std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(static_cast<double>(segs.size()))));
  const double w = std::max(maxX - minX, 1e-300);
  const double h = std::max(maxY - minY, 1e-300);
  auto cellOf = [&](double x, double lo, double span) {
    auto c = static_cast<long>((x - lo) / span * static_cast<double>(cells));
    return static_cast<std::size_t>(std::clamp<long>(c, 0, static_cast<long>(cells) - 1));
  };
  std::vector<std::vector<std::size_t>> grid(cells * cells);
  for (std::size_t s = 0; s < segs.size(); ++s) {
    const auto& sg = segs[s];
    const std::size_t x0 = cellOf(std::min(sg.a.x, sg.b.x), minX, w), x1 = cellOf(std::max(sg.a.x, sg.b.x), minX, w);
    const std::size_t y0 = cellOf(std::min(sg.a.y, sg.b.y), minY, h), y1 = cellOf(std::max(sg.a.y, sg.b.y), minY, h);
    for (std::size_t cx = x0; cx <= x1; ++cx)
      for (std::size_t cy = y0; cy <= y1; ++cy) grid[cx * cells + cy].push_back(s);
  }

  std::vector<std::pair<EdgeId, EdgeId>> reported;
  auto sharedEndpoint = [&](const SegmentRef& s, const SegmentRef& t, Point& shared) {
    for (Point p : {s.a, s.b})
      for (Point q : {t.a, t.b})
        if (p == q) {
          shared = p;
          return true;
        }
    return false;
  };
  for (const auto& bucket : grid) {
    for (std::size_t i = 0; i < bucket.size(); ++i) {
      for (std::size_t j = i + 1; j < bucket.size(); ++j) {
        const SegmentRef& s = segs[bucket[i]];
        const SegmentRef& t = segs[bucket[j]];
        if (s.edge == t.edge) continue;
        if (!segmentsIntersect(s.a, s.b, t.a, t.b)) continue;
        Point shared;
        if (sharedEndpoint(s, t, shared)) {
          // Touching at a common endpoint is fine unless they overlap.
          const Point so = shared == s.a ? s.b : s.a;
          const Point to = shared == t.a ? t.b : t.a;
          if (!sameDirection(shared, so, to)) continue;
        }
        auto key = std::minmax(s.edge, t.edge);
        if (std::find(reported.begin(), reported.end(), std::make_pair(key.first, key.second)) != reported.end())
          continue;
        reported.emplace_back(key.first, key.second);
      }
    }
  }
  std::sort(reported.begin(), reported.end());
  for (auto [e1, e2] : reported)
    out.push_back({"planarity", "edges " + std::to_string(e1) + " and " + std::to_string(e2) + " cross"});
}

// True when `ids` occupy one contiguous run of the cyclic boundary order.
inline bool contiguousRun(const PlaneNetwork& net, const std::vector<VertexId>& ids) {
  const std::size_t n = net.outerBoundary().size();
  if (ids.empty() || n == 0) return false;
  std::vector<char> member(n, 0);
  for (VertexId v : ids) {
    const int pos = net.boundaryIndex(v);
    if (pos < 0) return false;
    member[static_cast<std::size_t>(pos)] = 1;
  }
  std::size_t starts = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (member[i] && !member[(i + n - 1) % n]) ++starts;
  return starts == 1 || (starts == 0 && ids.size() == n);
}

}  // namespace detail

// Checks every PlaneNetwork invariant; an empty result means valid.
inline std::vector<Violation> validate(const PlaneNetwork& net) {
  std::vector<Violation> out;
  const auto& vs = net.vertices();
  for (std::size_t i = 0; i < vs.size(); ++i) {
    if (vs[i].id != static_cast<VertexId>(i)) out.push_back({"dense vertex ids", "vertex " + std::to_string(i)});
    if (!isFinite(vs[i].position)) out.push_back({"finite positions", "vertex " + std::to_string(i)});
  }
  const auto& es = net.edges();
  bool endpointsOk = true;
  for (std::size_t i = 0; i < es.size(); ++i) {
    const Edge& e = es[i];
    const std::string name = "edge " + std::to_string(i);
    if (e.id != static_cast<EdgeId>(i)) out.push_back({"dense edge ids", name});
    if (!(e.sigma > 0.0) || !std::isfinite(e.sigma)) out.push_back({"positive weight", name});
    if (!detail::validVertex(vs, e.u) || !detail::validVertex(vs, e.v)) {
      out.push_back({"edge endpoints exist", name});
      endpointsOk = false;
      continue;
    }
    if (e.u == e.v) out.push_back({"no self-loops", name});
    if (e.bend && !isFinite(*e.bend)) out.push_back({"finite positions", name + " bend"});
  }

  auto checkSet = [&](const std::vector<VertexId>& set, const char* label) {
    if (set.empty()) out.push_back({std::string("nonempty ") + label, label});
    for (VertexId v : set)
      if (!detail::validVertex(vs, v)) out.push_back({std::string(label) + " ids exist", std::to_string(v)});
  };
  checkSet(net.boundaryA(), "A");
  checkSet(net.boundaryB(), "B");
  for (VertexId v : net.boundaryA())
    if (std::find(net.boundaryB().begin(), net.boundaryB().end(), v) != net.boundaryB().end())
      out.push_back({"A and B disjoint", "vertex " + std::to_string(v)});

  {
    std::vector<char> seen(vs.size(), 0);
    for (VertexId v : net.outerBoundary()) {
      if (!detail::validVertex(vs, v)) {
        out.push_back({"boundary ids exist", std::to_string(v)});
        continue;
      }
      if (seen[static_cast<std::size_t>(v)]++) out.push_back({"boundary is a simple cycle", "vertex " + std::to_string(v)});
    }
  }
  if (!detail::contiguousRun(net, net.boundaryA()))
    out.push_back({"A is a contiguous boundary run", "A"});
  if (!detail::contiguousRun(net, net.boundaryB()))
    out.push_back({"B is a contiguous boundary run", "B"});

  if (const auto& tie = net.angularTie())
    out.push_back({"rotation consistent with geometry",
                   "edges " + std::to_string(tie->first) + " and " + std::to_string(tie->second)});

  if (endpointsOk) detail::checkPlanarity(net, out);
  return out;
}

// Checks that `p` is a simple path from A to B in `net`.
inline void requireSimplePath(const PlaneNetwork& net, const Path& p) {
  if (p.vertices.size() < 2 || p.edges.size() + 1 != p.vertices.size())
    throw InvalidPath("path needs at least one edge and matching vertex/edge counts");
  if (!net.inA(p.vertices.front())) throw InvalidPath("path does not start in A");
  if (!net.inB(p.vertices.back())) throw InvalidPath("path does not end in B");
  std::vector<char> seen(net.vertexCount(), 0);
  for (VertexId v : p.vertices) {
    if (v < 0 || static_cast<std::size_t>(v) >= net.vertexCount()) throw InvalidPath("unknown vertex");
    if (seen[static_cast<std::size_t>(v)]++) throw InvalidPath("repeated vertex " + std::to_string(v));
  }
  for (std::size_t i = 0; i < p.edges.size(); ++i) {
    const EdgeId e = p.edges[i];
    if (e < 0 || static_cast<std::size_t>(e) >= net.edgeCount()) throw InvalidPath("unknown edge");
    const Edge& ed = net.edge(e);
    const VertexId a = p.vertices[i];
    const VertexId b = p.vertices[i + 1];
    if (!((ed.u == a && ed.v == b) || (ed.u == b && ed.v == a)))
      throw InvalidPath("edge " + std::to_string(e) + " does not join consecutive vertices");
  }
}

// Outward reference direction at a boundary vertex: the bisector of the
// outer wedge between the chords to its boundary neighbours.
inline Point outwardDirection(const PlaneNetwork& net, VertexId v) {
  const auto& cyc = net.outerBoundary();
  const int pos = net.boundaryIndex(v);
  const Point o = net.position(v);
  if (pos < 0 || cyc.size() < 2) {
    Point c{0.0, 0.0};
    for (const auto& vx : net.vertices()) c = c + vx.position;
    c = (1.0 / static_cast<double>(std::max<std::size_t>(1, net.vertexCount()))) * c;
    Point d = o - c;
    return norm(d) > 0.0 ? d : Point{0.0, -1.0};
  }
  const std::size_t n = cyc.size();
  const Point pred = net.position(cyc[(static_cast<std::size_t>(pos) + n - 1) % n]);
  const Point succ = net.position(cyc[(static_cast<std::size_t>(pos) + 1) % n]);
  const double ap = angleOf(pred - o);
  if (cyc.size() == 2 || pred == succ) return {std::cos(ap + std::numbers::pi), std::sin(ap + std::numbers::pi)};
  double sweep = angleOf(succ - o) - ap;
  if (sweep <= 0.0) sweep += 2.0 * std::numbers::pi;
  const double mid = ap + 0.5 * sweep;
  return {std::cos(mid), std::sin(mid)};
}

// Cyclic position of a virtual direction among the rotation at v: the index
// of the first incident edge strictly counterclockwise-after it, minus 0.5.
inline double virtualRotationPosition(const PlaneNetwork& net, VertexId v, Point direction) {
  const auto& rot = net.rotation(v);
  const Point o = net.position(v);
  const Point target = o + direction;
  std::size_t idx = 0;
  while (idx < rot.size() && !angleLess(o, target, net.departure(rot[idx], v))) ++idx;
  return static_cast<double>(idx) - 0.5;
}

enum class Side : std::uint8_t { Unknown, OnPath, Above, Below };

namespace detail {

inline double cyclicOffset(double x, double from, double n) {
  double d = std::fmod(x - from, n);
  if (d < 0.0) d += n;
  return d;
}

}  // namespace detail

// Classifies every edge relative to a simple A->B path: on it, above it
// (the side of the boundary arc running from B back to A counterclockwise)
// or below it. Sides at path vertices come from the rotation system; the
// rest propagates through the graph with the path removed. Components that
// never touch the path fall back to a winding-number test.
inline std::vector<Side> classifyEdges(const PlaneNetwork& net, const Path& path) {
  const std::size_t nE = net.edgeCount();
  const std::size_t nV = net.vertexCount();
  std::vector<Side> side(nE, Side::Unknown);
  std::vector<char> onPathVertex(nV, 0);
  for (EdgeId e : path.edges) side[static_cast<std::size_t>(e)] = Side::OnPath;
  for (VertexId v : path.vertices) onPathVertex[static_cast<std::size_t>(v)] = 1;

  const std::size_t k = path.vertices.size();
  for (std::size_t i = 0; i < k; ++i) {
    const VertexId v = path.vertices[i];
    const auto& rot = net.rotation(v);
    const double deg = static_cast<double>(rot.size());
    if (rot.empty()) continue;
    const double outPos = i + 1 < k ? static_cast<double>(net.rotationIndex(v, path.edges[i]))
                                    : virtualRotationPosition(net, v, outwardDirection(net, v));
    const double inPos = i > 0 ? static_cast<double>(net.rotationIndex(v, path.edges[i - 1]))
                               : virtualRotationPosition(net, v, outwardDirection(net, v));
    const double span = detail::cyclicOffset(inPos, outPos, deg);
    for (std::size_t r = 0; r < rot.size(); ++r) {
      const EdgeId e = rot[r];
      auto& s = side[static_cast<std::size_t>(e)];
      if (s == Side::OnPath) continue;
      const double off = detail::cyclicOffset(static_cast<double>(r), outPos, deg);
      const Side here = (off > 0.0 && off < span) ? Side::Above : Side::Below;
      if (s == Side::Unknown) s = here;
    }
  }

  // Propagate through vertices off the path.
  std::vector<Side> vside(nV, Side::Unknown);
  std::vector<VertexId> queue;
  auto seed = [&](VertexId v, Side s) {
    if (onPathVertex[static_cast<std::size_t>(v)] || vside[static_cast<std::size_t>(v)] != Side::Unknown) return;
    vside[static_cast<std::size_t>(v)] = s;
    queue.push_back(v);
  };
  for (std::size_t e = 0; e < nE; ++e) {
    if (side[e] != Side::Above && side[e] != Side::Below) continue;
    const Edge& ed = net.edges()[e];
    seed(ed.u, side[e]);
    seed(ed.v, side[e]);
  }
  auto propagate = [&] {
    for (std::size_t qi = 0; qi < queue.size(); ++qi) {
      const VertexId v = queue[qi];
      const Side s = vside[static_cast<std::size_t>(v)];
      for (EdgeId e : net.rotation(v)) {
        auto& es = side[static_cast<std::size_t>(e)];
        if (es == Side::Unknown) es = s;
        seed(net.opposite(e, v), s);
      }
    }
    queue.clear();
  };
  propagate();

  // Leftovers: components detached from the path.
  bool leftovers = false;
  for (std::size_t e = 0; e < nE; ++e) leftovers = leftovers || side[e] == Side::Unknown;
  if (leftovers) {
    std::vector<Point> curve;
    for (std::size_t i = 0; i + 1 < k; ++i) {
      const auto pts = net.polyline(path.edges[i], path.vertices[i]);
      curve.insert(curve.end(), pts.begin(), pts.end() - 1);
    }
    curve.push_back(net.position(path.vertices.back()));
    const auto& cyc = net.outerBoundary();
    const int start = net.boundaryIndex(path.vertices.back());
    const int stop = net.boundaryIndex(path.vertices.front());
    if (start >= 0 && stop >= 0) {
      const std::size_t n = cyc.size();
      for (std::size_t j = (static_cast<std::size_t>(start) + 1) % n; j != static_cast<std::size_t>(stop); j = (j + 1) % n)
        curve.push_back(net.position(cyc[j]));
    }
    for (std::size_t v = 0; v < nV; ++v) {
      if (onPathVertex[v] || vside[v] != Side::Unknown || net.rotation(static_cast<VertexId>(v)).empty()) continue;
      const Point probe = net.interiorPoint(net.rotation(static_cast<VertexId>(v)).front());
      seed(static_cast<VertexId>(v), windingNumber(curve, probe) != 0 ? Side::Above : Side::Below);
      propagate();
    }
  }
  return side;
}

// Edge e lies below path p (or on it).
inline bool isBelow(const PlaneNetwork& net, const Path& p, EdgeId e) {
  const Side s = classifyEdges(net, p)[static_cast<std::size_t>(e)];
  return s == Side::Below || s == Side::OnPath;
}

// Two A->B paths cross when each has an edge outside the other lying below
// the other path.
inline bool pathsCross(const PlaneNetwork& net, const Path& first, const Path& second) {
  requireSimplePath(net, first);
  requireSimplePath(net, second);
  auto hasEdgeBelow = [&](const Path& candidate, const Path& reference) {
    const auto side = classifyEdges(net, reference);
    for (EdgeId e : candidate.edges)
      if (side[static_cast<std::size_t>(e)] == Side::Below) return true;
    return false;
  };
  return hasEdgeBelow(first, second) && hasEdgeBelow(second, first);
}

}  // namespace modlab
