#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "modlab/dirichlet.hpp"
#include "modlab/error.hpp"
#include "modlab/modulus.hpp"
#include "modlab/plane_network.hpp"

namespace modlab {

// Edges of a solved network directed from lower to higher potential. Edges
// whose flow sigma*rho is at or below `threshold` carry direction 0.
struct OrientedNetwork {
  const PlaneNetwork* base = nullptr;
  std::vector<double> potentials;
  std::vector<int> direction;  // +1: u -> v, -1: v -> u, 0: zero edge
  std::vector<double> flow;    // sigma * rho per edge
  double threshold = 0.0;

  bool isZero(EdgeId e) const { return direction[static_cast<std::size_t>(e)] == 0; }
  // Tail when the edge is traversed along its orientation.
  VertexId tail(EdgeId e) const {
    const Edge& ed = base->edge(e);
    return direction[static_cast<std::size_t>(e)] > 0 ? ed.u : ed.v;
  }
  VertexId head(EdgeId e) const {
    const Edge& ed = base->edge(e);
    return direction[static_cast<std::size_t>(e)] > 0 ? ed.v : ed.u;
  }
  std::vector<EdgeId> zeroEdges() const {
    std::vector<EdgeId> out;
    for (std::size_t e = 0; e < direction.size(); ++e)
      if (direction[e] == 0) out.push_back(static_cast<EdgeId>(e));
    return out;
  }
};

inline double defaultZeroThreshold(const PlaneNetwork& net, const std::vector<double>& h) {
  double peak = 0.0;
  for (const Edge& e : net.edges())
    peak = std::max(peak, e.sigma * std::abs(h[static_cast<std::size_t>(e.v)] - h[static_cast<std::size_t>(e.u)]));
  return 1e-11 * peak;
}

namespace detail {

inline bool orientedAcyclic(const OrientedNetwork& on) {
  const PlaneNetwork& net = *on.base;
  std::vector<int> indeg(net.vertexCount(), 0);
  for (std::size_t e = 0; e < on.direction.size(); ++e)
    if (on.direction[e] != 0) ++indeg[static_cast<std::size_t>(on.head(static_cast<EdgeId>(e)))];
  std::vector<VertexId> ready;
  for (std::size_t v = 0; v < indeg.size(); ++v)
    if (indeg[v] == 0) ready.push_back(static_cast<VertexId>(v));
  std::size_t seen = 0;
  while (!ready.empty()) {
    const VertexId v = ready.back();
    ready.pop_back();
    ++seen;
    for (EdgeId e : net.rotation(v)) {
      if (on.isZero(e) || on.tail(e) != v) continue;
      if (--indeg[static_cast<std::size_t>(on.head(e))] == 0) ready.push_back(on.head(e));
    }
  }
  return seen == net.vertexCount();
}

}  // namespace detail

inline OrientedNetwork orient(const PlaneNetwork& net, const std::vector<double>& h,
                              std::optional<double> zeroThreshold = std::nullopt) {
  if (h.size() != net.vertexCount()) throw PreconditionError("potential size does not match vertex count");
  OrientedNetwork on;
  on.base = &net;
  on.potentials = h;
  on.threshold = zeroThreshold.value_or(defaultZeroThreshold(net, h));
  on.direction.assign(net.edgeCount(), 0);
  on.flow.assign(net.edgeCount(), 0.0);
  for (const Edge& e : net.edges()) {
    const double diff = h[static_cast<std::size_t>(e.v)] - h[static_cast<std::size_t>(e.u)];
    const double f = e.sigma * std::abs(diff);
    on.flow[static_cast<std::size_t>(e.id)] = f;
    if (f > on.threshold && diff != 0.0) on.direction[static_cast<std::size_t>(e.id)] = diff > 0.0 ? 1 : -1;
  }
  if (!detail::orientedAcyclic(on)) throw CycleDetected("oriented network contains a directed cycle");
  return on;
}

// Largest |inflow - outflow| of sigma*rho over vertices outside A and B.
inline double nodeBalanceResidual(const OrientedNetwork& on) {
  const PlaneNetwork& net = *on.base;
  double worst = 0.0;
  for (std::size_t v = 0; v < net.vertexCount(); ++v) {
    const auto vid = static_cast<VertexId>(v);
    if (net.inA(vid) || net.inB(vid)) continue;
    double bal = 0.0;
    for (EdgeId e : net.rotation(vid)) {
      if (on.isZero(e)) continue;
      bal += on.tail(e) == vid ? on.flow[static_cast<std::size_t>(e)] : -on.flow[static_cast<std::size_t>(e)];
    }
    worst = std::max(worst, std::abs(bal));
  }
  return worst;
}

namespace detail {

// A-vertices in counterclockwise boundary order, starting at the run's first
// vertex (the top end).
inline std::vector<VertexId> orderedA(const PlaneNetwork& net) {
  const auto& cyc = net.outerBoundary();
  const std::size_t n = cyc.size();
  std::size_t start = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (net.inA(cyc[i]) && !net.inA(cyc[(i + n - 1) % n])) {
      start = i;
      break;
    }
  std::vector<VertexId> out;
  for (std::size_t k = 0; k < n; ++k) {
    const VertexId v = cyc[(start + k) % n];
    if (net.inA(v)) out.push_back(v);
  }
  return out;
}

inline bool activeOut(const OrientedNetwork& on, const std::vector<char>& active, EdgeId e, VertexId v) {
  return active[static_cast<std::size_t>(e)] && !on.isZero(e) && on.tail(e) == v;
}

// Extreme walk through the active DAG. `clockwise` selects the top path
// (first outgoing edge clockwise from the arrival direction); otherwise the
// bottom path.
inline std::optional<Path> extremePath(const OrientedNetwork& on, const std::vector<char>& active, bool clockwise) {
  const PlaneNetwork& net = *on.base;
  auto starts = orderedA(net);
  if (!clockwise) std::reverse(starts.begin(), starts.end());

  auto pick = [&](VertexId v, double fromPos) -> std::optional<EdgeId> {
    const auto& rot = net.rotation(v);
    const auto deg = static_cast<long>(rot.size());
    if (deg == 0) return std::nullopt;
    // First rotation slot strictly past fromPos in the chosen direction.
    const long idx = clockwise ? static_cast<long>(std::ceil(fromPos)) - 1 : static_cast<long>(std::floor(fromPos)) + 1;
    for (long k = 0; k < deg; ++k) {
      const long j = clockwise ? idx - k : idx + k;
      const EdgeId e = rot[static_cast<std::size_t>(((j % deg) + deg) % deg)];
      if (activeOut(on, active, e, v)) return e;
    }
    return std::nullopt;
  };

  for (VertexId a : starts) {
    const double startPos = virtualRotationPosition(net, a, outwardDirection(net, a));
    auto first = pick(a, startPos);
    if (!first) continue;
    Path path{{a}, {}};
    EdgeId e = *first;
    while (true) {
      const VertexId w = on.head(e);
      path.vertices.push_back(w);
      path.edges.push_back(e);
      if (net.inB(w)) return path;
      if (path.edges.size() > net.edgeCount()) throw TopologyError("extreme-path walk does not terminate");
      auto next = pick(w, static_cast<double>(net.rotationIndex(w, e)));
      if (!next)
        throw TopologyError("walk stalls at vertex " + std::to_string(w) + " outside B");
      e = *next;
    }
  }
  return std::nullopt;
}

}  // namespace detail

// The path in the active subgraph with every other active edge below or on
// it; nullopt when no A -> B path remains.
inline std::optional<Path> topPath(const OrientedNetwork& on, const std::vector<char>& active) {
  return detail::extremePath(on, active, true);
}

inline std::optional<Path> bottomPath(const OrientedNetwork& on, const std::vector<char>& active) {
  return detail::extremePath(on, active, false);
}

struct NcmsDecomposition {
  std::vector<Path> paths;  // extraction order, top first
  std::vector<double> masses;
  double modulus = 0.0;
  std::vector<double> pmf;
  std::vector<double> potentials;
  double threshold = 0.0;
  // Residual flow discarded on edges that could no longer lie on any A -> B path.
  double prunedFlow = 0.0;
};

namespace detail {

// Deactivates edges that dead-end: head neither in B nor with an active
// outgoing edge, or tail neither in A nor with an active incoming edge.
inline double pruneDeadEnds(const OrientedNetwork& on, std::vector<char>& active, const std::vector<double>& r) {
  const PlaneNetwork& net = *on.base;
  double pruned = 0.0;
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t v = 0; v < net.vertexCount(); ++v) {
      const auto vid = static_cast<VertexId>(v);
      int in = 0;
      int out = 0;
      for (EdgeId e : net.rotation(vid)) {
        if (!active[static_cast<std::size_t>(e)]) continue;
        (on.tail(e) == vid ? out : in)++;
      }
      const bool deadIn = in > 0 && out == 0 && !net.inB(vid);
      const bool deadOut = out > 0 && in == 0 && !net.inA(vid);
      if (!deadIn && !deadOut) continue;
      for (EdgeId e : net.rotation(vid)) {
        if (!active[static_cast<std::size_t>(e)]) continue;
        active[static_cast<std::size_t>(e)] = 0;
        pruned = std::max(pruned, r[static_cast<std::size_t>(e)]);
        changed = true;
      }
    }
  }
  return pruned;
}

}  // namespace detail

// Peels top paths off the residual capacity r = sigma*rho until none remain.
inline NcmsDecomposition decompose(const PlaneNetwork& net, const std::vector<double>& h,
                                   std::optional<double> zeroThreshold = std::nullopt) {
  const OrientedNetwork on = orient(net, h, zeroThreshold);
  NcmsDecomposition out;
  out.potentials = h;
  out.threshold = on.threshold;
  std::vector<double> r = on.flow;
  std::vector<char> active(net.edgeCount(), 0);
  double peak = 0.0;
  for (std::size_t e = 0; e < r.size(); ++e) {
    active[e] = on.direction[e] != 0;
    peak = std::max(peak, r[e]);
  }
  const double dustLimit = 1e-9 * peak;
  auto prune = [&] {
    const double worst = detail::pruneDeadEnds(on, active, r);
    if (worst > dustLimit)
      throw TopologyError("dead-end edge still carries flow " + std::to_string(worst));
    out.prunedFlow = std::max(out.prunedFlow, worst);
  };
  prune();

  for (std::size_t iter = 0; iter <= net.edgeCount(); ++iter) {
    auto path = topPath(on, active);
    if (!path) break;
    double m = std::numeric_limits<double>::infinity();
    for (EdgeId e : path->edges) m = std::min(m, r[static_cast<std::size_t>(e)]);
    for (EdgeId e : path->edges) {
      double& re = r[static_cast<std::size_t>(e)];
      re -= m;
      if (re < 0.0) {
        if (re < -1e-12) throw TopologyError("residual capacity went negative");
        re = 0.0;
      }
      if (re <= on.threshold) active[static_cast<std::size_t>(e)] = 0;
    }
    out.paths.push_back(std::move(*path));
    out.masses.push_back(m);
    prune();
  }
  if (topPath(on, active)) throw TopologyError("decomposition exceeded the edge-count iteration bound");

  for (double m : out.masses) out.modulus += m;
  for (double m : out.masses) out.pmf.push_back(out.modulus > 0.0 ? m / out.modulus : 0.0);
  return out;
}

inline NcmsDecomposition decompose(const PlaneNetwork& net) { return decompose(net, solveStandard(net).potentials); }

// Sum over paths of mass times the unit flow along the path, per edge in the
// u -> v convention.
inline std::vector<double> flowDecomposition(const PlaneNetwork& net, const NcmsDecomposition& dec) {
  std::vector<double> along(net.edgeCount(), 0.0);
  for (std::size_t k = 0; k < dec.paths.size(); ++k) {
    const Path& p = dec.paths[k];
    for (std::size_t i = 0; i < p.edges.size(); ++i) {
      const Edge& e = net.edge(p.edges[i]);
      along[static_cast<std::size_t>(e.id)] += e.u == p.vertices[i] ? dec.masses[k] : -dec.masses[k];
    }
  }
  return along;
}

inline nlohmann::json toJson(const NcmsDecomposition& dec) {
  nlohmann::json paths = nlohmann::json::array();
  for (std::size_t k = 0; k < dec.paths.size(); ++k)
    paths.push_back({{"vertices", dec.paths[k].vertices},
                     {"edges", dec.paths[k].edges},
                     {"mass", dec.masses[k]},
                     {"pmf", dec.pmf[k]}});
  return {{"modulus", dec.modulus}, {"paths", std::move(paths)}};
}

}  // namespace modlab
