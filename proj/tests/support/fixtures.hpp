#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "modlab/modlab.hpp"

namespace fixtures {

using namespace modlab;

inline std::string dataPath(const std::string& name) { return std::string(MODLAB_TEST_DATA) + "/" + name; }

inline OrthodiagonalMap meshMap(const std::string& base) {
  return ingestTriangulation(dataPath(base + ".node"), dataPath(base + ".ele"));
}

inline PlaneNetwork singleEdge(double sigma = 1.0) {
  return PlaneNetwork({{0, {0.0, 0.0}}, {1, {1.0, 0.0}}}, {{0, 0, 1, sigma, std::nullopt}}, {0}, {1}, {0, 1});
}

// a - m - b on a line.
inline PlaneNetwork pathOfThree(double s1 = 1.0, double s2 = 1.0) {
  return PlaneNetwork({{0, {0.0, 0.0}}, {1, {1.0, 0.0}}, {2, {2.0, 0.0}}},
                      {{0, 0, 1, s1, std::nullopt}, {1, 1, 2, s2, std::nullopt}}, {0}, {2}, {0, 1, 2});
}

// Lattice path on the primal of a grid map, given as a list of vertex
// positions in units of 1/n.
inline Path latticePath(const PlaneNetwork& net, int n, const std::vector<std::pair<long, long>>& pts) {
  auto find = [&](long a, long b) {
    const Point p{static_cast<double>(a) / n, static_cast<double>(b) / n};
    for (const Vertex& v : net.vertices())
      if (std::abs(v.position.x - p.x) < 1e-12 && std::abs(v.position.y - p.y) < 1e-12) return v.id;
    throw std::runtime_error("lattice point not in network");
  };
  Path path;
  for (auto [a, b] : pts) path.vertices.push_back(find(a, b));
  for (std::size_t i = 0; i + 1 < path.vertices.size(); ++i) {
    const VertexId u = path.vertices[i], w = path.vertices[i + 1];
    EdgeId found = -1;
    for (EdgeId e : net.rotation(u))
      if (net.opposite(e, u) == w) found = e;
    if (found < 0) throw std::runtime_error("lattice points not adjacent");
    path.edges.push_back(found);
  }
  return path;
}

// Row j (0..n) of the straight grid on [0, L] x [0, 1].
inline Path gridRow(const PlaneNetwork& net, int L, int n, long j) {
  std::vector<std::pair<long, long>> pts;
  for (long a = 0; a <= static_cast<long>(L) * n; ++a) pts.emplace_back(a, j);
  return latticePath(net, n, pts);
}

// Same network with conductances redrawn uniformly from [lo, hi].
inline PlaneNetwork withRandomSigma(const PlaneNetwork& net, std::uint64_t seed, double lo = 0.5, double hi = 2.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> draw(lo, hi);
  std::vector<Edge> es = net.edges();
  for (Edge& e : es) e.sigma = draw(rng);
  return PlaneNetwork(net.vertices(), es, net.boundaryA(), net.boundaryB(), net.outerBoundary());
}

// Monotone lattice paths of the rotated grid (each step +x or +y) from A to
// B, with the reflected random-walk probability of each: uniform first edge,
// then a fair choice whenever both steps stay inside.
inline std::pair<PathFamily, std::vector<double>> reflectedWalkFamily(const PlaneNetwork& net, int L, int n) {
  const long ln = static_cast<long>(L) * n;
  auto inside = [&](long a, long b) { return a + b >= 0 && a + b <= 2 * ln && b - a >= 0 && b - a <= 2 * n; };
  PathFamily family;
  std::vector<double> mu;
  std::vector<std::pair<long, long>> pts;
  auto walk = [&](auto&& self, long a, long b, double p) -> void {
    pts.emplace_back(a, b);
    if (a + b == 2 * ln) {
      family.push_back(latticePath(net, n, pts));
      mu.push_back(p);
    } else {
      const bool right = inside(a + 1, b);
      const bool up = inside(a, b + 1);
      const double share = (right && up) ? 0.5 : 1.0;
      if (right) self(self, a + 1, b, p * share);
      if (up) self(self, a, b + 1, p * share);
    }
    pts.pop_back();
  };
  // Start vertices on x + y = 0 have one or two first edges; each of the 2n
  // first edges gets probability 1/(2n).
  for (long a = -n; a <= 0; ++a) {
    const long b = -a;
    const double first = 1.0 / (2.0 * n);
    pts.emplace_back(a, b);
    if (inside(a + 1, b)) walk(walk, a + 1, b, first);
    if (inside(a, b + 1)) walk(walk, a, b + 1, first);
    pts.pop_back();
  }
  return {family, mu};
}

// Zig-zag path of the rotated grid confined to the band m <= b - a <= m + 1
// (lattice units), m = 0 .. 2n-1. It starts on x + y = 0 and alternates
// steps until it reaches x + y = 2L.
inline Path zigZag(const PlaneNetwork& net, int L, int n, long m) {
  const long ln = static_cast<long>(L) * n;
  long a = -(m + 1) / 2;
  long b = -a;
  std::vector<std::pair<long, long>> pts{{a, b}};
  while (a + b < 2 * ln) {
    if (b - a == m) ++b;
    else ++a;
    pts.emplace_back(a, b);
  }
  return latticePath(net, n, pts);
}

// Random plane network on a jittered W x H grid with random diagonals,
// deletions and bent parallel edges. A and B are runs of the left and right
// columns. At most 12 vertices.
inline PlaneNetwork randomNetwork(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto uniform = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
  auto chance = [&](double p) { return uniform(0.0, 1.0) < p; };
  for (int attempt = 0;; ++attempt) {
    static constexpr std::pair<int, int> shapes[] = {{2, 2}, {3, 2}, {2, 3}, {3, 3}, {4, 2}, {2, 4}, {4, 3}, {3, 4},
                                                     {2, 5}, {5, 2}, {6, 2}, {2, 6}};
    const auto [W, H] = shapes[std::uniform_int_distribution<int>(0, 11)(rng)];
    auto id = [&, W = W](int i, int j) { return j * W + i; };
    std::vector<Vertex> vs;
    for (int j = 0; j < H; ++j)
      for (int i = 0; i < W; ++i) {
        Point p{static_cast<double>(i), static_cast<double>(j)};
        if (i > 0 && i < W - 1 && j > 0 && j < H - 1) p = p + Point{uniform(-0.2, 0.2), uniform(-0.2, 0.2)};
        vs.push_back({id(i, j), p});
      }
    struct Proto {
      VertexId u, v;
      std::optional<Point> bend;
      bool removable;
    };
    std::vector<Proto> proto;
    for (int j = 0; j < H; ++j)
      for (int i = 0; i < W; ++i) {
        if (i + 1 < W) proto.push_back({id(i, j), id(i + 1, j), std::nullopt, j > 0 && j < H - 1});
        if (j + 1 < H) proto.push_back({id(i, j), id(i, j + 1), std::nullopt, i > 0 && i < W - 1});
      }
    for (int j = 0; j + 1 < H; ++j)
      for (int i = 0; i + 1 < W; ++i)
        if (chance(0.4)) {
          if (chance(0.5)) proto.push_back({id(i, j), id(i + 1, j + 1), std::nullopt, true});
          else proto.push_back({id(i + 1, j), id(i, j + 1), std::nullopt, true});
        }
    std::vector<Proto> kept;
    for (const Proto& p : proto)
      if (!(p.removable && chance(0.15))) kept.push_back(p);
    // Occasionally double a horizontal edge with a bent copy.
    const std::size_t base = kept.size();
    for (std::size_t k = 0; k < base; ++k) {
      const Proto p = kept[k];
      if (p.bend || !chance(0.1)) continue;
      const Point a = vs[static_cast<std::size_t>(p.u)].position, b = vs[static_cast<std::size_t>(p.v)].position;
      const Point d = b - a;
      const Point normal{-d.y, d.x};
      kept.push_back({p.u, p.v, midpoint(a, b) + (chance(0.5) ? 0.2 : -0.2) * normal, true});
    }

    std::vector<Edge> es;
    for (const Proto& p : kept)
      es.push_back({static_cast<EdgeId>(es.size()), p.u, p.v, uniform(0.5, 2.0), p.bend});

    std::vector<VertexId> boundary;
    for (int j = H - 1; j >= 0; --j) boundary.push_back(id(0, j));
    for (int i = 1; i < W; ++i) boundary.push_back(id(i, 0));
    for (int j = 1; j < H; ++j) boundary.push_back(id(W - 1, j));
    for (int i = W - 2; i >= 1; --i) boundary.push_back(id(i, H - 1));

    auto run = [&](int column, bool downward) {
      const int len = std::uniform_int_distribution<int>(1, H)(rng);
      const int start = std::uniform_int_distribution<int>(0, H - len)(rng);
      std::vector<VertexId> out;
      for (int k = 0; k < len; ++k) out.push_back(id(column, downward ? H - 1 - start - k : start + k));
      return out;
    };
    PlaneNetwork net(vs, es, run(0, true), run(W - 1, false), boundary);
    if (!validate(net).empty()) continue;
    try {
      solveStandard(net);
    } catch (const Disconnected&) {
      continue;
    }
    return net;
  }
}

}  // namespace fixtures
