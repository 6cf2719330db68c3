#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "modlab/dirichlet.hpp"
#include "modlab/error.hpp"
#include "modlab/plane_network.hpp"

namespace modlab {

using PathFamily = std::vector<Path>;

inline double rhoLength(const std::vector<double>& rho, const Path& path) {
  double len = 0.0;
  for (EdgeId e : path.edges) len += rho[static_cast<std::size_t>(e)];
  return len;
}

inline bool isAdmissible(const PathFamily& family, const std::vector<double>& rho, double tolerance = 1e-12) {
  return std::all_of(family.begin(), family.end(),
                     [&](const Path& p) { return rhoLength(rho, p) >= 1.0 - tolerance; });
}

// Energy of the standard {0,1} Dirichlet solution.
inline double modulusFromEnergy(const PlaneNetwork& net, const SolverOptions& options = {}) {
  return solveStandard(net, options).energy;
}

namespace detail {

// y = N^T mu: how much pmf mass crosses each edge.
inline std::vector<double> edgeUsage(std::size_t edgeCount, const PathFamily& family, const std::vector<double>& weights) {
  std::vector<double> y(edgeCount, 0.0);
  for (std::size_t i = 0; i < family.size(); ++i)
    for (EdgeId e : family[i].edges) y[static_cast<std::size_t>(e)] += weights[i];
  return y;
}

}  // namespace detail

// mu^T N Sigma^{-1} N^T mu: the expected sigma-weighted overlap of two
// independent mu-random paths.
inline double expectedOverlap(const PlaneNetwork& net, const PathFamily& family, const std::vector<double>& mu) {
  if (mu.size() != family.size()) throw PreconditionError("pmf size does not match family");
  const auto y = detail::edgeUsage(net.edgeCount(), family, mu);
  double total = 0.0;
  for (std::size_t e = 0; e < y.size(); ++e) total += y[e] * y[e] / net.edges()[e].sigma;
  return total;
}

// Probability that a mu-random path uses edge e.
inline double edgeProbability(const PathFamily& family, const std::vector<double>& mu, EdgeId e) {
  double p = 0.0;
  for (std::size_t i = 0; i < family.size(); ++i)
    if (std::find(family[i].edges.begin(), family[i].edges.end(), e) != family[i].edges.end()) p += mu[i];
  return p;
}

struct BeurlingReport {
  double maxLengthDeviation = 0.0;
  std::vector<std::size_t> overlongPaths;
  // Max per-edge |sum of masses through e - sigma(e) rho(e)|; set only when
  // masses were supplied.
  std::optional<double> certificateResidual;
};

inline BeurlingReport verifyBeurling(const PlaneNetwork& net, const PathFamily& family, const std::vector<double>& rho,
                                     const std::optional<std::vector<double>>& masses = std::nullopt,
                                     double tolerance = 1e-9) {
  BeurlingReport report;
  for (std::size_t i = 0; i < family.size(); ++i) {
    const double len = rhoLength(rho, family[i]);
    report.maxLengthDeviation = std::max(report.maxLengthDeviation, std::abs(len - 1.0));
    if (len > 1.0 + tolerance) report.overlongPaths.push_back(i);
  }
  if (masses) {
    if (masses->size() != family.size()) throw PreconditionError("mass vector size does not match family");
    const auto y = detail::edgeUsage(net.edgeCount(), family, *masses);
    double worst = 0.0;
    for (std::size_t e = 0; e < y.size(); ++e)
      worst = std::max(worst, std::abs(y[e] - net.edges()[e].sigma * rho[e]));
    report.certificateResidual = worst;
  }
  return report;
}

// All simple paths from A to B whose interior avoids A and B, in depth-first
// order with incident edges visited by increasing edge id.
inline PathFamily enumerateSimplePaths(const PlaneNetwork& net, std::size_t maxPaths) {
  PathFamily out;
  const std::size_t n = net.vertexCount();
  std::vector<std::vector<EdgeId>> adj(n);
  for (std::size_t v = 0; v < n; ++v) {
    adj[v] = net.rotation(static_cast<VertexId>(v));
    std::sort(adj[v].begin(), adj[v].end());
  }
  std::vector<char> visited(n, 0);
  Path current;

  auto dfs = [&](auto&& self, VertexId v) -> void {
    for (EdgeId e : adj[static_cast<std::size_t>(v)]) {
      const VertexId w = net.opposite(e, v);
      if (visited[static_cast<std::size_t>(w)] || net.inA(w)) continue;
      current.vertices.push_back(w);
      current.edges.push_back(e);
      if (net.inB(w)) {
        if (out.size() >= maxPaths)
          throw TooManyPaths("more than " + std::to_string(maxPaths) + " simple paths");
        out.push_back(current);
      } else {
        visited[static_cast<std::size_t>(w)] = 1;
        self(self, w);
        visited[static_cast<std::size_t>(w)] = 0;
      }
      current.vertices.pop_back();
      current.edges.pop_back();
    }
  };
  std::vector<VertexId> starts = net.boundaryA();
  std::sort(starts.begin(), starts.end());
  for (VertexId a : starts) {
    current = Path{{a}, {}};
    visited[static_cast<std::size_t>(a)] = 1;
    dfs(dfs, a);
    visited[static_cast<std::size_t>(a)] = 0;
  }
  return out;
}

struct QpResult {
  double modulus = 0.0;     // primal value of the rescaled feasible density
  double lowerBound = 0.0;  // dual objective
  std::vector<double> rho;
  std::vector<double> multipliers;
  long sweeps = 0;
  bool converged = false;
};

// min sum sigma rho^2 subject to every path of `family` having rho-length at
// least 1, solved by exact coordinate ascent on the concave dual
//   max 1^T l - 1/4 l^T N Sigma^{-1} N^T l,  l >= 0,
// with the primal recovered as rho = N^T l / (2 sigma).
inline QpResult qpModulus(const PlaneNetwork& net, const PathFamily& family, double relativeGap = 1e-10,
                          long maxSweeps = 2'000'000) {
  QpResult res;
  const std::size_t m = family.size();
  const std::size_t ne = net.edgeCount();
  if (m == 0) {
    res.rho.assign(ne, 0.0);
    res.converged = true;
    return res;
  }
  std::vector<double> inv(ne);
  for (std::size_t e = 0; e < ne; ++e) inv[e] = 1.0 / net.edges()[e].sigma;
  std::vector<double> diag(m, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    for (EdgeId e : family[i].edges) diag[i] += inv[static_cast<std::size_t>(e)];

  std::vector<double> lambda(m, 0.0);
  std::vector<double> y(ne, 0.0);
  auto evaluate = [&] {
    double sumLambda = 0.0;
    for (double l : lambda) sumLambda += l;
    double quad = 0.0;
    for (std::size_t e = 0; e < ne; ++e) quad += y[e] * y[e] * inv[e];
    res.lowerBound = sumLambda - 0.25 * quad;
    double minLen = std::numeric_limits<double>::infinity();
    for (const Path& p : family) {
      double len = 0.0;
      for (EdgeId e : p.edges) len += 0.5 * y[static_cast<std::size_t>(e)] * inv[static_cast<std::size_t>(e)];
      minLen = std::min(minLen, len);
    }
    res.modulus = minLen > 0.0 ? 0.25 * quad / (minLen * minLen) : std::numeric_limits<double>::infinity();
  };

  for (res.sweeps = 0; res.sweeps < maxSweeps; ++res.sweeps) {
    for (std::size_t i = 0; i < m; ++i) {
      double q = 0.0;
      for (EdgeId e : family[i].edges) q += y[static_cast<std::size_t>(e)] * inv[static_cast<std::size_t>(e)];
      const double next = std::max(0.0, lambda[i] + (1.0 - 0.5 * q) / (0.5 * diag[i]));
      const double delta = next - lambda[i];
      if (delta == 0.0) continue;
      lambda[i] = next;
      for (EdgeId e : family[i].edges) y[static_cast<std::size_t>(e)] += delta;
    }
    if (res.sweeps % 16 == 15 || res.sweeps + 1 == maxSweeps) {
      evaluate();
      if (res.modulus - res.lowerBound <= relativeGap * res.modulus) {
        res.converged = true;
        ++res.sweeps;
        break;
      }
    }
  }
  evaluate();
  res.rho.resize(ne);
  double minLen = std::numeric_limits<double>::infinity();
  for (std::size_t e = 0; e < ne; ++e) res.rho[e] = 0.5 * y[e] * inv[e];
  for (const Path& p : family) minLen = std::min(minLen, rhoLength(res.rho, p));
  if (minLen > 0.0)
    for (double& r : res.rho) r /= minLen;
  res.multipliers = std::move(lambda);
  return res;
}

// Modulus of all simple A -> B paths by explicit enumeration and the QP above.
inline double bruteForceModulus(const PlaneNetwork& net, std::size_t maxPaths) {
  const auto family = enumerateSimplePaths(net, maxPaths);
  const auto res = qpModulus(net, family);
  if (!res.converged) throw SolverFailure("path-family QP did not reach its gap tolerance");
  return res.modulus;
}

}  // namespace modlab
