#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include "modlab/error.hpp"
#include "modlab/plane_network.hpp"

namespace modlab {

enum class LinearSolver { Cholesky, ConjugateGradient };

struct SolverOptions {
  LinearSolver method = LinearSolver::Cholesky;
  double cgTolerance = 1e-12;
  int cgMaxIterations = 20000;
  // Absolute harmonicity tolerance, scaled by the vertex's total conductance.
  double residualTolerance = 1e-9;
};

struct HarmonicSolution {
  std::vector<double> potentials;
  double energy = 0.0;
  std::map<VertexId, double> clamped;
  double maxResidual = 0.0;
};

// Sum over edges of sigma * (h(v) - h(u))^2.
inline double energy(const PlaneNetwork& net, const std::vector<double>& h) {
  double total = 0.0;
  for (const Edge& e : net.edges()) {
    const double d = h[static_cast<std::size_t>(e.v)] - h[static_cast<std::size_t>(e.u)];
    total += e.sigma * d * d;
  }
  return total;
}

// Weighted average defect at v: h(v) * sum sigma - sum sigma * h(w).
inline double harmonicDefect(const PlaneNetwork& net, const std::vector<double>& h, VertexId v) {
  double defect = 0.0;
  for (EdgeId e : net.rotation(v))
    defect += net.sigma(e) * (h[static_cast<std::size_t>(v)] - h[static_cast<std::size_t>(net.opposite(e, v))]);
  return defect;
}

namespace detail {

inline void requireClampedComponents(const PlaneNetwork& net, const std::vector<char>& isClamped) {
  const std::size_t n = net.vertexCount();
  std::vector<int> comp(n, -1);
  int next = 0;
  for (std::size_t s = 0; s < n; ++s) {
    if (comp[s] >= 0) continue;
    std::vector<VertexId> stack{static_cast<VertexId>(s)};
    comp[s] = next;
    bool anchored = false;
    while (!stack.empty()) {
      const VertexId v = stack.back();
      stack.pop_back();
      anchored = anchored || isClamped[static_cast<std::size_t>(v)];
      for (EdgeId e : net.rotation(v)) {
        const VertexId w = net.opposite(e, v);
        if (comp[static_cast<std::size_t>(w)] < 0) {
          comp[static_cast<std::size_t>(w)] = next;
          stack.push_back(w);
        }
      }
    }
    if (!anchored)
      throw Disconnected("vertex " + std::to_string(s) + " lies in a component without clamped vertices");
    ++next;
  }
}

}  // namespace detail

// Solves the Dirichlet problem: h equals `clampedValues` on their keys and is
// discrete harmonic everywhere else.
inline HarmonicSolution solveDirichlet(const PlaneNetwork& net, const std::map<VertexId, double>& clampedValues,
                                       const SolverOptions& options = {}) {
  const std::size_t n = net.vertexCount();
  if (clampedValues.empty()) throw PreconditionError("no clamped vertices");
  std::vector<char> isClamped(n, 0);
  std::vector<double> h(n, 0.0);
  for (auto [v, value] : clampedValues) {
    if (v < 0 || static_cast<std::size_t>(v) >= n) throw PreconditionError("clamped vertex out of range");
    if (!std::isfinite(value)) throw PreconditionError("clamped value is not finite");
    isClamped[static_cast<std::size_t>(v)] = 1;
    h[static_cast<std::size_t>(v)] = value;
  }
  for (const Edge& e : net.edges())
    if (!(e.sigma > 0.0)) throw PreconditionError("edge " + std::to_string(e.id) + " has nonpositive weight");
  detail::requireClampedComponents(net, isClamped);

  std::vector<int> unknown(n, -1);
  int m = 0;
  for (std::size_t v = 0; v < n; ++v)
    if (!isClamped[v]) unknown[v] = m++;

  if (m > 0) {
    using SpMat = Eigen::SparseMatrix<double>;
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(n + 4 * net.edgeCount());
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
    for (const Edge& e : net.edges()) {
      if (e.u == e.v) continue;
      const int iu = unknown[static_cast<std::size_t>(e.u)];
      const int iv = unknown[static_cast<std::size_t>(e.v)];
      if (iu >= 0) triplets.emplace_back(iu, iu, e.sigma);
      if (iv >= 0) triplets.emplace_back(iv, iv, e.sigma);
      if (iu >= 0 && iv >= 0) {
        triplets.emplace_back(iu, iv, -e.sigma);
        triplets.emplace_back(iv, iu, -e.sigma);
      } else if (iu >= 0) {
        rhs[iu] += e.sigma * h[static_cast<std::size_t>(e.v)];
      } else if (iv >= 0) {
        rhs[iv] += e.sigma * h[static_cast<std::size_t>(e.u)];
      }
    }
    SpMat lap(m, m);
    lap.setFromTriplets(triplets.begin(), triplets.end());

    Eigen::VectorXd x;
    if (options.method == LinearSolver::Cholesky) {
      Eigen::SimplicialLDLT<SpMat> ldlt(lap);
      if (ldlt.info() != Eigen::Success) throw SolverFailure("sparse factorization failed");
      x = ldlt.solve(rhs);
      // One step of iterative refinement.
      const Eigen::VectorXd r = rhs - lap * x;
      x += ldlt.solve(r);
    } else {
      Eigen::ConjugateGradient<SpMat, Eigen::Lower | Eigen::Upper, Eigen::IncompleteCholesky<double>> cg;
      cg.setTolerance(options.cgTolerance);
      cg.setMaxIterations(options.cgMaxIterations);
      cg.compute(lap);
      if (cg.info() != Eigen::Success) throw SolverFailure("preconditioner setup failed");
      x = cg.solve(rhs);
      if (cg.info() != Eigen::Success)
        throw SolverFailure("conjugate gradient stopped after " + std::to_string(cg.iterations()) +
                            " iterations with error " + std::to_string(cg.error()));
    }
    for (std::size_t v = 0; v < n; ++v)
      if (unknown[v] >= 0) h[v] = x[unknown[v]];
  }

  HarmonicSolution out;
  out.clamped = clampedValues;
  for (std::size_t v = 0; v < n; ++v) {
    if (isClamped[v]) continue;
    double total = 0.0;
    for (EdgeId e : net.rotation(static_cast<VertexId>(v))) total += net.sigma(e);
    const double defect = std::abs(harmonicDefect(net, h, static_cast<VertexId>(v)));
    const double scaled = total > 0.0 ? defect / total : defect;
    out.maxResidual = std::max(out.maxResidual, scaled);
    if (scaled > options.residualTolerance)
      throw SolverFailure("harmonicity residual " + std::to_string(scaled) + " at vertex " + std::to_string(v));
  }
  out.energy = energy(net, h);
  out.potentials = std::move(h);
  return out;
}

// The standard problem: h = 0 on A and h = 1 on B.
inline HarmonicSolution solveStandard(const PlaneNetwork& net, const SolverOptions& options = {}) {
  std::map<VertexId, double> clamp;
  for (VertexId v : net.boundaryA()) clamp[v] = 0.0;
  for (VertexId v : net.boundaryB()) clamp[v] = 1.0;
  return solveDirichlet(net, clamp, options);
}

// Per-edge |h(v) - h(u)|.
inline std::vector<double> extremalDensity(const PlaneNetwork& net, const std::vector<double>& h) {
  std::vector<double> rho(net.edgeCount());
  for (const Edge& e : net.edges())
    rho[static_cast<std::size_t>(e.id)] = std::abs(h[static_cast<std::size_t>(e.v)] - h[static_cast<std::size_t>(e.u)]);
  return rho;
}

// Ohm's-law flow. `along[e]` is the flow from u to v; reversing negates it.
struct CurrentFlow {
  std::vector<double> along;
  double strength = 0.0;
  double nodeResidual = 0.0;

  double at(DirectedEdge d) const {
    const double f = along[static_cast<std::size_t>(d.edge)];
    return d.forward ? f : -f;
  }
};

// Net outflow at v for an edge flow given in u -> v convention.
inline double netOutflow(const PlaneNetwork& net, const std::vector<double>& along, VertexId v) {
  double out = 0.0;
  for (EdgeId e : net.rotation(v)) {
    const Edge& ed = net.edge(e);
    out += ed.u == v ? along[static_cast<std::size_t>(e)] : -along[static_cast<std::size_t>(e)];
  }
  return out;
}

inline CurrentFlow currentFlow(const PlaneNetwork& net, const std::vector<double>& h) {
  CurrentFlow f;
  f.along.resize(net.edgeCount());
  for (const Edge& e : net.edges())
    f.along[static_cast<std::size_t>(e.id)] = e.sigma * (h[static_cast<std::size_t>(e.v)] - h[static_cast<std::size_t>(e.u)]);
  for (VertexId a : net.boundaryA()) f.strength += netOutflow(net, f.along, a);
  for (std::size_t v = 0; v < net.vertexCount(); ++v) {
    const auto vid = static_cast<VertexId>(v);
    if (net.inA(vid) || net.inB(vid)) continue;
    f.nodeResidual = std::max(f.nodeResidual, std::abs(netOutflow(net, f.along, vid)));
  }
  return f;
}

}  // namespace modlab
