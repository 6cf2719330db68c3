#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <set>

#include "fixtures.hpp"

using namespace modlab;

namespace {

std::vector<char> allNonZero(const OrientedNetwork& on) {
  std::vector<char> active(on.direction.size());
  for (std::size_t e = 0; e < active.size(); ++e) active[e] = on.direction[e] != 0;
  return active;
}

// Every active edge must be on the path or below it.
void expectUpperEnvelope(const PlaneNetwork& net, const Path& top, const std::vector<char>& active) {
  const auto side = classifyEdges(net, top);
  for (std::size_t e = 0; e < active.size(); ++e)
    if (active[e]) {
      EXPECT_TRUE(side[e] == Side::OnPath || side[e] == Side::Below) << "edge " << e << " above top path";
    }
}

}  // namespace

TEST(Orient, StraightGrid) {
  const auto net = dualPair(gridMap(2, 3)).primal;
  const auto on = orient(net, solveStandard(net).potentials);
  for (const Edge& e : net.edges()) {
    const bool horizontal = net.position(e.u).y == net.position(e.v).y;
    if (horizontal) {
      ASSERT_FALSE(on.isZero(e.id));
      EXPECT_LT(net.position(on.tail(e.id)).x, net.position(on.head(e.id)).x);
    } else {
      EXPECT_TRUE(on.isZero(e.id));
    }
  }
  EXPECT_EQ(on.zeroEdges().size(), static_cast<std::size_t>((2 * 3 + 1) * 3));  // every vertical edge
}

TEST(Orient, RotatedGrid) {
  const auto net = dualPair(rotatedGridMap(2, 3)).primal;
  const auto on = orient(net, solveStandard(net).potentials);
  EXPECT_TRUE(on.zeroEdges().empty());
  for (const Edge& e : net.edges()) {
    const Point t = net.position(on.tail(e.id)), h = net.position(on.head(e.id));
    EXPECT_LT(t.x + t.y, h.x + h.y);
  }
}

TEST(Orient, ConstantPotentialMakesEveryEdgeZero) {
  const auto net = fixtures::randomNetwork(5);
  const auto on = orient(net, std::vector<double>(net.vertexCount(), 0.25));
  EXPECT_EQ(on.zeroEdges().size(), net.edgeCount());
  EXPECT_THROW(orient(net, {0.0}), PreconditionError);
}

TEST(Orient, InvariantsOnRandomNetworks) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto net = fixtures::randomNetwork(seed);
    const auto h = solveStandard(net).potentials;
    const auto on = orient(net, h);
    for (const Edge& e : net.edges()) {
      if (on.isZero(e.id)) {
        EXPECT_LE(on.flow[static_cast<std::size_t>(e.id)], on.threshold);
        continue;
      }
      EXPECT_LT(h[static_cast<std::size_t>(on.tail(e.id))], h[static_cast<std::size_t>(on.head(e.id))]);
      EXPECT_FALSE(net.inA(on.head(e.id)));
      EXPECT_FALSE(net.inB(on.tail(e.id)));
    }
    EXPECT_LE(nodeBalanceResidual(on), 1e-12);
  }
}

TEST(TopPath, StraightGridTopRow) {
  const int L = 2, n = 3;
  const auto net = dualPair(gridMap(L, n)).primal;
  const auto on = orient(net, solveStandard(net).potentials);
  const auto active = allNonZero(on);
  const auto top = topPath(on, active);
  ASSERT_TRUE(top);
  const auto row = fixtures::gridRow(net, L, n, n);
  EXPECT_EQ(top->vertices, row.vertices);
  EXPECT_EQ(top->edges, row.edges);
  expectUpperEnvelope(net, *top, active);

  const auto bottom = bottomPath(on, active);
  ASSERT_TRUE(bottom);
  EXPECT_EQ(bottom->vertices, fixtures::gridRow(net, L, n, 0).vertices);
}

TEST(TopPath, RotatedGridHugsTheUpperSide) {
  const int L = 2, n = 3;
  const auto net = dualPair(rotatedGridMap(L, n)).primal;
  const auto on = orient(net, solveStandard(net).potentials);
  const auto active = allNonZero(on);
  const auto top = topPath(on, active);
  ASSERT_TRUE(top);
  ASSERT_EQ(top->edges.size(), static_cast<std::size_t>(2 * L * n));
  // Every vertex of the path lies on b - a = 2n or 2n - 1 (lattice units).
  for (VertexId v : top->vertices) {
    const Point p = net.position(v);
    const double d = (p.y - p.x) * n;
    EXPECT_TRUE(std::abs(d - 2 * n) < 1e-9 || std::abs(d - (2 * n - 1)) < 1e-9) << d;
  }
  expectUpperEnvelope(net, *top, active);
}

TEST(TopPath, EmptyActiveSet) {
  const auto net = dualPair(gridMap(1, 2)).primal;
  const auto on = orient(net, solveStandard(net).potentials);
  EXPECT_FALSE(topPath(on, std::vector<char>(net.edgeCount(), 0)));
  EXPECT_FALSE(bottomPath(on, std::vector<char>(net.edgeCount(), 0)));
}

TEST(TopPath, UpperEnvelopeOracleOnRandomNetworks) {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const auto net = fixtures::randomNetwork(seed);
    const auto on = orient(net, solveStandard(net).potentials);
    const auto active = allNonZero(on);
    const auto top = topPath(on, active);
    ASSERT_TRUE(top) << "seed " << seed;
    ASSERT_NO_THROW(requireSimplePath(net, *top));
    SCOPED_TRACE("seed " + std::to_string(seed));
    expectUpperEnvelope(net, *top, active);
    const auto bottom = bottomPath(on, active);
    ASSERT_TRUE(bottom);
    const auto side = classifyEdges(net, *bottom);
    for (std::size_t e = 0; e < active.size(); ++e)
      if (active[e]) {
        EXPECT_TRUE(side[e] == Side::OnPath || side[e] == Side::Above) << "edge " << e;
      }
  }
}

TEST(Decompose, SingleEdge) {
  const auto net = fixtures::singleEdge(3.0);
  const auto dec = decompose(net);
  ASSERT_EQ(dec.paths.size(), 1u);
  EXPECT_EQ(dec.masses[0], 3.0);
  EXPECT_EQ(dec.pmf[0], 1.0);
  EXPECT_EQ(dec.modulus, 3.0);
  EXPECT_EQ(flowDecomposition(net, dec), std::vector<double>{3.0});
}

TEST(Decompose, StraightGridRowsTopToBottom) {
  for (int L = 1; L <= 3; ++L)
    for (int n = 1; n <= 6; ++n) {
      const auto net = dualPair(gridMap(L, n)).primal;
      const auto dec = decompose(net);
      ASSERT_EQ(dec.paths.size(), static_cast<std::size_t>(n + 1));
      for (int k = 0; k <= n; ++k) {
        EXPECT_EQ(dec.paths[static_cast<std::size_t>(k)].vertices, fixtures::gridRow(net, L, n, n - k).vertices);
        EXPECT_NEAR(dec.pmf[static_cast<std::size_t>(k)], 1.0 / (n + 1), 1e-12);
      }
      EXPECT_NEAR(dec.modulus, (1.0 + 1.0 / n) / L, 1e-12);
      const auto flow = flowDecomposition(net, dec);
      for (const Edge& e : net.edges()) {
        const bool horizontal = net.position(e.u).y == net.position(e.v).y;
        const double sign = net.position(e.u).x < net.position(e.v).x ? 1.0 : -1.0;
        EXPECT_NEAR(sign * flow[static_cast<std::size_t>(e.id)], horizontal ? 1.0 / (L * n) : 0.0, 1e-12);
      }
    }
}

TEST(Decompose, RotatedGridZigZags) {
  for (int L = 1; L <= 3; ++L)
    for (int n = 1; n <= 5; ++n) {
      const auto net = dualPair(rotatedGridMap(L, n)).primal;
      const auto dec = decompose(net);
      ASSERT_EQ(dec.paths.size(), static_cast<std::size_t>(2 * n));
      for (std::size_t k = 0; k < dec.paths.size(); ++k) {
        EXPECT_NEAR(dec.pmf[k], 1.0 / (2 * n), 1e-12);
        // A zig-zag alternates between the two step directions.
        const Path& p = dec.paths[k];
        for (std::size_t i = 0; i + 2 < p.vertices.size(); ++i) {
          const Point a = net.position(p.vertices[i]), b = net.position(p.vertices[i + 1]),
                      c = net.position(p.vertices[i + 2]);
          EXPECT_FALSE(sameDirection(b, b + (b - a), c)) << "path " << k << " step " << i;
        }
      }
      for (std::size_t i = 0; i < dec.paths.size(); ++i)
        for (std::size_t j = i + 1; j < dec.paths.size(); ++j) EXPECT_FALSE(pathsCross(net, dec.paths[i], dec.paths[j]));
    }
}

TEST(Decompose, InvariantsOnRandomNetworks) {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    SCOPED_TRACE("seed " + std::to_string(seed));
    const auto net = fixtures::randomNetwork(seed);
    const auto sol = solveStandard(net);
    const auto rho = extremalDensity(net, sol.potentials);
    const auto dec = decompose(net, sol.potentials);
    ASSERT_FALSE(dec.paths.empty());
    EXPECT_LE(dec.paths.size(), net.edgeCount());
    EXPECT_NEAR(dec.modulus, sol.energy, 1e-9);
    EXPECT_NEAR(std::accumulate(dec.pmf.begin(), dec.pmf.end(), 0.0), 1.0, 1e-12);
    for (std::size_t k = 0; k < dec.paths.size(); ++k) {
      EXPECT_GT(dec.masses[k], 0.0);
      EXPECT_NO_THROW(requireSimplePath(net, dec.paths[k]));
      EXPECT_NEAR(rhoLength(rho, dec.paths[k]), 1.0, 1e-9);
    }
    for (std::size_t i = 0; i < dec.paths.size(); ++i)
      for (std::size_t j = i + 1; j < dec.paths.size(); ++j)
        EXPECT_FALSE(pathsCross(net, dec.paths[i], dec.paths[j])) << i << " x " << j;
    const auto report = verifyBeurling(net, dec.paths, rho, dec.masses);
    EXPECT_LE(*report.certificateResidual, 1e-9);
    const auto current = currentFlow(net, sol.potentials);
    const auto flow = flowDecomposition(net, dec);
    for (std::size_t e = 0; e < flow.size(); ++e) EXPECT_NEAR(flow[e], current.along[e], 1e-9);
    EXPECT_NEAR(expectedOverlap(net, dec.paths, dec.pmf), 1.0 / dec.modulus, 1e-8);
    EXPECT_LE(dec.prunedFlow, 1e-9 * dec.modulus);
  }
}

TEST(Decompose, ExtractionOrderIsTopFirst) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto net = fixtures::randomNetwork(seed);
    const auto dec = decompose(net);
    // Every later path lies below (or along) each earlier one.
    for (std::size_t i = 0; i < dec.paths.size(); ++i) {
      const auto side = classifyEdges(net, dec.paths[i]);
      for (std::size_t j = i + 1; j < dec.paths.size(); ++j)
        for (EdgeId e : dec.paths[j].edges) {
          const Side s = side[static_cast<std::size_t>(e)];
          EXPECT_TRUE(s == Side::OnPath || s == Side::Below) << "seed " << seed << " paths " << i << "," << j;
        }
    }
  }
}

TEST(Decompose, UniqueUnderRelabeling) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto net = fixtures::randomNetwork(seed);
    std::mt19937_64 rng(seed + 99);
    std::vector<VertexId> vperm(net.vertexCount());
    std::iota(vperm.begin(), vperm.end(), 0);
    std::shuffle(vperm.begin(), vperm.end(), rng);
    std::vector<EdgeId> eperm(net.edgeCount());
    std::iota(eperm.begin(), eperm.end(), 0);
    std::shuffle(eperm.begin(), eperm.end(), rng);
    auto vmap = [&](VertexId v) { return vperm[static_cast<std::size_t>(v)]; };

    std::vector<Vertex> vs(net.vertexCount());
    for (const Vertex& v : net.vertices()) vs[static_cast<std::size_t>(vmap(v.id))] = {vmap(v.id), v.position};
    std::vector<Edge> es(net.edgeCount());
    for (const Edge& e : net.edges())
      es[static_cast<std::size_t>(eperm[static_cast<std::size_t>(e.id)])] = {eperm[static_cast<std::size_t>(e.id)], vmap(e.u),
                                                                             vmap(e.v), e.sigma, e.bend};
    auto mapIds = [&](const std::vector<VertexId>& ids) {
      std::vector<VertexId> out;
      std::transform(ids.begin(), ids.end(), std::back_inserter(out), vmap);
      return out;
    };
    const PlaneNetwork relabeled(vs, es, mapIds(net.boundaryA()), mapIds(net.boundaryB()), mapIds(net.outerBoundary()));

    const auto a = decompose(net);
    const auto b = decompose(relabeled);
    ASSERT_EQ(a.paths.size(), b.paths.size()) << "seed " << seed;
    for (std::size_t k = 0; k < a.paths.size(); ++k) {
      std::vector<EdgeId> mapped;
      for (EdgeId e : a.paths[k].edges) mapped.push_back(eperm[static_cast<std::size_t>(e)]);
      EXPECT_EQ(mapped, b.paths[k].edges) << "seed " << seed << " path " << k;
      EXPECT_NEAR(a.masses[k], b.masses[k], 1e-9);
    }
  }
}

TEST(Decompose, RemovingAnyPathLowersTheModulus) {
  std::vector<PlaneNetwork> nets{dualPair(gridMap(1, 2)).primal, dualPair(rotatedGridMap(1, 2)).primal,
                                 fixtures::withRandomSigma(dualPair(gridMap(1, 2)).primal, 11)};
  for (std::uint64_t seed = 0; seed < 8; ++seed) nets.push_back(fixtures::randomNetwork(seed));
  for (const PlaneNetwork& net : nets) {
    const auto dec = decompose(net);
    if (dec.paths.size() < 2) continue;
    for (std::size_t drop = 0; drop < dec.paths.size(); ++drop) {
      PathFamily rest;
      for (std::size_t k = 0; k < dec.paths.size(); ++k)
        if (k != drop) rest.push_back(dec.paths[k]);
      const auto qp = qpModulus(net, rest);
      ASSERT_TRUE(qp.converged);
      EXPECT_LT(qp.modulus, dec.modulus * (1.0 - 1e-9)) << "dropping path " << drop;
    }
    const auto whole = qpModulus(net, dec.paths);
    EXPECT_NEAR(whole.modulus, dec.modulus, 1e-7 * dec.modulus);
  }
}

TEST(Decompose, TerminatesWithinEdgeCount) {
  const auto net = dualPair(fixtures::meshMap("cross_4")).primal;
  const auto dec = decompose(net);
  EXPECT_LE(dec.paths.size(), net.edgeCount());
  EXPECT_NEAR(dec.modulus, modulusFromEnergy(net), 1e-9);
}

TEST(Decompose, JsonShape) {
  const auto net = dualPair(gridMap(1, 1)).primal;
  const auto j = toJson(decompose(net));
  EXPECT_DOUBLE_EQ(j.at("modulus").get<double>(), 2.0);
  ASSERT_EQ(j.at("paths").size(), 2u);
  for (const auto& p : j.at("paths")) {
    EXPECT_EQ(p.at("vertices").size(), 2u);
    EXPECT_DOUBLE_EQ(p.at("pmf").get<double>(), 0.5);
    EXPECT_DOUBLE_EQ(p.at("mass").get<double>(), 1.0);
  }
}
