#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "modlab/error.hpp"
#include "modlab/format.hpp"
#include "modlab/ncms.hpp"
#include "modlab/plane_network.hpp"

namespace modlab {

struct Rectangle {
  EdgeId edge = 0;
  double x0 = 0.0;
  double y0 = 0.0;
  double width = 0.0;   // rho
  double height = 0.0;  // sigma * rho
  bool degenerate = false;

  double area() const { return width * height; }
  bool contains(double x, double y, double band) const {
    return x > x0 + band && x < x0 + width - band && y > y0 + band && y < y0 + height - band;
  }
  bool touches(double x, double y, double band) const {
    return x >= x0 - band && x <= x0 + width + band && y >= y0 - band && y <= y0 + height + band;
  }
};

// Horizontal strip of one decomposition path, bottom-up.
struct Strip {
  std::size_t path = 0;  // index into the decomposition's (top-first) path list
  double y0 = 0.0;
  double mass = 0.0;
};

struct RectangleTiling {
  std::vector<Rectangle> rects;  // indexed by edge id
  std::vector<Strip> strips;     // bottom-up
  double modulus = 0.0;          // bounding box is [0, 1] x [0, modulus]
};

struct CoverageReport {
  std::size_t samples = 0;
  std::size_t gaps = 0;
  std::size_t overlaps = 0;
  double areaSum = 0.0;
};

// Samples uniform points of [0, 1] x [0, M]; a point is a gap when no
// rectangle contains it (up to `band`) and an overlap when two contain it
// strictly inside.
inline CoverageReport checkCoverage(const RectangleTiling& tiling, std::size_t samples = 100000,
                                    std::uint64_t seed = 1, double band = 1e-9) {
  CoverageReport rep;
  rep.samples = samples;
  std::vector<const Rectangle*> live;
  for (const Rectangle& r : tiling.rects) {
    if (r.degenerate) continue;
    rep.areaSum += r.area();
    live.push_back(&r);
  }
  const double m = tiling.modulus;
  if (samples == 0 || !(m > 0.0)) return rep;

  constexpr std::size_t cells = 64;
  std::vector<std::vector<const Rectangle*>> grid(cells * cells);
  auto cellOf = [&](double v, double span) {
    return static_cast<std::size_t>(std::clamp(v / span * static_cast<double>(cells), 0.0, static_cast<double>(cells - 1)));
  };
  for (const Rectangle* r : live) {
    const std::size_t cx0 = cellOf(r->x0 - band, 1.0), cx1 = cellOf(r->x0 + r->width + band, 1.0);
    const std::size_t cy0 = cellOf(r->y0 - band, m), cy1 = cellOf(r->y0 + r->height + band, m);
    for (std::size_t cx = cx0; cx <= cx1; ++cx)
      for (std::size_t cy = cy0; cy <= cy1; ++cy) grid[cx * cells + cy].push_back(r);
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(0.0, 1.0);
  std::uniform_real_distribution<double> uy(0.0, m);
  for (std::size_t s = 0; s < samples; ++s) {
    const double x = ux(rng);
    const double y = uy(rng);
    int inside = 0;
    bool near = false;
    for (const Rectangle* r : grid[cellOf(x, 1.0) * cells + cellOf(y, m)]) {
      inside += r->contains(x, y, band) ? 1 : 0;
      near = near || r->touches(x, y, band);
    }
    if (!near) ++rep.gaps;
    if (inside > 1) ++rep.overlaps;
  }
  return rep;
}

struct TilingOptions {
  std::size_t samples = 100000;
  std::uint64_t seed = 1;
  double band = 1e-9;
  double areaTolerance = 1e-9;
  bool verify = true;
};

// Rectangle R_e = [h(e), h(e) + rho(e)] x [y(e), y(e) + sigma(e) rho(e)],
// where h(e) is the smaller endpoint potential and y(e) is the total mass of
// the paths strictly below the lowest path through e.
inline RectangleTiling buildTiling(const PlaneNetwork& net, const NcmsDecomposition& dec,
                                   const TilingOptions& options = {}) {
  const auto& h = dec.potentials;
  if (h.size() != net.vertexCount()) throw PreconditionError("decomposition does not match network");
  RectangleTiling t;
  t.modulus = dec.modulus;
  t.rects.resize(net.edgeCount());
  std::vector<char> placed(net.edgeCount(), 0);
  double below = 0.0;
  for (std::size_t k = dec.paths.size(); k-- > 0;) {
    t.strips.push_back({k, below, dec.masses[k]});
    for (EdgeId e : dec.paths[k].edges) {
      if (placed[static_cast<std::size_t>(e)]) continue;
      placed[static_cast<std::size_t>(e)] = 1;
      t.rects[static_cast<std::size_t>(e)].y0 = below;
    }
    below += dec.masses[k];
  }
  for (const Edge& e : net.edges()) {
    Rectangle& r = t.rects[static_cast<std::size_t>(e.id)];
    const double hu = h[static_cast<std::size_t>(e.u)];
    const double hv = h[static_cast<std::size_t>(e.v)];
    r.edge = e.id;
    r.x0 = std::min(hu, hv);
    r.width = std::abs(hv - hu);
    r.height = e.sigma * r.width;
    r.degenerate = !placed[static_cast<std::size_t>(e.id)] || r.height <= dec.threshold;
  }
  if (options.verify) {
    const auto rep = checkCoverage(t, options.samples, options.seed, options.band);
    if (std::abs(rep.areaSum - t.modulus) > options.areaTolerance)
      throw GeometryMismatch("rectangle areas sum to " + shortest(rep.areaSum) + ", expected " + shortest(t.modulus));
    if (rep.gaps || rep.overlaps)
      throw GeometryMismatch(std::to_string(rep.gaps) + " gap and " + std::to_string(rep.overlaps) +
                             " overlap samples in the tiling");
  }
  return t;
}

// Largest |y0(e) - M * h_dual(lower end of the paired dual edge)| over
// non-degenerate rectangles. `dualNet` must use the same edge ids.
inline double dualHeightResidual(const RectangleTiling& tiling, const PlaneNetwork& dualNet,
                                 const std::vector<double>& dualPotentials) {
  double worst = 0.0;
  for (const Rectangle& r : tiling.rects) {
    if (r.degenerate) continue;
    const Edge& d = dualNet.edge(r.edge);
    const double low = std::min(dualPotentials[static_cast<std::size_t>(d.u)], dualPotentials[static_cast<std::size_t>(d.v)]);
    worst = std::max(worst, std::abs(r.y0 - tiling.modulus * low));
  }
  return worst;
}

namespace detail {

inline std::vector<double> clusterValues(std::vector<double> xs, double tolerance) {
  std::sort(xs.begin(), xs.end());
  std::vector<double> out;
  for (double x : xs)
    if (out.empty() || x - out.back() > tolerance) out.push_back(x);
  return out;
}

}  // namespace detail

// Distinct x-coordinates of rectangle sides and distinct potentials of the
// vertices used by the decomposition, each clustered at `tolerance`.
inline std::pair<std::size_t, std::size_t> verticalSegmentCounts(const RectangleTiling& tiling,
                                                                 const NcmsDecomposition& dec,
                                                                 double tolerance = 1e-9) {
  std::vector<double> sides;
  for (const Rectangle& r : tiling.rects) {
    if (r.degenerate) continue;
    sides.push_back(r.x0);
    sides.push_back(r.x0 + r.width);
  }
  std::vector<double> levels;
  for (const Path& p : dec.paths)
    for (VertexId v : p.vertices) levels.push_back(dec.potentials[static_cast<std::size_t>(v)]);
  return {detail::clusterValues(sides, tolerance).size(), detail::clusterValues(levels, tolerance).size()};
}

// (h(v), mass of the paths before the first bottom-up path through v); empty
// for vertices on no path.
inline std::vector<std::optional<Point>> tilingCoordinates(const PlaneNetwork& net, const NcmsDecomposition& dec) {
  std::vector<std::optional<Point>> out(net.vertexCount());
  double below = 0.0;
  for (std::size_t k = dec.paths.size(); k-- > 0;) {
    for (VertexId v : dec.paths[k].vertices)
      if (!out[static_cast<std::size_t>(v)]) out[static_cast<std::size_t>(v)] = Point{dec.potentials[static_cast<std::size_t>(v)], below};
    below += dec.masses[k];
  }
  return out;
}

struct SvgOptions {
  double strokeWidth = 0.002;
  bool overlayPaths = false;
};

// Deterministic SVG of the non-degenerate rectangles; y grows upward.
inline std::string emitSvg(const RectangleTiling& tiling, const NcmsDecomposition* dec = nullptr,
                           const SvgOptions& options = {}) {
  static constexpr const char* palette[] = {"#4e79a7", "#f28e2b", "#e15759", "#76b7b2",
                                            "#59a14f", "#edc948", "#b07aa1", "#ff9da7"};
  const double m = tiling.modulus;
  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\"0 0 1 " << shortest(m)
      << "\" preserveAspectRatio=\"none\">\n"
      << "<g transform=\"matrix(1 0 0 -1 0 " << shortest(m) << ")\" stroke=\"#000000\" stroke-width=\""
      << shortest(options.strokeWidth) << "\">\n";
  for (const Rectangle& r : tiling.rects) {
    if (r.degenerate) continue;
    const auto hash = static_cast<std::uint32_t>(r.edge) * 2654435761u;
    svg << "<rect x=\"" << shortest(r.x0) << "\" y=\"" << shortest(r.y0) << "\" width=\"" << shortest(r.width)
        << "\" height=\"" << shortest(r.height) << "\" fill=\"" << palette[(hash >> 16) % 8] << "\" data-edge=\""
        << r.edge << "\"/>\n";
  }
  if (options.overlayPaths && dec) {
    for (const Strip& s : tiling.strips) {
      const double y = s.y0 + 0.5 * s.mass;
      svg << "<polyline fill=\"none\" stroke=\"#202020\" points=\"";
      const Path& p = dec->paths[s.path];
      for (std::size_t i = 0; i < p.vertices.size(); ++i)
        svg << (i ? " " : "") << shortest(dec->potentials[static_cast<std::size_t>(p.vertices[i])]) << ","
            << shortest(y);
      svg << "\"/>\n";
    }
  }
  svg << "</g>\n</svg>\n";
  return svg.str();
}

}  // namespace modlab
