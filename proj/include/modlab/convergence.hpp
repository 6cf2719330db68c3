#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "modlab/dirichlet.hpp"
#include "modlab/error.hpp"
#include "modlab/format.hpp"
#include "modlab/ncms.hpp"
#include "modlab/orthodiagonal.hpp"

namespace modlab {

inline constexpr double kUnknown = std::numeric_limits<double>::quiet_NaN();

struct ConvergenceRow {
  double parameter = 0.0;  // n for grids, mesh size for meshes
  double modulusPrimal = 0.0;
  double modulusDual = 0.0;
  double fulkersonProduct = 0.0;
  double harmonicMaxError = kUnknown;
  double pmfDistance = kUnknown;
  double runtimeMs = 0.0;
  // Largest distance from a path vertex to the straight line at the path's
  // reference height (rotated grids only).
  double pathLineDistance = kUnknown;
  std::size_t pathCount = 0;
};

// Reference height in [0, 1] of a path.
using HeightFunction = std::function<double(const Path&)>;

// Kolmogorov distance between the step CDF of the path masses placed at
// their reference heights and the uniform CDF on [0, 1].
inline double pmfTransverseDistance(const NcmsDecomposition& dec, const HeightFunction& height) {
  if (!height) throw NoReference("no reference heights for this domain");
  std::vector<std::pair<double, double>> atoms;
  for (std::size_t k = 0; k < dec.paths.size(); ++k)
    atoms.emplace_back(std::clamp(height(dec.paths[k]), 0.0, 1.0), dec.pmf[k]);
  std::sort(atoms.begin(), atoms.end());
  double cdf = 0.0;
  double worst = 0.0;
  for (std::size_t i = 0; i < atoms.size();) {
    const double s = atoms[i].first;
    worst = std::max(worst, std::abs(cdf - s));  // left limit
    for (; i < atoms.size() && atoms[i].first == s; ++i) cdf += atoms[i].second;
    worst = std::max(worst, std::abs(cdf - s));
  }
  return std::max(worst, std::abs(cdf - 1.0));
}

// Mean of a vertex function over the path's vertices.
inline double pathMean(const PlaneNetwork& net, const Path& p, const std::function<double(Point)>& f) {
  double sum = 0.0;
  for (VertexId v : p.vertices) sum += f(net.position(v));
  return sum / static_cast<double>(p.vertices.size());
}

namespace detail {

template <class Body>
double timed(Body&& body) {
  const auto t0 = std::chrono::steady_clock::now();
  body();
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

inline double maxError(const PlaneNetwork& net, const std::vector<double>& h, const std::function<double(Point)>& exact) {
  double worst = 0.0;
  for (const Vertex& v : net.vertices())
    worst = std::max(worst, std::abs(h[static_cast<std::size_t>(v.id)] - exact(v.position)));
  return worst;
}

}  // namespace detail

// Straight grids on [0, L] x [0, 1]. Exact modulus (1 + 1/n)/L; the
// continuous potential x/L is discretely harmonic.
inline std::vector<ConvergenceRow> rectangleStudy(int L, const std::vector<int>& nList) {
  std::vector<ConvergenceRow> rows;
  for (int n : nList) {
    ConvergenceRow row;
    row.parameter = n;
    row.runtimeMs = detail::timed([&] {
      const auto pair = dualPair(gridMap(L, n));
      const auto primal = solveStandard(pair.primal);
      row.modulusPrimal = primal.energy;
      row.modulusDual = solveStandard(pair.dual).energy;
      row.fulkersonProduct = row.modulusPrimal * row.modulusDual;
      row.harmonicMaxError = detail::maxError(pair.primal, primal.potentials, [&](Point p) { return p.x / L; });
      const auto dec = decompose(pair.primal, primal.potentials);
      row.pathCount = dec.paths.size();
      row.pmfDistance = pmfTransverseDistance(
          dec, [&](const Path& p) { return pathMean(pair.primal, p, [](Point q) { return q.y; }); });
    });
    rows.push_back(row);
  }
  return rows;
}

// Rotated grids 0 <= x + y <= 2L, 0 <= y - x <= 2. Exact modulus 1/L; the
// continuous potential (x + y)/(2L) is discretely harmonic; the limiting
// paths are the lines y - x = const.
inline std::vector<ConvergenceRow> rotatedStudy(int L, const std::vector<int>& nList) {
  std::vector<ConvergenceRow> rows;
  for (int n : nList) {
    ConvergenceRow row;
    row.parameter = n;
    row.runtimeMs = detail::timed([&] {
      const auto pair = dualPair(rotatedGridMap(L, n));
      const auto primal = solveStandard(pair.primal);
      row.modulusPrimal = primal.energy;
      row.modulusDual = solveStandard(pair.dual).energy;
      row.fulkersonProduct = row.modulusPrimal * row.modulusDual;
      row.harmonicMaxError =
          detail::maxError(pair.primal, primal.potentials, [&](Point p) { return (p.x + p.y) / (2.0 * L); });
      const auto dec = decompose(pair.primal, primal.potentials);
      row.pathCount = dec.paths.size();
      auto height = [&](const Path& p) { return pathMean(pair.primal, p, [](Point q) { return 0.5 * (q.y - q.x); }); };
      row.pmfDistance = pmfTransverseDistance(dec, height);
      double worst = 0.0;
      for (const Path& p : dec.paths) {
        const double s = height(p);
        for (VertexId v : p.vertices) {
          const Point q = pair.primal.position(v);
          worst = std::max(worst, std::abs((q.y - q.x) - 2.0 * s) / std::sqrt(2.0));
        }
      }
      row.pathLineDistance = worst;
    });
    rows.push_back(row);
  }
  return rows;
}

struct MeshInput {
  double parameter = 0.0;
  std::string nodePath;
  std::string elePath;
};

// Ingested meshes of one domain at decreasing mesh size. `exact`, when
// given, is the continuous potential used for harmonicMaxError.
inline std::vector<ConvergenceRow> meshStudy(const std::vector<MeshInput>& meshes,
                                             const std::function<double(Point)>& exact = {}) {
  std::vector<ConvergenceRow> rows;
  for (const MeshInput& mesh : meshes) {
    ConvergenceRow row;
    row.parameter = mesh.parameter;
    row.runtimeMs = detail::timed([&] {
      const auto pair = dualPair(ingestTriangulation(mesh.nodePath, mesh.elePath));
      const auto primal = solveStandard(pair.primal);
      row.modulusPrimal = primal.energy;
      row.modulusDual = solveStandard(pair.dual).energy;
      row.fulkersonProduct = row.modulusPrimal * row.modulusDual;
      if (exact) row.harmonicMaxError = detail::maxError(pair.primal, primal.potentials, exact);
    });
    rows.push_back(row);
  }
  return rows;
}

inline std::string csvHeader() {
  return "parameter,modulusPrimal,modulusDual,fulkersonProduct,harmonicMaxError,pmfDistance,runtimeMs\n";
}

// Fixed column order, 12 significant digits; unknown values are empty.
// Runtimes are written only when `withTiming` is set so the default table is
// reproducible byte for byte.
inline std::string toCsv(const std::vector<ConvergenceRow>& rows, bool withTiming = false) {
  auto cell = [](double v) { return std::isnan(v) ? std::string() : significant(v, 12); };
  std::ostringstream out;
  out << csvHeader();
  for (const ConvergenceRow& r : rows)
    out << cell(r.parameter) << ',' << cell(r.modulusPrimal) << ',' << cell(r.modulusDual) << ','
        << cell(r.fulkersonProduct) << ',' << cell(r.harmonicMaxError) << ',' << cell(r.pmfDistance) << ','
        << (withTiming ? cell(r.runtimeMs) : std::string()) << '\n';
  return out.str();
}

}  // namespace modlab
