// modlab: command-line driver for the modulus / decomposition / tiling toolkit.
//
// Exit codes: 0 success, 1 domain error (invariant violated, bad input data),
// 2 usage error.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "modlab/modlab.hpp"

namespace {

using namespace modlab;

struct Settings {
  double tolerance = 1e-9;
  std::uint64_t seed = 1;
  bool timing = false;
  bool validateOnly = false;
};

// Thrown when a check fails; message names the violated invariant.
struct CheckFailed : Error {
  using Error::Error;
};

// A network loaded from either a map file (quads present) or a network file.
struct Loaded {
  std::optional<OrthodiagonalMap> map;
  std::optional<DualPair> pair;
  PlaneNetwork net;
};

Loaded load(const std::string& path, bool dual) {
  const Json j = readJsonFile(path);
  Loaded out;
  if (j.contains("quads")) {
    out.map = mapFromJson(j);
    out.pair = dualPair(*out.map);
    out.net = dual ? out.pair->dual : out.pair->primal;
  } else {
    if (dual) throw PreconditionError("--dual needs a map file, not a bare network");
    out.net = networkFromJson(j);
  }
  return out;
}

void requireValid(const Loaded& in) {
  std::vector<Violation> all;
  if (in.map)
    for (auto& v : validateMap(*in.map)) all.push_back(v);
  for (auto& v : validate(in.net)) all.push_back(v);
  if (all.empty()) return;
  std::ostringstream msg;
  msg << "invalid input: " << all.front().invariant << " (" << all.front().element << ")";
  if (all.size() > 1) msg << " and " << all.size() - 1 << " more";
  throw CheckFailed(msg.str());
}

void expectWithin(const std::string& what, double value, double target, double tol) {
  if (!(std::abs(value - target) <= tol))
    throw CheckFailed(what + " is " + shortest(value) + ", expected " + shortest(target) + " within " + shortest(tol));
}

void write(const std::string& path, const std::string& text) {
  if (path.empty()) return;
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  writeTextFile(path, text);
}

std::vector<int> parseIntList(const std::string& text) {
  std::vector<int> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size() || v < 1) throw CLI::ValidationError("--n", "expected positive integers, got '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw CLI::ValidationError("--n", "empty list");
  return out;
}

Json potentialsJson(const PlaneNetwork& net, const HarmonicSolution& sol) {
  Json j;
  j["energy"] = sol.energy;
  j["modulus"] = sol.energy;
  j["potentials"] = sol.potentials;
  j["rho"] = extremalDensity(net, sol.potentials);
  j["max_residual"] = sol.maxResidual;
  return j;
}

// ---- subcommand bodies ----

void runGenerate(const Settings& s, bool rotated, int L, int n, const std::string& out) {
  const auto map = rotated ? rotatedGridMap(L, n) : gridMap(L, n);
  const auto violations = validateMap(map);
  if (!violations.empty()) throw CheckFailed("generated map: " + violations.front().invariant);
  const auto pair = dualPair(map);
  if (!validate(pair.primal).empty() || !validate(pair.dual).empty()) throw CheckFailed("generated networks invalid");
  std::cout << "quads " << map.quads.size() << "\n";
  if (s.validateOnly) {
    std::cout << "valid\n";
    return;
  }
  const std::string text = dumpJson(toJson(map));
  if (out.empty()) std::cout << text;
  write(out, text);
}

void runIngest(const Settings& s, const std::string& node, const std::string& ele, const std::string& out,
               std::optional<double> eps, const std::string& networkOut) {
  const auto map = ingestTriangulation(node, ele);
  const auto violations = validateMap(map);
  if (!violations.empty()) throw CheckFailed("ingested map: " + violations.front().invariant + " (" + violations.front().element + ")");
  const auto pair = dualPair(map);
  for (const auto* net : {&pair.primal, &pair.dual}) {
    const auto v = validate(*net);
    if (!v.empty()) throw CheckFailed("ingested network: " + v.front().invariant + " (" + v.front().element + ")");
  }
  std::cout << "quads " << map.quads.size() << "\n";
  std::optional<PlaneNetwork> withBoundary;
  if (eps) withBoundary = assignBoundaryConductance(map, *eps);
  if (s.validateOnly) {
    std::cout << "valid\n";
    return;
  }
  write(out, dumpJson(toJson(map)));
  if (withBoundary) write(networkOut, dumpJson(toJson(*withBoundary)));
}

void runSolve(const Settings& s, const std::string& input, bool dual, bool cg, const std::string& out) {
  const auto in = load(input, dual);
  requireValid(in);
  SolverOptions opts;
  if (cg) opts.method = LinearSolver::ConjugateGradient;
  const auto sol = solveStandard(in.net, opts);
  std::cout << "modulus " << significant(sol.energy) << "\n";
  if (s.validateOnly) {
    const auto flow = currentFlow(in.net, sol.potentials);
    expectWithin("node residual", flow.nodeResidual, 0.0, s.tolerance);
    expectWithin("flow strength", flow.strength, sol.energy, s.tolerance);
    std::cout << "valid\n";
    return;
  }
  write(out, dumpJson(potentialsJson(in.net, sol)));
}

// Decomposition invariants: non-crossing, unit rho-lengths, certificate,
// modulus, flow decomposition, optimal overlap.
void checkDecomposition(const PlaneNetwork& net, const HarmonicSolution& sol, const NcmsDecomposition& dec, double tol) {
  const auto rho = extremalDensity(net, sol.potentials);
  const auto report = verifyBeurling(net, dec.paths, rho, dec.masses, tol);
  expectWithin("max |rho-length - 1|", report.maxLengthDeviation, 0.0, tol);
  expectWithin("path-mass certificate residual", *report.certificateResidual, 0.0, tol);
  expectWithin("decomposition modulus", dec.modulus, sol.energy, tol);
  const auto flow = flowDecomposition(net, dec);
  const auto current = currentFlow(net, sol.potentials);
  double worst = 0.0;
  for (std::size_t e = 0; e < flow.size(); ++e) worst = std::max(worst, std::abs(flow[e] - current.along[e]));
  expectWithin("flow decomposition residual", worst, 0.0, tol);
  if (dec.modulus > 0.0) expectWithin("overlap times modulus", expectedOverlap(net, dec.paths, dec.pmf) * dec.modulus, 1.0, 1e3 * tol);
  for (std::size_t i = 0; i < dec.paths.size(); ++i)
    for (std::size_t j = i + 1; j < dec.paths.size(); ++j)
      if (pathsCross(net, dec.paths[i], dec.paths[j]))
        throw CheckFailed("paths " + std::to_string(i) + " and " + std::to_string(j) + " cross");
}

void runDecompose(const Settings& s, const std::string& input, bool dual, const std::string& out) {
  const auto in = load(input, dual);
  requireValid(in);
  const auto sol = solveStandard(in.net);
  const auto dec = decompose(in.net, sol.potentials);
  std::cout << "modulus " << significant(dec.modulus) << "\n"
            << "paths " << dec.paths.size() << "\n";
  if (s.validateOnly) {
    checkDecomposition(in.net, sol, dec, s.tolerance);
    std::cout << "valid\n";
    return;
  }
  const std::string text = dumpJson(toJson(dec));
  if (out.empty()) std::cout << text;
  write(out, text);
}

void runTile(const Settings& s, const std::string& input, bool dual, const std::string& svg, bool overlay,
             std::size_t samples) {
  const auto in = load(input, dual);
  requireValid(in);
  const auto dec = decompose(in.net);
  TilingOptions opts;
  opts.samples = samples;
  opts.seed = s.seed;
  opts.band = s.tolerance;
  opts.areaTolerance = s.tolerance;
  const auto tiling = buildTiling(in.net, dec, opts);
  double area = 0.0;
  std::size_t count = 0;
  for (const Rectangle& r : tiling.rects)
    if (!r.degenerate) {
      area += r.area();
      ++count;
    }
  std::cout << "modulus " << significant(dec.modulus) << "\n"
            << "rectangles " << count << "\n"
            << "area_sum " << significant(area) << "\n";
  if (in.pair && !dual) {
    const double residual = dualHeightResidual(tiling, in.pair->dual, solveStandard(in.pair->dual).potentials);
    std::cout << "dual_height_residual " << significant(residual, 3) << "\n";
    if (s.validateOnly) expectWithin("dual height residual", residual, 0.0, std::max(s.tolerance, 1e-8));
  }
  if (s.validateOnly) {
    const auto [sides, levels] = verticalSegmentCounts(tiling, dec, s.tolerance);
    if (sides != levels)
      throw CheckFailed("vertical segments " + std::to_string(sides) + " vs vertex levels " + std::to_string(levels));
    std::cout << "valid\n";
    return;
  }
  SvgOptions svgOpts;
  svgOpts.overlayPaths = overlay;
  write(svg, emitSvg(tiling, &dec, svgOpts));
}

void reportRows(const Settings& s, const std::vector<ConvergenceRow>& rows, const std::string& csv) {
  for (const auto& r : rows)
    if (!(std::abs(r.fulkersonProduct - 1.0) <= 1e-6))
      throw CheckFailed("Fulkerson product " + shortest(r.fulkersonProduct) + " at parameter " + shortest(r.parameter));
  const std::string text = toCsv(rows, s.timing);
  if (s.validateOnly) {
    std::cout << "rows " << rows.size() << "\nvalid\n";
    return;
  }
  if (csv.empty()) std::cout << text;
  write(csv, text);
}

void runConverge(const Settings& s, const std::string& kind, int L, const std::string& nList,
                 const std::vector<std::string>& meshes, const std::vector<double>& params, bool exactX,
                 const std::string& csv) {
  if (kind == "rect") return reportRows(s, rectangleStudy(L, parseIntList(nList)), csv);
  if (kind == "rotated") return reportRows(s, rotatedStudy(L, parseIntList(nList)), csv);
  if (!params.empty() && params.size() != meshes.size())
    throw CLI::ValidationError("--param", "needs one value per mesh");
  std::vector<MeshInput> inputs;
  for (std::size_t i = 0; i < meshes.size(); ++i)
    inputs.push_back({params.empty() ? static_cast<double>(i) : params[i], meshes[i] + ".node", meshes[i] + ".ele"});
  std::function<double(Point)> exact;
  if (exactX) exact = [](Point p) { return p.x; };
  const auto rows = meshStudy(inputs, exact);
  for (std::size_t i = 2; i < rows.size(); ++i) {
    const double prev = std::abs(rows[i - 1].modulusPrimal - rows[i - 2].modulusPrimal);
    const double cur = std::abs(rows[i].modulusPrimal - rows[i - 1].modulusPrimal);
    if (cur >= prev) std::cerr << "warning: modulus differences not shrinking at row " << i << "\n";
  }
  reportRows(s, rows, csv);
}

void runCheck(const Settings& s, const std::string& input) {
  const auto in = load(input, false);
  requireValid(in);
  auto one = [&](const char* label, const PlaneNetwork& net) {
    const auto sol = solveStandard(net);
    const auto dec = decompose(net, sol.potentials);
    checkDecomposition(net, sol, dec, s.tolerance);
    std::cout << label << " modulus " << significant(sol.energy) << " paths " << dec.paths.size() << " ok\n";
    return dec;
  };
  const auto primal = one("primal", in.net);
  if (in.pair) {
    const auto dual = one("dual", in.pair->dual);
    const auto f = fulkersonCheck(*in.pair);
    expectWithin("Fulkerson product", f.product, 1.0, std::max(s.tolerance, 1e-8));
    std::cout << "fulkerson_product " << significant(f.product) << " ok\n";
    for (std::size_t i = 0; i < primal.paths.size(); ++i)
      for (std::size_t j = 0; j < dual.paths.size(); ++j)
        if (dualCrossingCount(*in.pair, primal.paths[i], dual.paths[j]) != 1)
          throw CheckFailed("primal path " + std::to_string(i) + " and dual path " + std::to_string(j) +
                            " do not cross exactly once");
    std::cout << "dual_crossings ok\n";
  }
  std::cout << "valid\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"modlab: discrete modulus, non-crossing path decompositions and rectangle tilings"};
  app.require_subcommand(1);
  Settings settings;
  if (const char* env = std::getenv("MODLAB_TOL")) {
    try {
      settings.tolerance = std::stod(env);
    } catch (const std::exception&) {
      std::cerr << "error: MODLAB_TOL is not a number\n";
      return 2;
    }
  }
  app.add_option("--tol", settings.tolerance, "Tolerance for invariant checks (default 1e-9, env MODLAB_TOL)")
      ->check(CLI::PositiveNumber);
  app.add_option("--seed", settings.seed, "Seed for Monte-Carlo coverage sampling");
  app.add_flag("--timing", settings.timing, "Fill the runtime column of convergence tables");
  app.add_flag("--validate-only", settings.validateOnly, "Run invariant checks only; write no artifacts");

  int L = 1, n = 1;
  std::string out, input, svg, csv, nList = "1,2,4,8", node, ele, networkOut;
  bool dual = false, cg = false, overlay = false, exactX = false;
  std::optional<double> eps;
  std::size_t samples = 100000;
  std::vector<std::string> meshes;
  std::vector<double> params;

  auto* generate = app.add_subcommand("generate", "Write an orthodiagonal grid map as JSON");
  generate->require_subcommand(1);
  for (const char* kind : {"grid", "rotated"}) {
    auto* sub = generate->add_subcommand(kind, std::string(kind) == "grid" ? "Square grid on [0,L]x[0,1]"
                                                                            : "Square grid on a 45-degree rotated L x 1 rectangle");
    sub->add_option("--L", L, "Aspect ratio")->check(CLI::PositiveNumber);
    sub->add_option("--n", n, "Lattice refinement")->check(CLI::PositiveNumber);
    sub->add_option("--out,-o", out, "Output file (stdout when omitted)");
  }

  auto* ingest = app.add_subcommand("ingest", "Build an orthodiagonal map from a Triangle .node/.ele pair");
  ingest->add_option("node", node, ".node file")->required();
  ingest->add_option("ele", ele, ".ele file")->required();
  ingest->add_option("--out,-o", out, "Map JSON output");
  ingest->add_option("--eps", eps, "Also build the primal network with boundary edges of total conductance eps")
      ->check(CLI::PositiveNumber);
  ingest->add_option("--network-out", networkOut, "Output for the --eps network");

  auto* solve = app.add_subcommand("solve", "Solve the 0/1 Dirichlet problem");
  solve->add_option("input", input, "Map or network JSON")->required();
  solve->add_flag("--dual", dual, "Use the dual network of a map");
  solve->add_flag("--cg", cg, "Use preconditioned conjugate gradients");
  solve->add_option("--out,-o", out, "Potentials JSON output");

  auto* decomposeCmd = app.add_subcommand("decompose", "Non-crossing minimal path decomposition");
  decomposeCmd->add_option("input", input, "Map or network JSON")->required();
  decomposeCmd->add_flag("--dual", dual, "Use the dual network of a map");
  decomposeCmd->add_option("--out,-o", out, "Decomposition JSON output (stdout when omitted)");

  auto* tile = app.add_subcommand("tile", "Rectangle tiling of the decomposition");
  tile->add_option("input", input, "Map or network JSON")->required();
  tile->add_flag("--dual", dual, "Use the dual network of a map");
  tile->add_option("--svg", svg, "SVG output");
  tile->add_flag("--overlay", overlay, "Draw path polylines over the tiles");
  tile->add_option("--samples", samples, "Monte-Carlo coverage samples")->check(CLI::PositiveNumber);

  auto* converge = app.add_subcommand("converge", "Refinement studies as CSV");
  converge->require_subcommand(1);
  std::string kind;
  for (const char* k : {"rect", "rotated"}) {
    auto* sub = converge->add_subcommand(k, std::string(k) == "rect" ? "Straight grids" : "Rotated grids");
    sub->add_option("--L", L, "Aspect ratio")->check(CLI::PositiveNumber);
    sub->add_option("--n", nList, "Comma-separated refinements");
    sub->add_option("--csv", csv, "CSV output (stdout when omitted)");
    sub->callback([&kind, k] { kind = k; });
  }
  auto* mesh = converge->add_subcommand("mesh", "Sequence of ingested meshes");
  mesh->add_option("bases", meshes, "Mesh paths without the .node/.ele extension")->required();
  mesh->add_option("--param", params, "Refinement parameter per mesh")->delimiter(',');
  mesh->add_flag("--exact-x", exactX, "Compare potentials against h = x (unit square)");
  mesh->add_option("--csv", csv, "CSV output (stdout when omitted)");
  mesh->callback([&kind] { kind = "mesh"; });

  auto* check = app.add_subcommand("check", "Fulkerson, Beurling and flow-decomposition checks");
  check->add_option("input", input, "Map or network JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (*generate) {
      const bool rotated = generate->got_subcommand("rotated");
      runGenerate(settings, rotated, L, n, out);
    } else if (*ingest) {
      runIngest(settings, node, ele, out, eps, networkOut);
    } else if (*solve) {
      runSolve(settings, input, dual, cg, out);
    } else if (*decomposeCmd) {
      runDecompose(settings, input, dual, out);
    } else if (*tile) {
      runTile(settings, input, dual, svg, overlay, samples);
    } else if (*converge) {
      runConverge(settings, kind, L, nList, meshes, params, exactX, csv);
    } else if (*check) {
      runCheck(settings, input);
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const modlab::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
