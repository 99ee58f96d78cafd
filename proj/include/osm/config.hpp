#pragma once

#include <string>
#include <vector>

#include "osm/problem.hpp"
#include "osm/spectral.hpp"

namespace osm {

struct SolverConfig {
  std::string method = "gmres";  // gmres | richardson
  double relax = 0.5;
  double tol = 1e-10;
  int maxit = 1000;
  int restart = 100;
};

/// A parsed run description. `setup` is ready to build a Problem; the other
/// fields only steer the commands and the reports.
struct RunConfig {
  ProblemSetup setup;
  std::string kappa_mode = "constant";  // constant | resonant | absorbing-layer
  double kappa = 0.0;                   // before any mode adjustment
  double resonance = 0.0;               // smallest Dirichlet eigenvalue, resonant mode only
  std::string source_kind = "zero";
  bool manufactured = false;            // exact solution sin(pi x / W) sin(pi y / H)
  SolverConfig solver;
  AnalysisOptions analysis;
  std::vector<double> ks;
  std::string output = "out";
};

/// Reads an INI file. Unknown sections or keys, malformed numbers and
/// violated assumptions throw InvalidArgument with a message naming the key.
RunConfig parse_config(const std::string& path);
RunConfig parse_config_text(const std::string& text);

/// Exact solution of the manufactured case at a point.
cplx manufactured_solution(const RunConfig& cfg, Point x);

}  // namespace osm
