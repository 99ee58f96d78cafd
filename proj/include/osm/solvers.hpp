#pragma once

#include <functional>
#include <string>
#include <vector>

#include "osm/fields.hpp"

namespace osm {

class Problem;

struct SolveReport {
  std::string method;
  int iterations = 0;
  std::vector<double> residual_history;  // T^-1 norms, entry 0 is the initial residual
  bool converged = false;
  bool diverged = false;
  double final_mismatch = 0.0;
};

struct SolveResult {
  SkeletonField q;
  SolveReport report;
};

/// q <- q - r((Id + Pi S) q - f), stopping when the residual drops below
/// tol * ||f||. Ten consecutive residual increases end the run as diverged.
SolveResult richardson(const Problem& pb, const SkeletonField& f, double relax, double tol, int maxit);

/// Restarted GMRES on L^-1 (Id + Pi S) L, so Euclidean residuals are T^-1 residuals.
SolveResult gmres_tinv(const Problem& pb, const SkeletonField& f, double tol, int restart, int maxit);

using LinearMap = std::function<Vec(const Vec&)>;

struct GmresOutcome {
  Vec x;
  std::vector<double> history;
  int iterations = 0;
  bool converged = false;
};

/// Plain restarted GMRES (modified Gram-Schmidt, Givens rotations), x0 = 0.
/// Convergence is ||b - A x|| <= tol * ||b||.
GmresOutcome gmres(const LinearMap& op, const Vec& b, double tol, int restart, int maxit);

}  // namespace osm
