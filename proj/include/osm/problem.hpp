#pragma once

#include <functional>
#include <vector>

#include "osm/assembly.hpp"
#include "osm/boundary_conditions.hpp"
#include "osm/geometry.hpp"
#include "osm/impedance.hpp"
#include "osm/skeleton.hpp"
#include "osm/traces.hpp"

namespace osm {

/// Plain description of a cavity problem and its decomposition.
struct ProblemSetup {
  double width = 1.0;
  double height = 1.0;
  int nx = 8;
  int ny = 8;
  int px = 2;
  int py = 2;
  cplx mu{1.0, 0.0};
  double k = 5.0;
  std::function<cplx(Point)> kappa_sq;  // unset: k^2
  bool kappa_sq_affine = true;
  double gamma = 0.2;
  BcKind bc = BcKind::robin;
  double lambda_scale = 5.0;                  // Lambda = lambda_scale * boundary mass
  std::function<bool(Point)> dirichlet_part;  // mixed only, true on Dirichlet edge midpoints
  std::function<cplx(Point)> g_d;             // unset: zero
  std::function<cplx(Point)> g_n;
  std::function<cplx(Point)> source;
  TGammaKind tgamma = TGammaKind::collar;
  double rcond_min = 1e-12;
};

/// Unit square, 8x8, 2x2 subdomains, mu = 1, kappa = k = 5, gamma = 1/k,
/// Robin with Lambda = k * boundary mass.
ProblemSetup reference_setup();

/// Everything the skeleton formulation needs, built once. Members refer to
/// each other, so a Problem is neither copied nor moved.
class Problem {
 public:
  explicit Problem(const ProblemSetup& setup);
  Problem(const Problem&) = delete;
  Problem& operator=(const Problem&) = delete;

  ProblemSetup setup;
  Mesh mesh;
  Partition partition;
  SkeletonIndex index;
  Coefficients coeffs;
  std::vector<LocalForms> forms;
  Restriction restriction;
  TraceOperator trace;
  SingleTraceBasis basis;
  RMat t_gamma;
  BlockImpedance impedance;
  BoundaryOperator bc;
  LocalImpedanceSolver local;
  ExchangeOperator exchange;
  LoadTuple load;

  int num_gamma() const { return static_cast<int>(partition.gamma_dofs.size()); }
  /// Monolithic operator and right-hand side over [u; p_Gamma].
  PrimarySystem primary() const;
  /// Gram of the broken-space norm pulled back by R: global K + gamma^-2 M
  /// plus T_Gamma on the u|Gamma block, and T_Gamma^-1 on p.
  RSpMat primary_gram() const;
  /// Norm of (u, p) in that Gram.
  double primary_norm(const Vec& z) const;
};

}  // namespace osm
