#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Cholesky>

#include "osm/geometry.hpp"
#include "osm/types.hpp"

namespace osm {

enum class BcKind { dirichlet, neumann, robin, mixed };

const char* to_string(BcKind kind);
BcKind parse_bc_kind(const std::string& name);

/// T_Gamma^-1-orthogonal projector onto dual vectors supported on the
/// flagged dofs: P (P^T T^-1 P)^-1 P^T T^-1.
RMat mixed_projector(const RMat& t_gamma, const std::vector<bool>& dirichlet_dofs);

/// Gamma dofs touched by at least one Dirichlet-tagged edge.
std::vector<bool> dirichlet_dof_mask(const Mesh& mesh, const std::vector<int>& gamma_dofs);

/// Boundary operator A_Gamma acting on the pair (alpha, p) of Gamma vectors.
/// Output pairs are ordered (functional on alpha, functional on p).
class BoundaryOperator {
 public:
  static BoundaryOperator dirichlet(const RMat& t_gamma);
  static BoundaryOperator neumann(const RMat& t_gamma);
  static BoundaryOperator robin(const RMat& t_gamma, const RMat& lambda);
  static BoundaryOperator mixed(const RMat& t_gamma, const std::vector<bool>& dirichlet_dofs);

  BcKind kind() const { return kind_; }
  int size() const { return static_cast<int>(T_.rows()); }

  std::pair<Vec, Vec> apply(const Vec& alpha, const Vec& p) const;
  /// 2n x 2n matrix, rows [alpha-test; p-test], cols [alpha; p].
  Mat matrix() const;

  /// Solves (A_Gamma - i B^T T B)(alpha, p) = (x, y) in closed form.
  std::pair<Vec, Vec> impedance_inverse(const Vec& x, const Vec& y) const;
  /// Same solve through a dense LU of the assembled 2n x 2n operator.
  std::pair<Vec, Vec> impedance_inverse_dense(const Vec& x, const Vec& y, bool transpose = false) const;

  /// Closed-form S_Gamma.
  Vec scatter(const Vec& q) const;
  /// q + 2i T alpha with alpha from the dense solve of (q, 0).
  Vec scatter_generic(const Vec& q, bool transpose = false) const;

  const RMat& t_gamma() const { return T_; }
  const RMat& lambda() const { return Lambda_; }
  const RMat& theta() const { return Theta_; }

 private:
  BoundaryOperator(BcKind kind, const RMat& t_gamma);

  BcKind kind_;
  RMat T_;
  RMat Tinv_;
  RMat Lambda_;
  RMat Theta_;
  Eigen::LLT<RMat> lambda_plus_t_;
};

struct BoundaryLoad {
  Vec ell_alpha;
  Vec ell_p;
};

/// Right-hand side of the boundary pair. g_d and g_n are nodal values on
/// Gamma dofs. Neumann data enters through the boundary mass of the edges
/// that carry it (all edges for neumann/robin, Neumann-tagged for mixed).
BoundaryLoad boundary_load(const BoundaryOperator& bc, const Mesh& mesh,
                           const std::vector<int>& gamma_dofs, const Vec& g_d, const Vec& g_n);

}  // namespace osm
