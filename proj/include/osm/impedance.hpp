#pragma once

#include <vector>

#include <Eigen/SparseCholesky>

#include "osm/fields.hpp"
#include "osm/geometry.hpp"
#include "osm/traces.hpp"

namespace osm {

enum class TGammaKind { collar, boundary_h1 };

/// H_bb - H_bi H_ii^-1 H_ib for H ordered interior first.
RMat schur_dtn(const RSpMat& H, int num_interior);

/// Schur complement onto Gamma of K + gamma^-2 M assembled on a one-cell
/// ring of triangles surrounding the rectangle (same spacing), with the
/// outer rim left free.
RMat collar_impedance(const Mesh& mesh, const std::vector<int>& gamma_dofs, double gamma);

/// Boundary stiffness + gamma^-1 * boundary mass along the closed loop Gamma.
RMat boundary_h1_impedance(const Mesh& mesh, const std::vector<int>& gamma_dofs, double gamma);

/// Consistent P1 mass matrix of the boundary loop, on Gamma dofs. When
/// `only` is set, just the edges with that tag contribute.
RMat boundary_mass(const Mesh& mesh, const std::vector<int>& gamma_dofs,
                   const BoundaryTag* only = nullptr);

/// T = diag(T_Gamma, T_1, ..., T_J) with Cholesky factors of each block and
/// of the coupling Gram G = E^T T E.
class BlockImpedance {
 public:
  BlockImpedance(std::vector<RMat> blocks, const SingleTraceBasis& basis);

  SkeletonField apply(const SkeletonField& v) const;   // primal -> dual
  SkeletonField solve(const SkeletonField& p) const;   // dual -> primal
  double t_norm(const SkeletonField& v) const;
  double tinv_norm(const SkeletonField& p) const;

  /// w = L^-1 q blockwise, so that ||w||_2 = ||q||_{T^-1}.
  Vec whiten(const SkeletonField& q) const;
  SkeletonField unwhiten(const Vec& w) const;

  /// G^-1 x for a global skeleton vector.
  Vec g_solve(const Vec& x) const;

  int num_blocks() const { return static_cast<int>(blocks_.size()); }
  const RMat& block(int b) const { return blocks_[b]; }
  const RMat& factor(int b) const { return factors_[b]; }
  const RSpMat& gram() const { return G_; }

  /// Test hook: perturbs one off-diagonal entry of block b used by apply(),
  /// leaving factors untouched (breaks symmetry on purpose).
  void tamper_for_testing(int b, double eps);

 private:
  std::vector<RMat> blocks_;
  std::vector<RMat> factors_;  // lower triangular
  std::vector<Eigen::LLT<RMat>> llt_;
  std::vector<int> sizes_;
  RSpMat G_;
  Eigen::SimplicialLLT<RSpMat> G_llt_;
};

}  // namespace osm
