#pragma once

#include <vector>

#include <Eigen/SparseCholesky>

#include "osm/assembly.hpp"
#include "osm/fields.hpp"
#include "osm/geometry.hpp"

namespace osm {

/// Multi-domain trace B = diag(B_Gamma, B_1, ..., B_J) with B_Gamma(alpha,p) = alpha,
/// its bilinear adjoint, and the H-harmonic lifting B^dagger.
class TraceOperator {
 public:
  TraceOperator(const SkeletonIndex& index, const std::vector<LocalForms>& forms);

  SkeletonField apply(const VolumeTuple& u) const;
  VolumeTuple adjoint(const SkeletonField& p) const;
  /// Block j: interior values solve H_ii u_i = -H_ib v_j. Gamma block: (v, 0).
  VolumeTuple lift(const SkeletonField& v) const;
  /// Adjoint of the lifting: phi_b - H_bi H_ii^-1 phi_i per subdomain, alpha slot on Gamma.
  SkeletonField lift_adjoint(const VolumeTuple& phi) const;

  /// Full local vector of subdomain j lifted from boundary values.
  Vec lift_block(int j, const Vec& boundary_values) const;

  int num_subdomains() const { return static_cast<int>(blocks_.size()); }
  int num_gamma() const { return num_gamma_; }

 private:
  struct Block {
    int num_interior = 0;
    int num_boundary = 0;
    RSpMat H_ib;
    Eigen::SimplicialLLT<RSpMat> H_ii;
  };
  int num_gamma_ = 0;
  std::vector<Block> blocks_;
};

/// Embedding E of global skeleton coefficient vectors into primal fields whose
/// values agree wherever blocks share a dof.
class SingleTraceBasis {
 public:
  explicit SingleTraceBasis(const SkeletonIndex& index);

  SkeletonField embed(const Vec& x) const;
  Vec adjoint(const SkeletonField& q) const;
  /// Sparse 0/1 matrix, rows = flattened block positions, cols = skeleton dofs.
  const RSpMat& matrix() const { return E_; }
  const SkeletonIndex& index() const { return index_; }

 private:
  SkeletonIndex index_;
  RSpMat E_;
};

/// <p, v>, no conjugation.
cplx duality_pair(const SkeletonField& p, const SkeletonField& v);

/// [(u,p),(v,q)] = <q,u> - <p,v> for primal u,v and dual p,q.
cplx skew_pair(const SkeletonField& u, const SkeletonField& p, const SkeletonField& v,
               const SkeletonField& q);

}  // namespace osm
