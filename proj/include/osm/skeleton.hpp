#pragma once

#include <vector>

#include <Eigen/SparseLU>

#include "osm/assembly.hpp"
#include "osm/boundary_conditions.hpp"
#include "osm/fields.hpp"
#include "osm/impedance.hpp"
#include "osm/traces.hpp"

namespace osm {

/// Factorizations of C_j = A_j - i B_j^T T_j B_j per subdomain; the Gamma
/// block uses the closed-form inverse of the boundary operator.
class LocalImpedanceSolver {
 public:
  LocalImpedanceSolver(const std::vector<LocalForms>& forms, const BlockImpedance& impedance,
                       const BoundaryOperator& bc, double rcond_min = 1e-12);

  /// C^-1 (or C^-T) applied to a dual tuple, giving a primal tuple.
  VolumeTuple solve(const VolumeTuple& rhs, bool transpose = false) const;
  Vec solve_block(int j, const Vec& rhs, bool transpose = false) const;

  /// A u blockwise (A^T u when transposed), no conjugation.
  VolumeTuple apply_A(const VolumeTuple& u, bool transpose = false) const;

  double rcond(int j) const { return rcond_[j]; }
  int num_subdomains() const { return static_cast<int>(blocks_.size()); }
  const BoundaryOperator& bc() const { return bc_; }

 private:
  struct Block {
    SpMat A;
    SpMat C;
    bool symmetric = true;
    Eigen::SparseLU<SpMat> lu;
    Eigen::SparseLU<SpMat> lu_t;
  };
  std::vector<Block> blocks_;
  std::vector<double> rcond_;
  BoundaryOperator bc_;
};

/// Pi q = 2 T E G^-1 E^T q - q, the T^-1-orthogonal reflection across T(X).
class ExchangeOperator {
 public:
  ExchangeOperator(const SingleTraceBasis& basis, const BlockImpedance& impedance)
      : basis_(basis), impedance_(impedance) {}

  SkeletonField apply(const SkeletonField& q) const;
  /// Q q = T E G^-1 E^T q.
  SkeletonField project(const SkeletonField& q) const;

 private:
  const SingleTraceBasis& basis_;
  const BlockImpedance& impedance_;
};

class Problem;

struct ScatterState {
  SkeletonField sq;   // S q
  VolumeTuple u;      // C^-1 B^* q
};

SkeletonField scattering_apply(const Problem& pb, const SkeletonField& q, bool transpose = false);
ScatterState scattering_with_state(const Problem& pb, const SkeletonField& q, bool transpose = false);

/// f = -2i Pi T B C^-1 ell.
SkeletonField skeleton_rhs(const Problem& pb, const LoadTuple& load);
/// (Id + Pi S) q.
SkeletonField skeleton_operator_apply(const Problem& pb, const SkeletonField& q);

struct RecoveredVolume {
  VolumeTuple tuple;      // u = C^-1 (B^* q + ell)
  Vec u_global;           // one value per mesh vertex, lowest block wins
  Vec p_gamma;            // p slot of the Gamma pair
  SkeletonField p;        // q + i T B u
  double mismatch = 0.0;  // largest disagreement between duplicated dofs
};

RecoveredVolume recover_volume(const Problem& pb, const SkeletonField& q, const LoadTuple& load);

struct CauchyPair {
  SkeletonField v;
  SkeletonField p;
  VolumeTuple witness;  // B witness = v, A witness = B^* p
};

/// Cauchy data generated by an incoming trace q: u = C^-1 B^* q, v = B u, p = q + i T v.
CauchyPair cauchy_pair_from(const Problem& pb, const SkeletonField& q, bool transpose = false);

/// ||(p + iTv) - S(p - iTv)||_{T^-1} / ||p - iTv||_{T^-1}; zero for Cauchy data.
double cauchy_membership_residual(const Problem& pb, const SkeletonField& v, const SkeletonField& p);

struct CauchyDecomposition {
  CauchyPair cauchy;     // (v2, p2) with witness
  SkeletonField graph;   // v1, the graph part is (v1, i T v1)
};

/// Splits (v, p) into Cauchy data plus an element of the graph of iT.
CauchyDecomposition cauchy_decompose(const Problem& pb, const SkeletonField& v, const SkeletonField& p);

/// q = p - i T v with v = B R z and p = (B^dagger)^* A R z, for z = [u; p_Gamma].
SkeletonField kernel_lift(const Problem& pb, const Vec& z);

}  // namespace osm
