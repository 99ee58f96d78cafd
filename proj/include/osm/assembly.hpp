#pragma once

#include <functional>
#include <vector>

#include "osm/fields.hpp"
#include "osm/geometry.hpp"
#include "osm/types.hpp"

namespace osm {

/// Coefficients of the volume form  int mu^-1 grad u . grad v - kappa^2 u v.
struct Coefficients {
  cplx mu{1.0, 0.0};
  std::function<cplx(Point)> kappa_sq;
  /// When true the P1 interpolant of kappa^2 is integrated exactly (exact for
  /// affine kappa^2); otherwise kappa^2 is frozen at each triangle centroid.
  bool kappa_sq_affine = true;
  double gamma = 1.0;

  static Coefficients constant(cplx kappa_sq, double gamma, cplx mu = 1.0);

  /// Checks Re mu > 0, Im mu >= 0, gamma > 0 and Im kappa^2 >= 0 at every
  /// point where kappa^2 is sampled on `mesh`.
  void validate(const Mesh& mesh) const;
};

struct ElementMatrices {
  Eigen::Matrix3d K;
  Eigen::Matrix3d M;
  Eigen::Matrix3cd Mk;
};

ElementMatrices p1_element(const Mesh& mesh, int t, const Coefficients& coeffs);

/// Vertex ids of the closed subdomain, interior first then boundary.
std::vector<int> local_dofs(const Partition& partition, int j);

struct LocalForms {
  int subdomain = 0;
  std::vector<int> dofs;
  int num_interior = 0;
  RSpMat K;
  RSpMat M;
  SpMat Mk;
  SpMat A;   // mu^-1 K - Mk, complex symmetric
  RSpMat H;  // K + gamma^-2 M, the local H1 Gram

  int size() const { return static_cast<int>(dofs.size()); }
  int num_boundary() const { return size() - num_interior; }
};

LocalForms assemble_subdomain(const Mesh& mesh, const Partition& partition, int j,
                              const Coefficients& coeffs);

std::vector<LocalForms> assemble_all_subdomains(const Mesh& mesh, const Partition& partition,
                                                const Coefficients& coeffs);

/// Same forms over every mesh vertex, assembled directly from the triangles.
struct GlobalForms {
  RSpMat K;
  RSpMat M;
  SpMat Mk;
  SpMat A;
  RSpMat H;
};

GlobalForms assemble_global(const Mesh& mesh, const Coefficients& coeffs);

/// Right-hand side in the broken layout: ell_alpha / ell_p act on the
/// boundary pair, omega[j] on subdomain j.
struct LoadTuple {
  Vec ell_alpha;
  Vec ell_p;
  std::vector<Vec> omega;

  VolumeTuple as_dual_tuple() const;
};

/// Volume part of the load with one-point (centroid) quadrature; the
/// boundary slots are left zero.
LoadTuple assemble_load(const Mesh& mesh, const Partition& partition,
                        const std::function<cplx(Point)>& f);

/// Global volume load, same quadrature.
Vec assemble_global_load(const Mesh& mesh, const std::function<cplx(Point)>& f);

/// R(u,p) = ((u|Gamma, p), u|Omega_1, ..., u|Omega_J) and its adjoint.
class Restriction {
 public:
  Restriction(const Mesh& mesh, const Partition& partition);

  VolumeTuple apply(const Vec& u, const Vec& p) const;
  /// Sums duplicated contributions back onto global dofs. Returns (u*, p*).
  std::pair<Vec, Vec> adjoint(const VolumeTuple& dual) const;

  /// Sparse 0/1 matrix from [u; p] to the flattened tuple
  /// [alpha; p; omega_1; ...; omega_J].
  SpMat matrix() const;

  int num_volume() const { return num_vertices_; }
  int num_gamma() const { return static_cast<int>(gamma_dofs_.size()); }
  int tuple_size() const;
  const std::vector<std::vector<int>>& subdomain_dofs() const { return dofs_; }
  const std::vector<int>& gamma_dofs() const { return gamma_dofs_; }

 private:
  int num_vertices_ = 0;
  std::vector<int> gamma_dofs_;
  std::vector<std::vector<int>> dofs_;
};

VolumeTuple flat_to_tuple(const Restriction& r, FieldKind kind, const Vec& flat);
Vec tuple_to_flat(const VolumeTuple& t);

/// Monolithic operator over [u (all vertices); p (Gamma dofs)].
struct PrimarySystem {
  SpMat matrix;
  Vec rhs;
  int num_volume = 0;
  int num_gamma = 0;
};

/// Assembles A_{Omega x Gamma} directly from the mesh: global volume form plus
/// the boundary block `a_gamma` (2 nGamma square, acting on (u|Gamma, p))
/// embedded through the Gamma restriction. `rhs` is the global source load
/// plus the boundary functional (ell_alpha on u|Gamma rows, ell_p on p rows).
PrimarySystem assemble_primary(const Mesh& mesh, const Partition& partition,
                               const Coefficients& coeffs, const Mat& a_gamma,
                               const std::function<cplx(Point)>& f, const Vec& ell_alpha,
                               const Vec& ell_p);

/// Same operator built as R^T diag(A_Gamma, A_1, ..., A_J) R.
SpMat assemble_primary_factored(const Restriction& r, const std::vector<LocalForms>& forms,
                                const Mat& a_gamma);

/// Block-diagonal diag(a_gamma, A_1, ..., A_J) in the flattened tuple layout.
SpMat block_diagonal(const Mat& a_gamma, const std::vector<LocalForms>& forms,
                     bool transpose = false);

}  // namespace osm
