#include <Eigen/Eigenvalues>

#include "doctest.h"
#include "helpers.hpp"
#include "osm/problem.hpp"

using namespace osm;
using testutil::random_field;
using testutil::random_vec;

namespace {

double min_eig(const RMat& A) {
  Eigen::SelfAdjointEigenSolver<RMat> es(A, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace

TEST_CASE("Schur DtN") {
  const Mesh m = build_rect_mesh(2, 2, 1, 1);
  const Partition p = partition_checkerboard(m, 1, 1);
  const LocalForms f = assemble_subdomain(m, p, 0, Coefficients::constant(0.0, 0.5));
  const RMat T = schur_dtn(f.H, f.num_interior);
  CHECK((T - T.transpose()).norm() == 0.0);
  CHECK(min_eig(T) > 0.0);

  // dense oracle: explicit inverse of the interior block
  const RMat H(f.H);
  const int ni = f.num_interior, nb = f.num_boundary();
  const RMat ref = H.bottomRightCorner(nb, nb) -
                   H.bottomLeftCorner(nb, ni) * H.topLeftCorner(ni, ni).inverse() * H.topRightCorner(ni, nb);
  CHECK((T - ref).norm() <= 1e-13 * ref.norm());

  // no interior dofs: Schur complement is H_bb
  const Mesh m1 = build_rect_mesh(1, 1, 1, 1);
  const LocalForms f1 = assemble_subdomain(m1, partition_checkerboard(m1, 1, 1), 0, Coefficients::constant(0.0, 1.0));
  CHECK(f1.num_interior == 0);
  CHECK((schur_dtn(f1.H, 0) - RMat(f1.H)).norm() == 0.0);
}

TEST_CASE("T norm equals the H norm of the lifting") {
  const Problem pb(reference_setup());
  for (int j = 0; j < pb.partition.num_subdomains; ++j) {
    const RMat& T = pb.impedance.block(j + 1);
    for (int r = 0; r < 5; ++r) {
      const Vec v = random_vec(T.rows());
      const Vec l = pb.trace.lift_block(j, v);
      const double a = std::real(v.dot(T.cast<cplx>() * v));
      const double b = std::real(l.dot(pb.forms[j].H.cast<cplx>() * l));
      CHECK(testutil::rel(a, b) <= 1e-12);
    }
  }
}

TEST_CASE("collar impedance") {
  const Mesh m = build_rect_mesh(8, 8, 1, 1);
  const Partition p = partition_checkerboard(m, 2, 2);
  const RMat T = collar_impedance(m, p.gamma_dofs, 0.2);
  CHECK((T - T.transpose()).norm() == 0.0);
  CHECK(min_eig(T) > 0.0);
  const RMat T2 = collar_impedance(m, p.gamma_dofs, 0.4);
  for (int r = 0; r < 10; ++r) {
    const RVec q = RVec::Random(T.rows());
    CHECK(q.dot(T2 * q) < q.dot(T * q));
  }
  const RMat Th = boundary_h1_impedance(m, p.gamma_dofs, 0.2);
  CHECK((Th - Th.transpose()).norm() == 0.0);
  CHECK(min_eig(Th) > 0.0);
  CHECK(std::abs(boundary_mass(m, p.gamma_dofs).sum() - 4.0) < 1e-13);
}

TEST_CASE("block impedance applications and norms") {
  const Problem pb(reference_setup());
  const auto& T = pb.impedance;
  for (int b = 0; b < T.num_blocks(); ++b) {
    CHECK((T.block(b) - T.block(b).transpose()).norm() == 0.0);
    CHECK(min_eig(T.block(b)) > 0.0);
  }
  Eigen::SelfAdjointEigenSolver<RMat> gs{RMat(T.gram())};
  CHECK(gs.eigenvalues().minCoeff() > 0.0);
  for (int r = 0; r < 20; ++r) {
    const SkeletonField v = random_field(pb.index, FieldKind::primal);
    const SkeletonField w = random_field(pb.index, FieldKind::primal);
    CHECK(testutil::rel(T.tinv_norm(T.apply(v)), T.t_norm(v)) <= 1e-12);
    CHECK(T.t_norm(v + w) <= T.t_norm(v) + T.t_norm(w) + 1e-12);
    SkeletonField vc = v;
    for (int b = 0; b < vc.num_blocks(); ++b) vc.block(b) = vc.block(b).conjugate();
    SkeletonField wc = w;
    for (int b = 0; b < wc.num_blocks(); ++b) wc.block(b) = wc.block(b).conjugate();
    const cplx a = duality_pair(T.apply(v), wc);
    const cplx c = duality_pair(T.apply(w), vc);
    CHECK(std::abs(a - std::conj(c)) <= 1e-12 * std::abs(a));
    CHECK((T.solve(T.apply(v)) - v).coeff_norm() <= 1e-11 * v.coeff_norm());
  }
  CHECK_THROWS_AS(T.apply(random_field(pb.index, FieldKind::dual)), InvalidArgument);
  CHECK_THROWS_AS(T.t_norm(random_field(pb.index, FieldKind::dual)), InvalidArgument);
}

TEST_CASE("whitening") {
  const Problem pb(reference_setup());
  const auto& T = pb.impedance;
  for (int r = 0; r < 20; ++r) {
    const SkeletonField q1 = random_field(pb.index, FieldKind::dual);
    const SkeletonField q2 = random_field(pb.index, FieldKind::dual);
    CHECK((T.unwhiten(T.whiten(q1)) - q1).coeff_norm() <= 1e-13 * q1.coeff_norm());
    // ||q||_{T^-1} through an independent T^-1 solve
    const SkeletonField x = T.solve(q1);
    double direct = 0;
    for (int b = 0; b < q1.num_blocks(); ++b) direct += std::real(q1.block(b).dot(x.block(b)));
    CHECK(testutil::rel(T.whiten(q1).norm(), std::sqrt(direct)) <= 1e-12);
    const cplx a(0.3, -1.2);
    CHECK((T.whiten(a * q1 + q2) - (a * T.whiten(q1) + T.whiten(q2))).norm() <= 1e-12 * T.whiten(q1).norm());
  }
}
