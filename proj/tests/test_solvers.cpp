#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "osm/problem.hpp"
#include "osm/solvers.hpp"
#include "osm/spectral.hpp"

using namespace osm;

namespace {

ProblemSetup loaded() {
  ProblemSetup s = reference_setup();
  s.source = [](Point x) { return cplx(1.0 + x.x, -x.y); };
  return s;
}

}  // namespace

TEST_CASE("richardson residuals are monotone and reach tolerance") {
  const Problem pb(loaded());
  const SkeletonField f = skeleton_rhs(pb, pb.load);
  const SolveResult r = richardson(pb, f, 0.5, 1e-8, 5000);
  REQUIRE(r.report.converged);
  CHECK_FALSE(r.report.diverged);
  const auto& h = r.report.residual_history;
  for (std::size_t i = 1; i < h.size(); ++i) CHECK(h[i] <= h[i - 1] * (1 + 1e-12));
  CHECK(h.back() <= 1e-8 * pb.impedance.tinv_norm(f));

  const SolveResult g = gmres_tinv(pb, f, 1e-8, 100, 1000);
  REQUIRE(g.report.converged);
  CHECK(g.report.iterations < r.report.iterations);
  // both solve the same system
  const SolveResult rt = richardson(pb, f, 0.5, 1e-12, 10000);
  const SolveResult gt = gmres_tinv(pb, f, 1e-12, 100, 1000);
  CHECK(pb.impedance.tinv_norm(rt.q - gt.q) <= 1e-8 * pb.impedance.tinv_norm(gt.q));
}

TEST_CASE("contraction factor is bounded by the coercivity estimate") {
  const Problem pb(loaded());
  const SkeletonField f = skeleton_rhs(pb, pb.load);
  const double r = 0.5;
  const SolveResult sol = richardson(pb, f, r, 1e-13, 10000);
  const auto& h = sol.report.residual_history;
  REQUIRE(h.size() > 21);
  const std::size_t n = h.size() - 1;
  const double rate = std::pow(h[n] / h[n - 20], 1.0 / 20.0);
  const double c = coercivity_constant(dense_operator(pb));
  CHECK(rate <= std::sqrt(1.0 - 2.0 * r * c + 4.0 * r * r) + 0.05);
}

TEST_CASE("zero right-hand side returns zero at once") {
  const Problem pb(reference_setup());
  const SkeletonField f = SkeletonField::zeros(pb.index, FieldKind::dual);
  const SolveResult r = richardson(pb, f, 0.5, 1e-10, 100);
  CHECK(r.report.iterations == 0);
  CHECK(r.q.coeff_norm() == 0.0);
  const SolveResult g = gmres_tinv(pb, f, 1e-10, 50, 100);
  CHECK(g.report.iterations == 0);
  CHECK(g.q.coeff_norm() == 0.0);
  CHECK_THROWS_AS(richardson(pb, f, 1.5, 1e-10, 100), InvalidArgument);
}

TEST_CASE("single block Dirichlet terminates within the skeleton dimension") {
  ProblemSetup s = reference_setup();
  s.px = s.py = 1;
  s.bc = BcKind::dirichlet;
  s.g_d = [](Point x) { return cplx(x.x, 0.0); };
  const Problem pb(s);
  const SkeletonField f = skeleton_rhs(pb, pb.load);
  const int n = pb.index.total_block_size();
  const SolveResult g = gmres_tinv(pb, f, 1e-10, n, n);
  CHECK(g.report.converged);
  CHECK(g.report.iterations <= n);
}

TEST_CASE("resonant Dirichlet problem stagnates") {
  ProblemSetup s = reference_setup();
  s.bc = BcKind::dirichlet;
  const double lam = dirichlet_resonance(s);
  s.kappa_sq = [lam](Point) { return cplx(lam); };
  s.source = [](Point) { return cplx(1.0); };
  const Problem pb(s);
  const SkeletonField f = skeleton_rhs(pb, pb.load);
  const SolveResult r = richardson(pb, f, 0.5, 1e-10, 3000);
  CHECK_FALSE(r.report.converged);
}

TEST_CASE("generic gmres on a small dense system") {
  Mat A = Mat::Identity(6, 6) * 3.0;
  for (int i = 0; i < 5; ++i) A(i, i + 1) = cplx(0.5, -0.2);
  const Vec b = testutil::random_vec(6);
  const GmresOutcome out = gmres([&](const Vec& x) { return Vec(A * x); }, b, 1e-14, 6, 20);
  CHECK(out.converged);
  CHECK((A * out.x - b).norm() <= 1e-13 * b.norm());
  CHECK(out.iterations <= 6);
}
