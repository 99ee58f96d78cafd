#include "osm/boundary_conditions.hpp"

#include <algorithm>

#include <Eigen/LU>

#include "osm/impedance.hpp"

namespace osm {

const char* to_string(BcKind kind) {
  switch (kind) {
    case BcKind::dirichlet: return "dirichlet";
    case BcKind::neumann: return "neumann";
    case BcKind::robin: return "robin";
    case BcKind::mixed: return "mixed";
  }
  return "?";
}

BcKind parse_bc_kind(const std::string& name) {
  if (name == "dirichlet") return BcKind::dirichlet;
  if (name == "neumann") return BcKind::neumann;
  if (name == "robin") return BcKind::robin;
  if (name == "mixed") return BcKind::mixed;
  throw InvalidArgument("unknown boundary condition kind '" + name +
                        "' (expected dirichlet, neumann, robin or mixed)");
}

RMat mixed_projector(const RMat& t_gamma, const std::vector<bool>& dirichlet_dofs) {
  const int n = static_cast<int>(t_gamma.rows());
  if (static_cast<int>(dirichlet_dofs.size()) != n) throw InvalidArgument("mixed_projector: mask size mismatch");
  std::vector<int> sel;
  for (int k = 0; k < n; ++k) {
    if (dirichlet_dofs[k]) sel.push_back(k);
  }
  if (sel.empty()) throw InvalidArgument("mixed_projector: Dirichlet part is empty");
  if (static_cast<int>(sel.size()) == n) throw InvalidArgument("mixed_projector: Neumann part is empty");
  RMat P = RMat::Zero(n, static_cast<Eigen::Index>(sel.size()));
  for (std::size_t c = 0; c < sel.size(); ++c) P(sel[c], static_cast<Eigen::Index>(c)) = 1.0;
  Eigen::LLT<RMat> tl(t_gamma);
  const RMat TinvP = tl.solve(P);              // T^-1 P
  const RMat small = P.transpose() * TinvP;    // P^T T^-1 P
  Eigen::LLT<RMat> sl(small);
  return P * sl.solve(TinvP.transpose());      // P (P^T T^-1 P)^-1 P^T T^-1
}

std::vector<bool> dirichlet_dof_mask(const Mesh& mesh, const std::vector<int>& gamma_dofs) {
  std::vector<bool> mask(gamma_dofs.size(), false);
  for (const auto& e : mesh.boundary_edges) {
    if (e.tag != BoundaryTag::dirichlet) continue;
    for (int v : e.v) {
      auto it = std::lower_bound(gamma_dofs.begin(), gamma_dofs.end(), v);
      mask[static_cast<std::size_t>(it - gamma_dofs.begin())] = true;
    }
  }
  return mask;
}

BoundaryOperator::BoundaryOperator(BcKind kind, const RMat& t_gamma)
    : kind_(kind), T_(t_gamma) {
  Eigen::LLT<RMat> tl(T_);
  if (tl.info() != Eigen::Success) throw InvalidArgument("BoundaryOperator: T_Gamma is not SPD");
  Tinv_ = tl.solve(RMat::Identity(T_.rows(), T_.cols()));
  Tinv_ = 0.5 * (Tinv_ + Tinv_.transpose()).eval();
}

BoundaryOperator BoundaryOperator::dirichlet(const RMat& t_gamma) {
  return {BcKind::dirichlet, t_gamma};
}

BoundaryOperator BoundaryOperator::neumann(const RMat& t_gamma) {
  return {BcKind::neumann, t_gamma};
}

BoundaryOperator BoundaryOperator::robin(const RMat& t_gamma, const RMat& lambda) {
  BoundaryOperator b(BcKind::robin, t_gamma);
  if (lambda.rows() != t_gamma.rows() || lambda.cols() != t_gamma.cols()) {
    throw InvalidArgument("robin: Lambda has the wrong size");
  }
  Eigen::LLT<RMat> ll(lambda);
  if (ll.info() != Eigen::Success) throw InvalidArgument("robin: Lambda must be symmetric positive definite");
  b.Lambda_ = lambda;
  b.lambda_plus_t_.compute(lambda + t_gamma);
  if (b.lambda_plus_t_.info() != Eigen::Success) throw InvalidArgument("robin: Lambda + T_Gamma not factorizable");
  return b;
}

BoundaryOperator BoundaryOperator::mixed(const RMat& t_gamma, const std::vector<bool>& dirichlet_dofs) {
  BoundaryOperator b(BcKind::mixed, t_gamma);
  b.Theta_ = mixed_projector(t_gamma, dirichlet_dofs);
  return b;
}

std::pair<Vec, Vec> BoundaryOperator::apply(const Vec& alpha, const Vec& p) const {
  const auto n = T_.rows();
  if (alpha.size() != n || p.size() != n) throw InvalidArgument("BoundaryOperator::apply: size mismatch");
  switch (kind_) {
    case BcKind::dirichlet:
      return {p, alpha};
    case BcKind::neumann:
      return {Vec::Zero(n), Tinv_.cast<cplx>() * p};
    case BcKind::robin:
      return {-I * (Lambda_.cast<cplx>() * alpha), Tinv_.cast<cplx>() * p};
    case BcKind::mixed: {
      const Vec tp = Theta_.cast<cplx>() * p;
      return {tp, Theta_.transpose().cast<cplx>() * alpha + Tinv_.cast<cplx>() * (p - tp)};
    }
  }
  return {};
}

Mat BoundaryOperator::matrix() const {
  const auto n = T_.rows();
  Mat A = Mat::Zero(2 * n, 2 * n);
  const RMat Id = RMat::Identity(n, n);
  switch (kind_) {
    case BcKind::dirichlet:
      A.topRightCorner(n, n) = Id.cast<cplx>();
      A.bottomLeftCorner(n, n) = Id.cast<cplx>();
      break;
    case BcKind::neumann:
      A.bottomRightCorner(n, n) = Tinv_.cast<cplx>();
      break;
    case BcKind::robin:
      A.topLeftCorner(n, n) = -I * Lambda_.cast<cplx>();
      A.bottomRightCorner(n, n) = Tinv_.cast<cplx>();
      break;
    case BcKind::mixed:
      A.topRightCorner(n, n) = Theta_.cast<cplx>();
      A.bottomLeftCorner(n, n) = Theta_.transpose().cast<cplx>();
      A.bottomRightCorner(n, n) = (Tinv_ * (Id - Theta_)).cast<cplx>();
      break;
  }
  return A;
}

std::pair<Vec, Vec> BoundaryOperator::impedance_inverse(const Vec& x, const Vec& y) const {
  const auto n = T_.rows();
  if (x.size() != n || y.size() != n) throw InvalidArgument("impedance_inverse: size mismatch");
  const Mat T = T_.cast<cplx>();
  switch (kind_) {
    case BcKind::dirichlet:
      return {y, x + I * (T * y)};
    case BcKind::neumann:
      return {I * (Tinv_.cast<cplx>() * x), T * y};
    case BcKind::robin: {
      Vec a(n);
      a.real() = lambda_plus_t_.solve(RVec(x.real()));
      a.imag() = lambda_plus_t_.solve(RVec(x.imag()));
      return {I * a, T * y};
    }
    case BcKind::mixed: {
      const Mat Th = Theta_.cast<cplx>();
      const Vec alpha = Th.transpose() * y + I * (Tinv_.cast<cplx>() * (x - Th * x));
      const Vec ty = T * y;
      const Vec p = ty - Th * ty + I * (Th * ty) + Th * x;
      return {alpha, p};
    }
  }
  return {};
}

namespace {

Mat impedance_matrix(const BoundaryOperator& bc) {
  const auto n = bc.size();
  Mat C = bc.matrix();
  C.topLeftCorner(n, n) -= I * bc.t_gamma().cast<cplx>();
  return C;
}

}  // namespace

std::pair<Vec, Vec> BoundaryOperator::impedance_inverse_dense(const Vec& x, const Vec& y,
                                                              bool transpose) const {
  const auto n = T_.rows();
  Mat C = impedance_matrix(*this);
  if (transpose) C.transposeInPlace();
  Vec rhs(2 * n);
  rhs << x, y;
  const Vec sol = C.partialPivLu().solve(rhs);
  return {sol.head(n), sol.tail(n)};
}

Vec BoundaryOperator::scatter(const Vec& q) const {
  switch (kind_) {
    case BcKind::dirichlet:
      return q;
    case BcKind::neumann:
      return -q;
    case BcKind::robin: {
      // (Lambda - T)(Lambda + T)^-1 q
      Vec z(q.size());
      z.real() = lambda_plus_t_.solve(RVec(q.real()));
      z.imag() = lambda_plus_t_.solve(RVec(q.imag()));
      return (Lambda_ - T_).cast<cplx>() * z;
    }
    case BcKind::mixed:
      return 2.0 * (Theta_.cast<cplx>() * q) - q;
  }
  return {};
}

Vec BoundaryOperator::scatter_generic(const Vec& q, bool transpose) const {
  const auto [alpha, p] = impedance_inverse_dense(q, Vec::Zero(q.size()), transpose);
  return q + 2.0 * I * (T_.cast<cplx>() * alpha);
}

BoundaryLoad boundary_load(const BoundaryOperator& bc, const Mesh& mesh,
                           const std::vector<int>& gamma_dofs, const Vec& g_d, const Vec& g_n) {
  const auto n = static_cast<Eigen::Index>(gamma_dofs.size());
  if (g_d.size() != n || g_n.size() != n) throw InvalidArgument("boundary_load: data size mismatch");
  BoundaryLoad load{Vec::Zero(n), Vec::Zero(n)};
  switch (bc.kind()) {
    case BcKind::dirichlet:
      load.ell_p = g_d;
      break;
    case BcKind::neumann:
    case BcKind::robin:
      load.ell_alpha = boundary_mass(mesh, gamma_dofs).cast<cplx>() * g_n;
      break;
    case BcKind::mixed: {
      const BoundaryTag neu = BoundaryTag::neumann;
      load.ell_alpha = boundary_mass(mesh, gamma_dofs, &neu).cast<cplx>() * g_n;
      load.ell_p = bc.theta().transpose().cast<cplx>() * g_d;
      break;
    }
  }
  return load;
}

}  // namespace osm
