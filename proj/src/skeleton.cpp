#include "osm/skeleton.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "osm/problem.hpp"

namespace osm {

namespace {

double norm1(const SpMat& C) {
  double best = 0.0;
  for (int k = 0; k < C.outerSize(); ++k) {
    double s = 0.0;
    for (SpMat::InnerIterator it(C, k); it; ++it) s += std::abs(it.value());
    best = std::max(best, s);
  }
  return best;  // column-major: outer index is the column
}

// Hager's estimate of ||C^-1||_1 using solves with C and C^H.
template <typename Solve, typename SolveH>
double inverse_norm1_estimate(int n, Solve solve, SolveH solve_h) {
  Vec x = Vec::Constant(n, 1.0 / n);
  double est = 0.0;
  int last = -1;
  for (int iter = 0; iter < 5; ++iter) {
    const Vec y = solve(x);
    est = y.cwiseAbs().sum();
    Vec xi(n);
    for (int i = 0; i < n; ++i) xi[i] = std::abs(y[i]) > 0.0 ? y[i] / std::abs(y[i]) : cplx(1.0);
    const Vec z = solve_h(xi);
    Eigen::Index j = 0;
    const double zmax = z.cwiseAbs().maxCoeff(&j);
    if (zmax <= std::real(z.dot(x)) || static_cast<int>(j) == last) break;
    last = static_cast<int>(j);
    x.setZero();
    x[j] = 1.0;
  }
  return est;
}

}  // namespace

LocalImpedanceSolver::LocalImpedanceSolver(const std::vector<LocalForms>& forms,
                                           const BlockImpedance& impedance, const BoundaryOperator& bc,
                                           double rcond_min)
    : blocks_(forms.size()), bc_(bc) {
  for (std::size_t j = 0; j < forms.size(); ++j) {
    const auto& f = forms[j];
    Block& b = blocks_[j];
    b.A = f.A;
    const RMat& T = impedance.block(static_cast<int>(j) + 1);
    const int ni = f.num_interior;
    std::vector<Eigen::Triplet<cplx>> trip;
    for (int k = 0; k < f.A.outerSize(); ++k) {
      for (SpMat::InnerIterator it(f.A, k); it; ++it) trip.emplace_back(it.row(), it.col(), it.value());
    }
    for (Eigen::Index r = 0; r < T.rows(); ++r) {
      for (Eigen::Index c = 0; c < T.cols(); ++c) {
        if (T(r, c) != 0.0) trip.emplace_back(ni + r, ni + c, -I * T(r, c));
      }
    }
    b.C.resize(f.size(), f.size());
    b.C.setFromTriplets(trip.begin(), trip.end());
    b.C.makeCompressed();
    const SpMat Ct = b.C.transpose();
    b.symmetric = (b.C - Ct).norm() == 0.0;

    b.lu.compute(b.C);
    if (b.lu.info() != Eigen::Success) {
      throw LocalSolvabilityError(static_cast<int>(j) + 1, 0.0,
                                  "local impedance problem on subdomain " + std::to_string(j) +
                                      " is singular; perturb kappa or gamma");
    }
    if (!b.symmetric) {
      b.lu_t.compute(Ct);
      if (b.lu_t.info() != Eigen::Success) {
        throw LocalSolvabilityError(static_cast<int>(j) + 1, 0.0, "transposed local problem is singular");
      }
    }
    const int jj = static_cast<int>(j);
    auto solve = [&](const Vec& r) { return solve_block(jj, r, false); };
    // C^H x = conj(C^T conj(x))
    auto solve_h = [&](const Vec& r) { return Vec(solve_block(jj, r.conjugate(), true).conjugate()); };
    const double inv_norm = inverse_norm1_estimate(f.size(), solve, solve_h);
    const double rc = 1.0 / (norm1(b.C) * inv_norm);
    rcond_.push_back(rc);
    if (!(rc >= rcond_min)) {
      throw LocalSolvabilityError(jj + 1, rc,
                                  "local impedance problem on subdomain " + std::to_string(j) +
                                      " is too ill-conditioned (rcond " + std::to_string(rc) +
                                      "); unique local solvability fails, perturb kappa or gamma");
    }
  }
}

Vec LocalImpedanceSolver::solve_block(int j, const Vec& rhs, bool transpose) const {
  const Block& b = blocks_[j];
  if (!transpose || b.symmetric) return b.lu.solve(rhs);
  return b.lu_t.solve(rhs);
}

VolumeTuple LocalImpedanceSolver::solve(const VolumeTuple& rhs, bool transpose) const {
  if (rhs.kind != FieldKind::dual) throw InvalidArgument("LocalImpedanceSolver::solve expects a dual tuple");
  VolumeTuple u;
  u.kind = FieldKind::primal;
  if (!transpose || bc_.kind() != BcKind::mixed) {
    // closed forms are symmetric for dirichlet/neumann/robin
    std::tie(u.alpha, u.p) = bc_.impedance_inverse(rhs.alpha, rhs.p);
  }
  if (transpose && bc_.kind() == BcKind::mixed) {
    std::tie(u.alpha, u.p) = bc_.impedance_inverse_dense(rhs.alpha, rhs.p, true);
  }
  for (std::size_t j = 0; j < blocks_.size(); ++j) {
    u.omega.push_back(solve_block(static_cast<int>(j), rhs.omega[j], transpose));
  }
  return u;
}

VolumeTuple LocalImpedanceSolver::apply_A(const VolumeTuple& u, bool transpose) const {
  if (u.kind != FieldKind::primal) throw InvalidArgument("apply_A expects a primal tuple");
  VolumeTuple out;
  out.kind = FieldKind::dual;
  const auto n = u.alpha.size();
  Vec up(2 * n);
  up << u.alpha, u.p;
  const Mat Ag = bc_.matrix();
  const Vec r = transpose ? Vec(Ag.transpose() * up) : Vec(Ag * up);
  out.alpha = r.head(n);
  out.p = r.tail(n);
  for (std::size_t j = 0; j < blocks_.size(); ++j) {
    out.omega.push_back(transpose ? Vec(blocks_[j].A.transpose() * u.omega[j])
                                  : Vec(blocks_[j].A * u.omega[j]));
  }
  return out;
}

SkeletonField ExchangeOperator::project(const SkeletonField& q) const {
  const Vec y = impedance_.g_solve(basis_.adjoint(q));
  return impedance_.apply(basis_.embed(y));
}

SkeletonField ExchangeOperator::apply(const SkeletonField& q) const {
  SkeletonField out = project(q);
  out *= 2.0;
  out -= q;
  return out;
}

ScatterState scattering_with_state(const Problem& pb, const SkeletonField& q, bool transpose) {
  if (q.kind() != FieldKind::dual) throw InvalidArgument("scattering expects a dual field");
  ScatterState st;
  st.u = pb.local.solve(pb.trace.adjoint(q), transpose);
  SkeletonField tv = pb.impedance.apply(pb.trace.apply(st.u));
  tv *= 2.0 * I;
  st.sq = q + tv;
  return st;
}

SkeletonField scattering_apply(const Problem& pb, const SkeletonField& q, bool transpose) {
  if (q.kind() != FieldKind::dual) throw InvalidArgument("scattering expects a dual field");
  // Gamma block in closed form, subdomains through the local solves.
  std::vector<Vec> blocks;
  blocks.push_back(transpose ? pb.bc.scatter_generic(q.block(gamma_block), true)
                             : pb.bc.scatter(q.block(gamma_block)));
  for (int j = 0; j < pb.partition.num_subdomains; ++j) {
    const auto& f = pb.forms[j];
    Vec rhs = Vec::Zero(f.size());
    rhs.tail(f.num_boundary()) = q.block(j + 1);
    const Vec u = pb.local.solve_block(j, rhs, transpose);
    blocks.push_back(q.block(j + 1) + 2.0 * I * (pb.impedance.block(j + 1).cast<cplx>() * u.tail(f.num_boundary())));
  }
  return {FieldKind::dual, std::move(blocks)};
}

SkeletonField skeleton_rhs(const Problem& pb, const LoadTuple& load) {
  const VolumeTuple u = pb.local.solve(load.as_dual_tuple());
  SkeletonField t = pb.impedance.apply(pb.trace.apply(u));
  SkeletonField f = pb.exchange.apply(t);
  f *= -2.0 * I;
  return f;
}

SkeletonField skeleton_operator_apply(const Problem& pb, const SkeletonField& q) {
  return q + pb.exchange.apply(scattering_apply(pb, q));
}

RecoveredVolume recover_volume(const Problem& pb, const SkeletonField& q, const LoadTuple& load) {
  RecoveredVolume rv;
  VolumeTuple rhs = pb.trace.adjoint(q);
  rhs += load.as_dual_tuple();
  rv.tuple = pb.local.solve(rhs);
  SkeletonField tv = pb.impedance.apply(pb.trace.apply(rv.tuple));
  tv *= I;
  rv.p = q + tv;
  rv.p_gamma = rv.tuple.p;

  const int n = pb.mesh.num_vertices();
  rv.u_global = Vec::Zero(n);
  std::vector<bool> set(n, false);
  double mismatch = 0.0;
  auto put = [&](int v, cplx val) {
    if (!set[v]) {
      rv.u_global[v] = val;
      set[v] = true;
    } else {
      mismatch = std::max(mismatch, std::abs(rv.u_global[v] - val));
    }
  };
  // Gamma block first (lowest index), then subdomains in order.
  const auto& gd = pb.partition.gamma_dofs;
  for (std::size_t k = 0; k < gd.size(); ++k) put(gd[k], rv.tuple.alpha[static_cast<Eigen::Index>(k)]);
  for (int j = 0; j < pb.partition.num_subdomains; ++j) {
    const auto& dofs = pb.forms[j].dofs;
    for (std::size_t k = 0; k < dofs.size(); ++k) put(dofs[k], rv.tuple.omega[j][static_cast<Eigen::Index>(k)]);
  }
  rv.mismatch = mismatch;
  return rv;
}

CauchyPair cauchy_pair_from(const Problem& pb, const SkeletonField& q, bool transpose) {
  CauchyPair c;
  c.witness = pb.local.solve(pb.trace.adjoint(q), transpose);
  c.v = pb.trace.apply(c.witness);
  SkeletonField tv = pb.impedance.apply(c.v);
  tv *= I;
  c.p = q + tv;
  return c;
}

double cauchy_membership_residual(const Problem& pb, const SkeletonField& v, const SkeletonField& p) {
  const SkeletonField itv = I * pb.impedance.apply(v);
  const SkeletonField incoming = p - itv;
  const SkeletonField outgoing = p + itv;
  const double scale = pb.impedance.tinv_norm(incoming);
  const double res = pb.impedance.tinv_norm(outgoing - scattering_apply(pb, incoming));
  if (scale == 0.0) return res == 0.0 ? 0.0 : res / (pb.impedance.tinv_norm(outgoing));
  return res / scale;
}

CauchyDecomposition cauchy_decompose(const Problem& pb, const SkeletonField& v, const SkeletonField& p) {
  // w: a volume tuple with trace v (zero interior, zero p on Gamma).
  VolumeTuple w;
  w.kind = FieldKind::primal;
  w.alpha = v.block(gamma_block);
  w.p = Vec::Zero(pb.num_gamma());
  for (int j = 0; j < pb.partition.num_subdomains; ++j) {
    const auto& f = pb.forms[j];
    Vec x = Vec::Zero(f.size());
    x.tail(f.num_boundary()) = v.block(j + 1);
    w.omega.push_back(std::move(x));
  }
  // C z = A w - B^* p, so that A(w - z) = B^*(p - i T B z).
  VolumeTuple rhs = pb.local.apply_A(w);
  rhs -= pb.trace.adjoint(p);
  const VolumeTuple z = pb.local.solve(rhs);

  CauchyDecomposition d;
  d.graph = pb.trace.apply(z);
  SkeletonField p1 = I * pb.impedance.apply(d.graph);
  d.cauchy.witness = w - z;
  d.cauchy.v = v - d.graph;
  d.cauchy.p = p - p1;
  return d;
}

SkeletonField kernel_lift(const Problem& pb, const Vec& z) {
  const int n = pb.mesh.num_vertices();
  const int ng = pb.num_gamma();
  if (z.size() != n + ng) throw InvalidArgument("kernel_lift: expected a vector over [u; p_Gamma]");
  const VolumeTuple rz = pb.restriction.apply(z.head(n), z.tail(ng));
  const SkeletonField v = pb.trace.apply(rz);
  const SkeletonField p = pb.trace.lift_adjoint(pb.local.apply_A(rz));
  return p - I * pb.impedance.apply(v);
}

}  // namespace osm
