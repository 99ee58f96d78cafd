#include "osm/verify.hpp"

#include <cmath>
#include <cstdio>
#include <random>

#include <Eigen/SparseLU>

#include "osm/solvers.hpp"

namespace osm {

namespace {

class Draw {
 public:
  explicit Draw(std::uint64_t seed) : gen_(seed) {}

  Vec vec(Eigen::Index n) {
    Vec v(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double re = nd_(gen_);
      v[i] = cplx(re, nd_(gen_));
    }
    return v;
  }

  SkeletonField field(const SkeletonIndex& idx, FieldKind kind) {
    return SkeletonField::from_flat(idx, kind, vec(idx.total_block_size()));
  }

 private:
  std::mt19937_64 gen_;
  std::normal_distribution<double> nd_;
};

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

SuiteResult below(std::string name, double worst, double tol) {
  return {std::move(name), worst <= tol, worst, tol, ""};
}

VolumeTuple conj(VolumeTuple t) {
  t.alpha = t.alpha.conjugate();
  t.p = t.p.conjugate();
  for (auto& w : t.omega) w = w.conjugate();
  return t;
}

SuiteResult exchange_axioms(const Problem& pb, Draw& d) {
  double worst = 0.0;
  for (int r = 0; r < 100; ++r) {
    const SkeletonField q = d.field(pb.index, FieldKind::dual);
    const SkeletonField pq = pb.exchange.apply(q);
    const double nq = pb.impedance.tinv_norm(q);
    worst = std::max(worst, pb.impedance.tinv_norm(pb.exchange.apply(pq) - q) / nq);
    worst = std::max(worst, std::abs(pb.impedance.tinv_norm(pq) / nq - 1.0));
  }
  return below("exchange_involution_isometry", worst, 1e-10);
}

SuiteResult exchange_fixed_spaces(const Problem& pb, Draw& d) {
  double worst = 0.0;
  for (int r = 0; r < 20; ++r) {
    const SkeletonField tx = pb.impedance.apply(pb.basis.embed(d.vec(pb.index.num_skeleton())));
    worst = std::max(worst, pb.impedance.tinv_norm(pb.exchange.apply(tx) - tx) / pb.impedance.tinv_norm(tx));
    const SkeletonField raw = d.field(pb.index, FieldKind::dual);
    const SkeletonField k = raw - pb.exchange.project(raw);
    worst = std::max(worst, pb.impedance.tinv_norm(pb.exchange.apply(k) + k) / pb.impedance.tinv_norm(k));
  }
  return below("exchange_fixed_spaces", worst, 1e-10);
}

SuiteResult energy_identity(const Problem& pb, Draw& d) {
  double worst = 0.0;
  for (int r = 0; r < 100; ++r) {
    const SkeletonField q = d.field(pb.index, FieldKind::dual);
    const ScatterState st = scattering_with_state(pb, q);
    const double im = std::imag(pair_volume(pb.local.apply_A(st.u), conj(st.u)));
    const double sq = std::pow(pb.impedance.tinv_norm(st.sq), 2);
    const double qq = std::pow(pb.impedance.tinv_norm(q), 2);
    worst = std::max(worst, std::abs(sq + 4.0 * std::abs(im) - qq) / qq);
  }
  return below("scattering_energy_identity", worst, 1e-10);
}

SuiteResult boundary_scattering(const Problem& pb, Draw& d) {
  double worst = 0.0;
  for (int r = 0; r < 20; ++r) {
    const Vec q = d.vec(pb.num_gamma());
    worst = std::max(worst, (pb.bc.scatter(q) - pb.bc.scatter_generic(q)).norm() / q.norm());
  }
  return below("boundary_scattering_closed_form", worst, 1e-10);
}

SuiteResult boundary_dissipation(const Problem& pb, Draw& d) {
  const Mat A = pb.bc.matrix();
  double worst = -1e300;
  for (int r = 0; r < 50; ++r) {
    const Vec u = d.vec(A.rows());
    const double im = std::imag((u.conjugate().transpose() * (A * u))(0));
    worst = std::max(worst, im / u.squaredNorm());
  }
  SuiteResult s = below("boundary_dissipation", worst, 1e-12);
  s.note = "max Im<A_Gamma u, conj u> / |u|^2";
  return s;
}

SuiteResult transmission(const Problem& pb, Draw& d) {
  double worst = 0.0;
  double weakest = 1e300;
  const int nsk = pb.index.num_skeleton();
  for (int r = 0; r < 50; ++r) {
    const SkeletonField v = pb.basis.embed(d.vec(nsk));
    const SkeletonField raw = d.field(pb.index, FieldKind::dual);
    const SkeletonField p = raw - pb.exchange.project(raw);
    const SkeletonField itv = I * pb.impedance.apply(v);
    const SkeletonField lhs = itv - p;
    worst = std::max(worst, pb.impedance.tinv_norm(lhs - pb.exchange.apply(p + itv)) / pb.impedance.tinv_norm(lhs));
    // break continuity at one interface position
    SkeletonField bad = v;
    const int b = 1 + r % (pb.index.num_blocks() - 1);
    bad.block(b)[r % bad.block(b).size()] += 1.0;
    const SkeletonField itb = I * pb.impedance.apply(bad);
    const SkeletonField l2 = itb - p;
    weakest = std::min(weakest, pb.impedance.tinv_norm(l2 - pb.exchange.apply(p + itb)) / pb.impedance.tinv_norm(l2));
  }
  SuiteResult s = below("transmission_characterization", worst, 1e-11);
  s.pass = s.pass && weakest >= 1e-3;
  s.note = "violating pairs fail by at least " + sci(weakest);
  return s;
}

SuiteResult traces(const Problem& pb, Draw& d) {
  double worst = 0.0;
  for (int r = 0; r < 20; ++r) {
    const SkeletonField v = d.field(pb.index, FieldKind::primal);
    worst = std::max(worst, (pb.trace.apply(pb.trace.lift(v)) - v).coeff_norm() / v.coeff_norm());
    const SkeletonField p = d.field(pb.index, FieldKind::dual);
    const VolumeTuple u = flat_to_tuple(pb.restriction, FieldKind::primal, d.vec(pb.restriction.tuple_size()));
    const cplx a = pair_volume(pb.trace.adjoint(p), u);
    const cplx b = duality_pair(p, pb.trace.apply(u));
    worst = std::max(worst, std::abs(a - b) / (p.coeff_norm() * u.coeff_norm()));
  }
  return below("trace_lifting_adjoint", worst, 1e-12);
}

SuiteResult factorization(const Problem& pb) {
  const SpMat direct = pb.primary().matrix;
  const SpMat factored = assemble_primary_factored(pb.restriction, pb.forms, pb.bc.matrix());
  const double scale = Mat(direct).cwiseAbs().maxCoeff();
  const double worst = Mat(direct - factored).cwiseAbs().maxCoeff() / scale;
  return below("primary_factorization", worst, 1e-13);
}

SuiteResult local_solvability(const Problem& pb) {
  double lo = 1e300;
  for (int j = 0; j < pb.local.num_subdomains(); ++j) lo = std::min(lo, pb.local.rcond(j));
  SuiteResult s{"local_solvability", lo >= pb.setup.rcond_min, lo, pb.setup.rcond_min, "smallest rcond"};
  return s;
}

SuiteResult cauchy(const Problem& pb, Draw& d) {
  double worst = 0.0;
  for (int r = 0; r < 20; ++r) {
    const CauchyPair c = cauchy_pair_from(pb, d.field(pb.index, FieldKind::dual));
    worst = std::max(worst, cauchy_membership_residual(pb, c.v, c.p));
  }
  return below("cauchy_membership", worst, 1e-10);
}

SuiteResult decomposition(const Problem& pb, Draw& d) {
  double worst = 0.0;
  for (int r = 0; r < 10; ++r) {
    const SkeletonField v = d.field(pb.index, FieldKind::primal);
    const SkeletonField p = d.field(pb.index, FieldKind::dual);
    const CauchyDecomposition dc = cauchy_decompose(pb, v, p);
    const SkeletonField v2 = dc.cauchy.v + dc.graph;
    const SkeletonField p2 = dc.cauchy.p + I * pb.impedance.apply(dc.graph);
    worst = std::max(worst, (v2 - v).coeff_norm() / v.coeff_norm());
    worst = std::max(worst, (p2 - p).coeff_norm() / p.coeff_norm());
    worst = std::max(worst, 0.01 * cauchy_membership_residual(pb, dc.cauchy.v, dc.cauchy.p));
  }
  SuiteResult s = below("cauchy_decomposition", worst, 1e-12);
  s.note = "recomposition defect, membership residual scaled by 1e-2";
  return s;
}

SuiteResult polarity(const Problem& pb, Draw& d) {
  std::vector<CauchyPair> direct, transposed;
  for (int r = 0; r < 10; ++r) {
    direct.push_back(cauchy_pair_from(pb, d.field(pb.index, FieldKind::dual)));
    transposed.push_back(cauchy_pair_from(pb, d.field(pb.index, FieldKind::dual), true));
  }
  double worst = 0.0;
  for (const auto& c : direct) {
    for (const auto& t : transposed) {
      const double scale = (pb.impedance.t_norm(c.v) + pb.impedance.tinv_norm(c.p)) *
                           (pb.impedance.t_norm(t.v) + pb.impedance.tinv_norm(t.p));
      worst = std::max(worst, std::abs(skew_pair(c.v, c.p, t.v, t.p)) / scale);
    }
  }
  return below("cauchy_self_polarity", worst, 1e-10);
}

SuiteResult equivalence(const Problem& pb) {
  const SkeletonField f = skeleton_rhs(pb, pb.load);
  const SolveResult sol = gmres_tinv(pb, f, 1e-12, 200, 2000);
  const RecoveredVolume rv = recover_volume(pb, sol.q, pb.load);
  const PrimarySystem sys = pb.primary();
  Eigen::SparseLU<SpMat> lu(sys.matrix);
  const Vec z = lu.solve(sys.rhs);
  Vec zs(z.size());
  zs << rv.u_global, rv.p_gamma;
  const double nz = pb.primary_norm(z);
  const double err = nz > 0.0 ? pb.primary_norm(zs - z) / nz : pb.primary_norm(zs);
  SuiteResult s = below("formulation_equivalence", err, 1e-8);
  s.pass = s.pass && sol.report.converged && rv.mismatch <= 1e-9;
  s.note = "interface mismatch " + sci(rv.mismatch);
  return s;
}

SuiteResult estimates(const Problem& pb, const AnalysisOptions& opt) {
  if (pb.index.total_block_size() > opt.dense_cap) {
    return {"spectral_estimates", true, 0.0, 0.0, "skipped: skeleton dimension above dense cap"};
  }
  const SpectralReport r = verify_estimates(pb, opt);
  const double chain = r.infsup_primary - (1.0 + r.norm_A) * r.infsup_skeleton;
  const double coer = 0.5 * r.infsup_skeleton * r.infsup_skeleton - r.coercivity;
  SuiteResult s{"spectral_estimates", r.all_pass(), std::max(chain, coer), 1e-9,
                "kernels " + std::to_string(r.kernel_primary) + "/" + std::to_string(r.kernel_skeleton)};
  return s;
}

}  // namespace

std::vector<SuiteResult> run_verify(const Problem& pb, std::uint64_t seed, const AnalysisOptions& opt) {
  Draw d(seed);
  std::vector<SuiteResult> out;
  out.push_back(exchange_axioms(pb, d));
  out.push_back(exchange_fixed_spaces(pb, d));
  out.push_back(energy_identity(pb, d));
  out.push_back(boundary_scattering(pb, d));
  out.push_back(boundary_dissipation(pb, d));
  out.push_back(transmission(pb, d));
  out.push_back(traces(pb, d));
  out.push_back(factorization(pb));
  out.push_back(local_solvability(pb));
  out.push_back(cauchy(pb, d));
  out.push_back(decomposition(pb, d));
  out.push_back(polarity(pb, d));
  out.push_back(equivalence(pb));
  out.push_back(estimates(pb, opt));
  return out;
}

}  // namespace osm
