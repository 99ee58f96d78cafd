#include "osm/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include "osm/solvers.hpp"

namespace osm {

Mat dense_operator(const Problem& pb, int cap) {
  const int n = pb.index.total_block_size();
  if (n > cap) {
    throw CapExceeded("dense analysis needs " + std::to_string(n) + " skeleton dofs, cap is " +
                      std::to_string(cap));
  }
  Mat M(n, n);
  for (int i = 0; i < n; ++i) {
    Vec e = Vec::Zero(n);
    e[i] = 1.0;
    M.col(i) = pb.impedance.whiten(skeleton_operator_apply(pb, pb.impedance.unwhiten(e)));
  }
  return M;
}

Mat dense_exchange(const Problem& pb, int cap) {
  const int n = pb.index.total_block_size();
  if (n > cap) throw CapExceeded("dense exchange operator exceeds the cap");
  Mat M(n, n);
  for (int i = 0; i < n; ++i) {
    Vec e = Vec::Zero(n);
    e[i] = 1.0;
    M.col(i) = pb.impedance.whiten(pb.exchange.apply(pb.impedance.unwhiten(e)));
  }
  return M;
}

namespace {

RVec singular_values(const Mat& M) {
  Eigen::BDCSVD<Mat> svd(M);
  return svd.singularValues();
}

// L^-1 A L^-T for W = L L^T.
Mat whiten_both(const Mat& A, const RMat& W) {
  Eigen::LLT<RMat> llt(W);
  if (llt.info() != Eigen::Success) throw std::runtime_error("norm Gram is not SPD");
  const Mat L = RMat(llt.matrixL()).cast<cplx>();
  const Mat Y = L.triangularView<Eigen::Lower>().solve(A);
  return L.triangularView<Eigen::Lower>().solve(Y.transpose()).transpose();
}

Vec real_solve(const Eigen::SimplicialLLT<RSpMat>& llt, const Vec& b) {
  Vec x(b.size());
  x.real() = llt.solve(RVec(b.real()));
  x.imag() = llt.solve(RVec(b.imag()));
  return x;
}

// Largest Ritz values of an operator self-adjoint in the W inner product,
// Lanczos with full reorthogonalisation.
RVec lanczos_top(const LinearMap& op, const RSpMat& W, int n, int steps) {
  steps = std::min(steps, n);
  std::mt19937_64 rng(12345);
  std::normal_distribution<double> nd;
  auto wdot = [&W](const Vec& a, const Vec& b) { return a.dot(W.cast<cplx>() * b); };
  Vec v(n);
  for (int i = 0; i < n; ++i) v[i] = cplx(nd(rng), nd(rng));
  v /= std::sqrt(std::real(wdot(v, v)));
  std::vector<Vec> basis{v};
  Mat H = Mat::Zero(steps, steps);
  int m = 0;
  for (; m < steps; ++m) {
    Vec w = op(basis[m]);
    for (int pass = 0; pass < 2; ++pass) {
      for (int i = 0; i <= m; ++i) {
        const cplx h = wdot(basis[i], w);
        H(i, m) += h;
        w -= h * basis[i];
      }
    }
    const double beta = std::sqrt(std::max(0.0, std::real(wdot(w, w))));
    if (m + 1 == steps || beta < 1e-14 * std::abs(H(m, m))) {
      ++m;
      break;
    }
    if (m + 1 < steps) H(m + 1, m) = beta;
    basis.push_back(w / beta);
  }
  const Mat Hm = H.topLeftCorner(m, m);
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (Hm + Hm.adjoint()));
  RVec vals = es.eigenvalues().reverse();
  return vals;
}

}  // namespace

double infsup_skeleton(const Mat& M) {
  const RVec s = singular_values(M);
  return s.minCoeff();
}

double coercivity_constant(const Mat& M) {
  const Mat Hm = 0.5 * (M + M.adjoint());
  Eigen::SelfAdjointEigenSolver<Mat> es(Hm, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

int count_below(const RVec& s, double threshold) {
  const double cut = threshold * s.maxCoeff();
  int c = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s[i] < cut) ++c;
  }
  return c;
}

PrimarySpectrum primary_spectrum(const Problem& pb, const AnalysisOptions& opt) {
  const PrimarySystem sys = pb.primary();
  const RSpMat W = pb.primary_gram();
  const int n = static_cast<int>(sys.matrix.rows());
  PrimarySpectrum out;
  if (n <= opt.dense_cap) {
    const Mat X = whiten_both(Mat(sys.matrix), RMat(W));
    const RVec s = singular_values(X);
    const RVec st = singular_values(X.transpose());
    out.sigma_min = s.minCoeff();
    out.sigma_max = s.maxCoeff();
    out.kernel_dim = count_below(s, opt.svd_threshold);
    out.kernel_dim_transpose = count_below(st, opt.svd_threshold);
    out.dense = true;
    return out;
  }
  out.dense = false;
  Eigen::SimplicialLLT<RSpMat> wl(W);
  Eigen::SparseLU<SpMat> lu(sys.matrix);
  const SpMat AH = sys.matrix.adjoint();
  Eigen::SparseLU<SpMat> luh(AH);
  if (lu.info() != Eigen::Success || luh.info() != Eigen::Success) {
    out.sigma_min = 0.0;
    out.kernel_dim = out.kernel_dim_transpose = 1;
    return out;
  }
  const SpMat A = sys.matrix;
  auto forward = [&](const Vec& z) { return real_solve(wl, AH * real_solve(wl, A * z)); };
  auto inverse = [&](const Vec& z) {
    const Vec wz = W.cast<cplx>() * z;
    return Vec(lu.solve(Vec(W.cast<cplx>() * Vec(luh.solve(wz)))));
  };
  const RVec top = lanczos_top(forward, W, n, opt.lanczos_steps);
  const RVec inv = lanczos_top(inverse, W, n, opt.lanczos_steps);
  out.sigma_max = std::sqrt(top[0]);
  out.sigma_min = 1.0 / std::sqrt(inv[0]);
  int k = 0;
  for (Eigen::Index i = 0; i < inv.size(); ++i) {
    if (inv[i] > 0.0 && 1.0 / std::sqrt(inv[i]) < opt.svd_threshold * out.sigma_max) ++k;
  }
  out.kernel_dim = out.kernel_dim_transpose = k;
  return out;
}

double continuity_modulus_A(const Problem& pb) {
  const int ng = pb.num_gamma();
  RMat Wg = RMat::Zero(2 * ng, 2 * ng);
  Wg.topLeftCorner(ng, ng) = pb.t_gamma;
  Wg.bottomRightCorner(ng, ng) = pb.t_gamma.llt().solve(RMat::Identity(ng, ng));
  Wg = (0.5 * (Wg + Wg.transpose())).eval();
  double best = singular_values(whiten_both(pb.bc.matrix(), Wg)).maxCoeff();
  for (const auto& f : pb.forms) {
    best = std::max(best, singular_values(whiten_both(Mat(f.A), RMat(f.H))).maxCoeff());
  }
  return best;
}

SpectralReport verify_estimates(const Problem& pb, const AnalysisOptions& opt) {
  SpectralReport r;
  r.n_sigma = pb.index.total_block_size();
  const Mat M = dense_operator(pb, opt.dense_cap);
  const RVec s = singular_values(M);
  const RVec st = singular_values(M.transpose());
  r.infsup_skeleton = s.minCoeff();
  r.sigma_max_skeleton = s.maxCoeff();
  r.coercivity = coercivity_constant(M);
  r.kernel_skeleton = count_below(s, opt.svd_threshold);
  r.kernel_skeleton_transpose = count_below(st, opt.svd_threshold);

  const PrimarySpectrum ps = primary_spectrum(pb, opt);
  r.n_primary = pb.mesh.num_vertices() + pb.num_gamma();
  r.infsup_primary = ps.sigma_min;
  r.sigma_max_primary = ps.sigma_max;
  r.kernel_primary = ps.kernel_dim;
  r.kernel_primary_transpose = ps.kernel_dim_transpose;
  r.norm_A = continuity_modulus_A(pb);

  r.pass_thm_final = r.infsup_primary <= (1.0 + r.norm_A) * r.infsup_skeleton + 1e-9;
  r.pass_cor_coercivity = r.coercivity >= 0.5 * r.infsup_skeleton * r.infsup_skeleton - 1e-9;
  r.pass_kernel = r.kernel_primary == r.kernel_skeleton;
  r.pass_index = r.kernel_primary == r.kernel_primary_transpose &&
                 r.kernel_skeleton == r.kernel_skeleton_transpose;
  return r;
}

double dirichlet_resonance(const ProblemSetup& setup) {
  const Mesh mesh = build_rect_mesh(setup.nx, setup.ny, setup.width, setup.height);
  const GlobalForms g = assemble_global(mesh, Coefficients::constant(0.0, setup.gamma));
  std::vector<bool> on_gamma(mesh.num_vertices(), false);
  for (const auto& e : mesh.boundary_edges) on_gamma[e.v[0]] = on_gamma[e.v[1]] = true;
  std::vector<int> inner;
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    if (!on_gamma[v]) inner.push_back(v);
  }
  if (inner.empty()) throw InvalidArgument("dirichlet_resonance: mesh has no interior vertex");
  const RMat K = RMat(g.K)(inner, inner);
  const RMat M = RMat(g.M)(inner, inner);
  Eigen::GeneralizedSelfAdjointEigenSolver<RMat> es(K, M, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

int sweep_resolution(double k, int multiple) {
  const int base = static_cast<int>(std::ceil(10.0 * k / (2.0 * M_PI)));
  return ((base + multiple - 1) / multiple) * multiple;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const auto n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

SweepResult sweep_wavenumber(const ProblemSetup& base, const std::vector<double>& ks,
                             const AnalysisOptions& opt) {
  if (ks.empty()) throw InvalidArgument("sweep: empty wavenumber list");
  SweepResult out;
  for (double k : ks) {
    if (!(k > 0.0)) throw InvalidArgument("sweep: wavenumbers must be positive");
    ProblemSetup s = base;
    s.k = k;
    s.kappa_sq = nullptr;
    s.kappa_sq_affine = true;
    s.gamma = 1.0 / k;
    s.bc = BcKind::robin;
    s.lambda_scale = k;
    s.nx = sweep_resolution(k, std::lcm(s.px, s.py));
    s.ny = s.nx;
    const Problem pb(s);
    out.rows.push_back({k, s.nx, verify_estimates(pb, opt)});
  }
  if (ks.size() >= 2) {
    std::vector<double> inf, coe;
    for (const auto& r : out.rows) {
      inf.push_back(r.report.infsup_skeleton);
      coe.push_back(r.report.coercivity);
    }
    out.has_slopes = true;
    out.slope_infsup = loglog_slope(ks, inf);
    out.slope_coercivity = loglog_slope(ks, coe);
  }
  return out;
}

}  // namespace osm
