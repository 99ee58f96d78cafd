#include "osm/solvers.hpp"

#include <cmath>

#include "osm/problem.hpp"

namespace osm {

SolveResult richardson(const Problem& pb, const SkeletonField& f, double relax, double tol, int maxit) {
  if (!(relax > 0.0 && relax < 1.0)) throw InvalidArgument("richardson: relaxation must lie in (0,1)");
  SolveResult out;
  out.report.method = "richardson";
  out.q = SkeletonField::zeros(pb.index, FieldKind::dual);
  const double fnorm = pb.impedance.tinv_norm(f);
  if (fnorm == 0.0) {
    out.report.residual_history.push_back(0.0);
    out.report.converged = true;
    return out;
  }
  SkeletonField r = f;  // f - (Id + Pi S) q with q = 0
  double res = fnorm;
  out.report.residual_history.push_back(res);
  int growth = 0;
  for (int it = 1; it <= maxit; ++it) {
    SkeletonField step = r;
    step *= relax;
    out.q += step;
    r = f - skeleton_operator_apply(pb, out.q);
    const double next = pb.impedance.tinv_norm(r);
    growth = next > res ? growth + 1 : 0;
    res = next;
    out.report.residual_history.push_back(res);
    out.report.iterations = it;
    if (res <= tol * fnorm) {
      out.report.converged = true;
      break;
    }
    if (growth >= 10) {
      out.report.diverged = true;
      break;
    }
  }
  return out;
}

GmresOutcome gmres(const LinearMap& op, const Vec& b, double tol, int restart, int maxit) {
  GmresOutcome out;
  const auto n = b.size();
  out.x = Vec::Zero(n);
  const double bnorm = b.norm();
  out.history.push_back(bnorm);
  if (bnorm == 0.0) {
    out.converged = true;
    return out;
  }
  restart = std::max(1, std::min<int>(restart, static_cast<int>(n)));
  Vec r = b;
  double beta = bnorm;
  while (out.iterations < maxit) {
    Mat V(n, restart + 1);
    Mat H = Mat::Zero(restart + 1, restart);
    std::vector<cplx> cs(restart), sn(restart);
    Vec g = Vec::Zero(restart + 1);
    g[0] = beta;
    V.col(0) = r / beta;
    int m = 0;
    for (; m < restart && out.iterations < maxit; ++m) {
      Vec w = op(V.col(m));
      for (int i = 0; i <= m; ++i) {
        H(i, m) = V.col(i).dot(w);
        w -= H(i, m) * V.col(i);
      }
      const double hn = w.norm();
      H(m + 1, m) = hn;
      if (hn > 0.0) V.col(m + 1) = w / hn;
      for (int i = 0; i < m; ++i) {
        const cplx t = std::conj(cs[i]) * H(i, m) + std::conj(sn[i]) * H(i + 1, m);
        H(i + 1, m) = -sn[i] * H(i, m) + cs[i] * H(i + 1, m);
        H(i, m) = t;
      }
      const double a = std::abs(H(m, m));
      const double rho = std::hypot(a, hn);
      if (rho == 0.0) {
        cs[m] = 1.0;
        sn[m] = 0.0;
      } else {
        cs[m] = H(m, m) / rho;
        sn[m] = hn / rho;
      }
      H(m, m) = std::conj(cs[m]) * H(m, m) + std::conj(sn[m]) * H(m + 1, m);
      H(m + 1, m) = 0.0;
      g[m + 1] = -sn[m] * g[m];
      g[m] = std::conj(cs[m]) * g[m];
      ++out.iterations;
      const double est = std::abs(g[m + 1]);
      out.history.push_back(est);
      if (est <= tol * bnorm || hn == 0.0) {
        ++m;
        break;
      }
    }
    const Vec y = H.topLeftCorner(m, m).triangularView<Eigen::Upper>().solve(g.head(m));
    out.x += V.leftCols(m) * y;
    r = b - op(out.x);
    beta = r.norm();
    out.history.back() = beta;
    if (beta <= tol * bnorm) {
      out.converged = true;
      break;
    }
  }
  return out;
}

SolveResult gmres_tinv(const Problem& pb, const SkeletonField& f, double tol, int restart, int maxit) {
  SolveResult out;
  out.report.method = "gmres";
  auto op = [&pb](const Vec& w) {
    return pb.impedance.whiten(skeleton_operator_apply(pb, pb.impedance.unwhiten(w)));
  };
  const GmresOutcome g = gmres(op, pb.impedance.whiten(f), tol, restart, maxit);
  out.q = pb.impedance.unwhiten(g.x);
  out.report.iterations = g.iterations;
  out.report.residual_history = g.history;
  out.report.converged = g.converged;
  return out;
}

}  // namespace osm
