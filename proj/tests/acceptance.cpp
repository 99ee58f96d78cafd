// One line per acceptance criterion. Usage: acceptance [--only N] [--expect-fail N ...]
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <Eigen/SparseLU>

#include "osm/problem.hpp"
#include "osm/solvers.hpp"
#include "osm/spectral.hpp"

using namespace osm;

namespace {

// pinned tolerances
constexpr double tol_exchange = 1e-10;
constexpr double tol_energy = 1e-10;
constexpr double tol_lossless = 1e-11;
constexpr double tol_transmission = 1e-11;
constexpr double gap_transmission = 1e-3;
constexpr double tol_equivalence = 1e-8;
constexpr double tol_mismatch = 1e-9;
constexpr double tol_estimate = 1e-9;
constexpr int cap_coercivity = 500;
constexpr double kernel_rel = 1e-8;
constexpr double slope_infsup_lo = -1.4, slope_infsup_hi = -0.6;
constexpr double slope_coer_lo = -2.6, slope_coer_hi = -1.4;
constexpr double tol_richardson = 1e-8;
constexpr double tol_factor = 1e-13;
constexpr double tol_recompose = 1e-12;
constexpr double tol_membership = 1e-10;

std::mt19937_64 gen(42);

Vec random_vec(Eigen::Index n) {
  std::normal_distribution<double> nd;
  Vec v(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double re = nd(gen);
    v[i] = cplx(re, nd(gen));
  }
  return v;
}

SkeletonField random_field(const SkeletonIndex& idx, FieldKind kind) {
  return SkeletonField::from_flat(idx, kind, random_vec(idx.total_block_size()));
}

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

ProblemSetup loaded(BcKind kind) {
  ProblemSetup s = reference_setup();
  s.bc = kind;
  s.dirichlet_part = [](Point x) { return x.x < 1e-12 || x.y < 1e-12; };
  s.source = [](Point x) { return cplx(1.0 + x.x * x.y, 0.5 - x.y); };
  s.g_d = [](Point x) { return cplx(x.x - x.y, 0.0); };
  s.g_n = [](Point x) { return cplx(0.2, x.x); };
  return s;
}

VolumeTuple conj(VolumeTuple t) {
  t.alpha = t.alpha.conjugate();
  t.p = t.p.conjugate();
  for (auto& w : t.omega) w = w.conjugate();
  return t;
}

// Dense T and E, used as an independent oracle for the exchange operator.
Vec dense_exchange_apply(const Problem& pb, const SkeletonField& q) {
  const int n = pb.index.total_block_size();
  RMat T = RMat::Zero(n, n);
  int off = 0;
  for (int b = 0; b < pb.impedance.num_blocks(); ++b) {
    const auto m = pb.impedance.block(b).rows();
    T.block(off, off, m, m) = pb.impedance.block(b);
    off += static_cast<int>(m);
  }
  const RMat E(pb.basis.matrix());
  const RMat G = E.transpose() * T * E;
  const Vec x = q.flatten();
  const Vec etq = E.transpose().cast<cplx>() * x;
  const Vec y = G.cast<cplx>().ldlt().solve(etq);
  return 2.0 * (T.cast<cplx>() * (E.cast<cplx>() * y)) - x;
}

Outcome c1() {
  const auto t0 = std::chrono::steady_clock::now();
  const Problem pb(reference_setup());
  double worst = 0.0;
  double oracle = 0.0;
  for (int r = 0; r < 100; ++r) {
    const SkeletonField q = random_field(pb.index, FieldKind::dual);
    const SkeletonField pq = pb.exchange.apply(q);
    const double nq = pb.impedance.tinv_norm(q);
    worst = std::max(worst, pb.impedance.tinv_norm(pb.exchange.apply(pq) - q) / nq);
    worst = std::max(worst, std::abs(pb.impedance.tinv_norm(pq) / nq - 1.0));
    if (r < 10) {
      const Vec ref = dense_exchange_apply(pb, q);
      oracle = std::max(oracle, (pq.flatten() - ref).norm() / ref.norm());
    }
  }
  const double secs = seconds_since(t0);
  return {worst <= tol_exchange && oracle <= 1e-10 && secs < 5.0,
          fmt("max defect %.2e (tol %.0e), dense oracle %.2e, %.2f s", worst, tol_exchange, oracle, secs)};
}

double energy_defect(const Problem& pb, const SkeletonField& q) {
  const ScatterState st = scattering_with_state(pb, q);
  const double im = std::imag(pair_volume(pb.local.apply_A(st.u), conj(st.u)));
  const double sq = std::pow(pb.impedance.tinv_norm(st.sq), 2);
  const double qq = std::pow(pb.impedance.tinv_norm(q), 2);
  return std::abs(sq + 4.0 * std::abs(im) - qq) / qq;
}

Outcome c2() {
  const auto t0 = std::chrono::steady_clock::now();
  const Problem pb(reference_setup());
  double worst = 0.0;
  for (int r = 0; r < 100; ++r) worst = std::max(worst, energy_defect(pb, random_field(pb.index, FieldKind::dual)));
  // real kappa^2 and a lossless boundary operator: S is an isometry
  double lossless = 0.0;
  for (BcKind kind : {BcKind::dirichlet, BcKind::neumann, BcKind::mixed}) {
    const Problem lp(loaded(kind));
    for (int r = 0; r < 20; ++r) {
      const SkeletonField q = random_field(lp.index, FieldKind::dual);
      lossless = std::max(lossless, std::abs(lp.impedance.tinv_norm(scattering_apply(lp, q)) /
                                             lp.impedance.tinv_norm(q) - 1.0));
    }
  }
  const double secs = seconds_since(t0);
  return {worst <= tol_energy && lossless <= tol_lossless && secs < 5.0,
          fmt("energy defect %.2e (tol %.0e), lossless |S| defect %.2e (tol %.0e)", worst, tol_energy, lossless,
              tol_lossless) + fmt(", %.2f s", secs)};
}

Outcome c3() {
  const Problem pb(reference_setup());
  double worst = 0.0;
  double weakest = 1e300;
  for (int r = 0; r < 50; ++r) {
    const SkeletonField v = pb.basis.embed(random_vec(pb.index.num_skeleton()));
    const SkeletonField raw = random_field(pb.index, FieldKind::dual);
    const SkeletonField p = raw - pb.exchange.project(raw);
    const SkeletonField itv = I * pb.impedance.apply(v);
    worst = std::max(worst, pb.impedance.tinv_norm((itv - p) - pb.exchange.apply(p + itv)) /
                                pb.impedance.tinv_norm(itv - p));
  }
  for (int r = 0; r < 50; ++r) {
    // random Dirichlet traces that disagree between neighbours, with a single-trace-compatible p
    const SkeletonField v = random_field(pb.index, FieldKind::primal);
    const SkeletonField raw = random_field(pb.index, FieldKind::dual);
    const SkeletonField p = raw - pb.exchange.project(raw);
    const SkeletonField itv = I * pb.impedance.apply(v);
    weakest = std::min(weakest, pb.impedance.tinv_norm((itv - p) - pb.exchange.apply(p + itv)) /
                                    pb.impedance.tinv_norm(itv - p));
  }
  return {worst <= tol_transmission && weakest >= gap_transmission,
          fmt("admissible defect %.2e (tol %.0e), violating pairs >= %.2e (need %.0e)", worst, tol_transmission,
              weakest, gap_transmission)};
}

Outcome c4() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  double mismatch = 0.0;
  bool converged = true;
  for (BcKind kind : {BcKind::robin, BcKind::dirichlet, BcKind::neumann, BcKind::mixed}) {
    const Problem pb(loaded(kind));
    const SolveResult sol = gmres_tinv(pb, skeleton_rhs(pb, pb.load), 1e-10, 200, 2000);
    converged = converged && sol.report.converged;
    const RecoveredVolume rv = recover_volume(pb, sol.q, pb.load);
    const PrimarySystem sys = pb.primary();
    Eigen::SparseLU<SpMat> lu(sys.matrix);
    const Vec z = lu.solve(sys.rhs);
    const int n = pb.mesh.num_vertices();
    const RSpMat H = assemble_global(pb.mesh, pb.coeffs).H;
    const Vec e = rv.u_global - z.head(n);
    auto hnorm = [&](const Vec& x) {
      return std::sqrt(x.real().dot(H * x.real()) + x.imag().dot(H * x.imag()));
    };
    worst = std::max(worst, hnorm(e) / hnorm(z.head(n)));
    mismatch = std::max(mismatch, rv.mismatch);
  }
  const double secs = seconds_since(t0);
  return {converged && worst <= tol_equivalence && mismatch <= tol_mismatch && secs < 30.0,
          fmt("max rel H1 error %.2e (tol %.0e), mismatch %.2e (tol %.0e)", worst, tol_equivalence, mismatch,
              tol_mismatch) + fmt(", %.2f s", secs)};
}

Outcome c5() {
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<ProblemSetup> cases{reference_setup(), loaded(BcKind::neumann), loaded(BcKind::mixed)};
  ProblemSetup fine = reference_setup();
  fine.nx = fine.ny = 16;
  fine.px = fine.py = 4;
  cases.push_back(fine);
  double margin = 1e300;
  int largest = 0;
  for (const auto& s : cases) {
    const Problem pb(s);
    if (pb.index.total_block_size() > cap_coercivity) continue;
    largest = std::max(largest, pb.index.total_block_size());
    const Mat M = dense_operator(pb, cap_coercivity);
    const double sig = infsup_skeleton(M);
    margin = std::min(margin, coercivity_constant(M) - 0.5 * sig * sig);
  }
  const double secs = seconds_since(t0);
  return {margin >= -tol_estimate && secs < 60.0,
          fmt("min (coercivity - sigma^2/2) %.3e over 4 cases, largest n_sigma %.0f, %.2f s", margin, largest, secs)};
}

Outcome c6() {
  ProblemSetup neu = reference_setup();
  neu.bc = BcKind::neumann;
  neu.k = 3.0;
  neu.gamma = 1.0 / 3.0;
  neu.lambda_scale = 3.0;
  ProblemSetup mix = reference_setup();
  mix.bc = BcKind::mixed;
  mix.dirichlet_part = [](Point x) { return x.x < 1e-12; };
  bool pass = true;
  std::string detail;
  for (const auto& [name, s] : std::vector<std::pair<const char*, ProblemSetup>>{
           {"robin", reference_setup()}, {"neumann", neu}, {"mixed", mix}}) {
    const Problem pb(s);
    const SpectralReport r = verify_estimates(pb);
    const double rhs = (1.0 + r.norm_A) * r.infsup_skeleton;
    pass = pass && r.infsup_primary <= rhs + tol_estimate;
    detail += std::string(detail.empty() ? "" : ", ") + name + fmt(" %.3e <= %.3e", r.infsup_primary, rhs);
  }
  return {pass, detail};
}

Outcome c7() {
  ProblemSetup s = reference_setup();
  s.bc = BcKind::dirichlet;
  const double lam = dirichlet_resonance(s);
  AnalysisOptions opt;
  opt.svd_threshold = kernel_rel;
  s.kappa_sq = [lam](Point) { return cplx(lam); };
  const Problem at(s);
  const SpectralReport r0 = verify_estimates(at, opt);
  const double k1 = 1.01 * std::sqrt(lam);
  s.kappa_sq = [k1](Point) { return cplx(k1 * k1); };
  const Problem off(s);
  const SpectralReport r1 = verify_estimates(off, opt);
  const bool pass = r0.kernel_primary == 1 && r0.kernel_skeleton == 1 && r1.kernel_primary == 0 &&
                    r1.kernel_skeleton == 0;
  return {pass, fmt("at resonance %.0f/%.0f, kappa +1%% %.0f/%.0f (primary/skeleton)", r0.kernel_primary,
                    r0.kernel_skeleton, r1.kernel_primary, r1.kernel_skeleton)};
}

Outcome c8() {
  const auto t0 = std::chrono::steady_clock::now();
  const SweepResult sw = sweep_wavenumber(reference_setup(), {5.0, 10.0, 20.0, 40.0});
  const double secs = seconds_since(t0);
  const bool inf_ok = sw.slope_infsup >= slope_infsup_lo && sw.slope_infsup <= slope_infsup_hi;
  const bool coe_ok = sw.slope_coercivity >= slope_coer_lo && sw.slope_coercivity <= slope_coer_hi;
  return {inf_ok && coe_ok && secs < 600.0,
          fmt("slope infsup %.3f (need [%.1f, %.1f]), ", sw.slope_infsup, slope_infsup_lo, slope_infsup_hi) +
              fmt("slope coercivity %.3f (need [%.1f, %.1f]), %.1f s", sw.slope_coercivity, slope_coer_lo,
                  slope_coer_hi, secs)};
}

Outcome c9() {
  ProblemSetup s = reference_setup();
  s.source = [](Point) { return cplx(1.0); };
  const Problem pb(s);
  const SkeletonField f = skeleton_rhs(pb, pb.load);
  const SolveResult r = richardson(pb, f, 0.5, tol_richardson, 20000);
  bool monotone = true;
  const auto& h = r.report.residual_history;
  for (std::size_t i = 1; i < h.size(); ++i) monotone = monotone && h[i] <= h[i - 1];
  // residual recomputed from scratch
  const double res = pb.impedance.tinv_norm(skeleton_operator_apply(pb, r.q) - f) / pb.impedance.tinv_norm(f);
  const SolveResult g = gmres_tinv(pb, f, tol_richardson, 100, 1000);
  const bool pass = monotone && r.report.converged && res <= tol_richardson * 1.01 && g.report.converged &&
                    g.report.iterations < r.report.iterations;
  return {pass, fmt("richardson %.0f its (monotone %.0f, residual %.2e), gmres %.0f its", r.report.iterations,
                    monotone ? 1.0 : 0.0, res, g.report.iterations)};
}

Outcome c10() {
  double factor = 0.0;
  for (BcKind kind : {BcKind::robin, BcKind::dirichlet, BcKind::neumann, BcKind::mixed}) {
    const Problem pb(loaded(kind));
    const Mat direct(pb.primary().matrix);
    const SpMat R = pb.restriction.matrix();
    const SpMat blocks = block_diagonal(pb.bc.matrix(), pb.forms);
    const Mat rar = Mat(SpMat(R.transpose() * blocks * R));
    factor = std::max(factor, (direct - rar).cwiseAbs().maxCoeff() / direct.cwiseAbs().maxCoeff());
  }
  const Problem pb(reference_setup());
  double recompose = 0.0;
  double member = 0.0;
  for (int r = 0; r < 20; ++r) {
    const SkeletonField v = random_field(pb.index, FieldKind::primal);
    const SkeletonField p = random_field(pb.index, FieldKind::dual);
    const CauchyDecomposition d = cauchy_decompose(pb, v, p);
    recompose = std::max(recompose, (d.cauchy.v + d.graph - v).coeff_norm() / v.coeff_norm());
    recompose = std::max(recompose,
                         (d.cauchy.p + I * pb.impedance.apply(d.graph) - p).coeff_norm() / p.coeff_norm());
    // Cauchy part: witness w with B w = v2 and A w = B^* p2
    const VolumeTuple aw = pb.local.apply_A(d.cauchy.witness);
    const VolumeTuple btp = pb.trace.adjoint(d.cauchy.p);
    member = std::max(member, (aw - btp).coeff_norm() / std::max(aw.coeff_norm(), btp.coeff_norm()));
    member = std::max(member, (pb.trace.apply(d.cauchy.witness) - d.cauchy.v).coeff_norm() / v.coeff_norm());
    member = std::max(member, cauchy_membership_residual(pb, d.cauchy.v, d.cauchy.p));
  }
  return {factor <= tol_factor && recompose <= tol_recompose && member <= tol_membership,
          fmt("R*AR defect %.2e (tol %.0e), recomposition %.2e (tol %.0e), ", factor, tol_factor, recompose,
              tol_recompose) + fmt("membership %.2e (tol %.0e)", member, tol_membership)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"exchange operator involution and isometry", c1},
      {"scattering energy identity", c2},
      {"transmission characterization", c3},
      {"skeleton and monolithic solutions agree", c4},
      {"coercivity inequality", c5},
      {"inf-sup estimate chain", c6},
      {"kernel dimensions at resonance", c7},
      {"k-scaling slopes of inf-sup and coercivity", c8},
      {"richardson monotone, gmres faster", c9},
      {"factorization and cauchy decomposition", c10},
  };
  int only = 0;
  std::set<int> expected;
  for (int a = 1; a < argc; ++a) {
    if (!std::strcmp(argv[a], "--only") && a + 1 < argc) {
      only = std::atoi(argv[++a]);
    } else if (!std::strcmp(argv[a], "--expect-fail") && a + 1 < argc) {
      expected.insert(std::atoi(argv[++a]));
    } else {
      std::fprintf(stderr, "usage: %s [--only N] [--expect-fail N ...]\n", argv[0]);
      return 2;
    }
  }
  int unexpected = 0;
  for (int c = 1; c <= static_cast<int>(criteria.size()); ++c) {
    if (only && c != only) continue;
    Outcome o{false, ""};
    try {
      o = criteria[c - 1].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const bool known = expected.count(c) > 0;
    const char* tag = o.pass ? (known ? "XPASS" : "PASS") : (known ? "FAIL (expected)" : "FAIL");
    std::printf("[%2d] %-44s %s  %s\n", c, criteria[c - 1].first, tag, o.detail.c_str());
    std::fflush(stdout);
    if (o.pass == known) ++unexpected;
  }
  return unexpected == 0 ? 0 : 1;
}
