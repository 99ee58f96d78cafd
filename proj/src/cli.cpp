#include "osm/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "json.hpp"

#include "osm/solvers.hpp"
#include "osm/spectral.hpp"
#include "osm/verify.hpp"

namespace osm {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12e", x);
  return buf;
}

std::ofstream open_out(const fs::path& dir, const std::string& name) {
  fs::create_directories(dir);
  std::ofstream f(dir / name);
  if (!f) throw std::runtime_error("cannot write " + (dir / name).string());
  return f;
}

void write_json(const fs::path& dir, const std::string& name, const ordered_json& j) {
  auto f = open_out(dir, name);
  f << j.dump(2) << "\n";
}

ordered_json describe(const RunConfig& cfg, std::uint64_t seed) {
  const ProblemSetup& s = cfg.setup;
  ordered_json j;
  j["seed"] = seed;
  j["width"] = s.width;
  j["height"] = s.height;
  j["nx"] = s.nx;
  j["ny"] = s.ny;
  j["px"] = s.px;
  j["py"] = s.py;
  j["k"] = s.k;
  j["kappa_mode"] = cfg.kappa_mode;
  j["mu"] = {s.mu.real(), s.mu.imag()};
  j["gamma"] = s.gamma;
  j["bc"] = to_string(s.bc);
  j["lambda_scale"] = s.lambda_scale;
  j["tgamma"] = s.tgamma == TGammaKind::collar ? "collar" : "boundary_h1";
  j["source"] = cfg.source_kind;
  if (cfg.kappa_mode == "resonant") j["dirichlet_eigenvalue"] = cfg.resonance;
  return j;
}

ordered_json spectral_json(const SpectralReport& r) {
  ordered_json j;
  j["n_sigma"] = r.n_sigma;
  j["n_primary"] = r.n_primary;
  j["infsup_skeleton"] = r.infsup_skeleton;
  j["sigma_max_skeleton"] = r.sigma_max_skeleton;
  j["coercivity"] = r.coercivity;
  j["infsup_primary"] = r.infsup_primary;
  j["sigma_max_primary"] = r.sigma_max_primary;
  j["norm_A"] = r.norm_A;
  j["kernel_primary"] = r.kernel_primary;
  j["kernel_skeleton"] = r.kernel_skeleton;
  j["kernel_primary_transpose"] = r.kernel_primary_transpose;
  j["kernel_skeleton_transpose"] = r.kernel_skeleton_transpose;
  j["pass_thm_final"] = r.pass_thm_final;
  j["pass_cor_coercivity"] = r.pass_cor_coercivity;
  j["pass_kernel"] = r.pass_kernel;
  j["pass_index"] = r.pass_index;
  return j;
}

const char* csv_header =
    "k,n_sigma,infsup_primary,norm_A,infsup_skeleton,coercivity,kernel_primary,kernel_skeleton,pass_thm_final,"
    "pass_cor_coercivity\n";

std::string csv_row(double k, const SpectralReport& r) {
  return num(k) + "," + std::to_string(r.n_sigma) + "," + num(r.infsup_primary) + "," + num(r.norm_A) + "," +
         num(r.infsup_skeleton) + "," + num(r.coercivity) + "," + std::to_string(r.kernel_primary) + "," +
         std::to_string(r.kernel_skeleton) + "," + (r.pass_thm_final ? "1" : "0") + "," +
         (r.pass_cor_coercivity ? "1" : "0") + "\n";
}

}  // namespace

double manufactured_l2_error(const RunConfig& cfg, const Mesh& mesh, const Vec& u) {
  // edge-midpoint rule, exact for quadratics
  double err = 0.0;
  double ref = 0.0;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles[t];
    const double w = mesh.signed_area(t) / 3.0;
    for (int a = 0; a < 3; ++a) {
      const int i = tri[a];
      const int j = tri[(a + 1) % 3];
      const Point m{0.5 * (mesh.vertices[i].x + mesh.vertices[j].x), 0.5 * (mesh.vertices[i].y + mesh.vertices[j].y)};
      const cplx exact = manufactured_solution(cfg, m);
      const cplx uh = 0.5 * (u[i] + u[j]);
      err += w * std::norm(uh - exact);
      ref += w * std::norm(exact);
    }
  }
  return std::sqrt(err / ref);
}

int cmd_solve(const RunConfig& cfg, std::uint64_t seed, const fs::path& out, std::ostream& log) {
  const Problem pb(cfg.setup);
  const SkeletonField f = skeleton_rhs(pb, pb.load);
  const SolverConfig& sv = cfg.solver;
  const SolveResult sol = sv.method == "richardson" ? richardson(pb, f, sv.relax, sv.tol, sv.maxit)
                                                     : gmres_tinv(pb, f, sv.tol, sv.restart, sv.maxit);
  const RecoveredVolume rv = recover_volume(pb, sol.q, pb.load);

  {
    auto file = open_out(out, "solution.txt");
    for (int v = 0; v < pb.mesh.num_vertices(); ++v) {
      file << v << " " << num(rv.u_global[v].real()) << " " << num(rv.u_global[v].imag()) << "\n";
    }
  }
  {
    auto file = open_out(out, "residuals.csv");
    file << "iteration,residual\n";
    const auto& h = sol.report.residual_history;
    for (std::size_t i = 0; i < h.size(); ++i) file << i << "," << num(h[i]) << "\n";
  }

  ordered_json j;
  j["config"] = describe(cfg, seed);
  j["method"] = sol.report.method;
  j["iterations"] = sol.report.iterations;
  j["converged"] = sol.report.converged;
  j["diverged"] = sol.report.diverged;
  const double nf = pb.impedance.tinv_norm(f);
  const double last = sol.report.residual_history.empty() ? 0.0 : sol.report.residual_history.back();
  j["relative_residual"] = nf > 0.0 ? last / nf : 0.0;
  j["interface_mismatch"] = rv.mismatch;
  j["n_sigma"] = pb.index.total_block_size();
  if (cfg.manufactured) j["l2_error"] = manufactured_l2_error(cfg, pb.mesh, rv.u_global);

  if (!sol.report.converged) {
    ordered_json diag;
    const int n_primary = pb.mesh.num_vertices() + pb.num_gamma();
    if (pb.index.total_block_size() <= cfg.analysis.dense_cap && n_primary <= cfg.analysis.dense_cap) {
      const SpectralReport r = verify_estimates(pb, cfg.analysis);
      diag["kernel_primary"] = r.kernel_primary;
      diag["kernel_skeleton"] = r.kernel_skeleton;
      diag["infsup_primary"] = r.infsup_primary;
      diag["infsup_skeleton"] = r.infsup_skeleton;
      diag["verdict"] = r.kernel_primary > 0 ? "primary problem is singular (resonance)"
                                             : "no kernel found, solver budget too small";
      log << "kernel diagnosis: primary " << r.kernel_primary << ", skeleton " << r.kernel_skeleton << "\n";
    } else {
      diag["verdict"] = "problem above dense cap, kernel not analysed";
    }
    j["diagnosis"] = diag;
  }
  write_json(out, "report.json", j);

  log << sol.report.method << ": " << sol.report.iterations << " iterations, relative residual "
      << num(j["relative_residual"].get<double>()) << (sol.report.converged ? "" : " (not converged)") << "\n";
  if (cfg.manufactured) log << "relative L2 error " << num(j["l2_error"].get<double>()) << "\n";
  return sol.report.converged ? exit_ok : exit_failure;
}

int cmd_verify(const RunConfig& cfg, std::uint64_t seed, const fs::path& out, std::ostream& log) {
  const Problem pb(cfg.setup);
  const auto results = run_verify(pb, seed, cfg.analysis);
  ordered_json j;
  j["config"] = describe(cfg, seed);
  ordered_json suites = ordered_json::array();
  bool all = true;
  auto txt = open_out(out, "verify.txt");
  txt << "seed " << seed << "\n";
  for (const auto& r : results) {
    all = all && r.pass;
    suites.push_back({{"name", r.name}, {"pass", r.pass}, {"worst", r.worst}, {"tolerance", r.tolerance}, {"note", r.note}});
    char line[160];
    std::snprintf(line, sizeof line, "%-32s %s  worst %.3e  tol %.1e", r.name.c_str(), r.pass ? "PASS" : "FAIL",
                  r.worst, r.tolerance);
    txt << line << (r.note.empty() ? "" : "  " + r.note) << "\n";
    log << line << "\n";
  }
  j["suites"] = suites;
  j["all_pass"] = all;
  write_json(out, "verify.json", j);
  return all ? exit_ok : exit_failure;
}

int cmd_spectrum(const RunConfig& cfg, std::uint64_t seed, const fs::path& out, std::ostream& log) {
  const Problem pb(cfg.setup);
  const SpectralReport r = verify_estimates(pb, cfg.analysis);
  {
    auto f = open_out(out, "spectrum.csv");
    f << csv_header << csv_row(cfg.setup.k, r);
  }
  ordered_json j;
  j["config"] = describe(cfg, seed);
  j["report"] = spectral_json(r);
  write_json(out, "spectrum.json", j);
  log << "infsup_skeleton " << num(r.infsup_skeleton) << ", coercivity " << num(r.coercivity)
      << ", infsup_primary " << num(r.infsup_primary) << ", |A| " << num(r.norm_A) << "\n";
  log << "kernels " << r.kernel_primary << "/" << r.kernel_skeleton << ", estimates "
      << (r.all_pass() ? "hold" : "VIOLATED") << "\n";
  return r.all_pass() ? exit_ok : exit_failure;
}

int cmd_sweep(const RunConfig& cfg, std::uint64_t seed, const fs::path& out, std::ostream& log) {
  if (cfg.ks.empty()) throw InvalidArgument("sweep: empty k list (set [sweep] ks = 5,10,...)");
  const SweepResult sw = sweep_wavenumber(cfg.setup, cfg.ks, cfg.analysis);
  auto f = open_out(out, "sweep.csv");
  f << csv_header;
  bool all = true;
  for (const auto& row : sw.rows) {
    f << csv_row(row.k, row.report);
    all = all && row.report.pass_thm_final && row.report.pass_cor_coercivity;
    log << "k " << row.k << " nx " << row.nx << " infsup_skeleton " << num(row.report.infsup_skeleton)
        << " coercivity " << num(row.report.coercivity) << "\n";
  }
  if (sw.has_slopes) {
    f << "# slope_infsup_skeleton," << num(sw.slope_infsup) << "\n";
    f << "# slope_coercivity," << num(sw.slope_coercivity) << "\n";
    log << "log-log slopes: infsup " << num(sw.slope_infsup) << ", coercivity " << num(sw.slope_coercivity) << "\n";
  }
  f << "# seed," << seed << "\n";
  return all ? exit_ok : exit_failure;
}

int run_command(const std::string& command, const std::string& config_path, std::uint64_t seed,
                const std::string& out, std::ostream& log, std::ostream& err) {
  RunConfig cfg;
  try {
    cfg = parse_config(config_path);
  } catch (const InvalidArgument& e) {
    err << "config error: " << e.what() << "\n";
    return exit_config;
  }
  const fs::path dir = out.empty() ? fs::path(cfg.output) : fs::path(out);
  try {
    if (command == "solve") return cmd_solve(cfg, seed, dir, log);
    if (command == "verify") return cmd_verify(cfg, seed, dir, log);
    if (command == "spectrum") return cmd_spectrum(cfg, seed, dir, log);
    if (command == "sweep") return cmd_sweep(cfg, seed, dir, log);
    err << "unknown command '" << command << "'\n";
    return exit_config;
  } catch (const LocalSolvabilityError& e) {
    err << "(A4) violated, local problem not uniquely solvable: " << e.what() << "\n";
    return exit_local_solvability;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << "\n";
    return exit_config;
  } catch (const CapExceeded& e) {
    err << "dense analysis cap exceeded: " << e.what() << "\n";
    return exit_failure;
  } catch (const std::exception& e) {
    err << "failure: " << e.what() << "\n";
    return exit_failure;
  }
}

}  // namespace osm
