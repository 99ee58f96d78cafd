#pragma once

#include <string>
#include <vector>

#include "osm/problem.hpp"

namespace osm {

struct AnalysisOptions {
  int dense_cap = 2000;          // largest skeleton dimension analysed densely
  double svd_threshold = 1e-8;   // kernel: sigma < threshold * sigma_max
  int lanczos_steps = 160;       // primary inf-sup beyond the dense cap
};

/// Whitened Id + Pi S as a dense matrix, built column by column.
Mat dense_operator(const Problem& pb, int cap = 2000);

/// Dense whitened Pi.
Mat dense_exchange(const Problem& pb, int cap = 2000);

double infsup_skeleton(const Mat& M);
/// Smallest eigenvalue of (M + M^H) / 2.
double coercivity_constant(const Mat& M);
int count_below(const RVec& singular_values, double threshold);

struct PrimarySpectrum {
  double sigma_min = 0.0;
  double sigma_max = 0.0;
  int kernel_dim = 0;
  int kernel_dim_transpose = 0;
  bool dense = true;
};

/// Singular values of W^-1/2 A W^-1/2 for the monolithic operator A and the
/// Gram W of Problem::primary_gram. Dense below the cap, Lanczos above.
PrimarySpectrum primary_spectrum(const Problem& pb, const AnalysisOptions& opt);

/// Largest singular value of diag(A_Gamma, A_1, ..., A_J) whitened by the
/// block norms (T_Gamma, T_Gamma^-1 on the boundary pair, H_j per subdomain).
double continuity_modulus_A(const Problem& pb);

struct SpectralReport {
  int n_sigma = 0;
  int n_primary = 0;
  double infsup_skeleton = 0.0;
  double sigma_max_skeleton = 0.0;
  double coercivity = 0.0;
  double infsup_primary = 0.0;
  double sigma_max_primary = 0.0;
  double norm_A = 0.0;
  int kernel_primary = 0;
  int kernel_skeleton = 0;
  int kernel_primary_transpose = 0;
  int kernel_skeleton_transpose = 0;
  bool pass_thm_final = false;       // infsup_primary <= (1 + |A|) infsup_skeleton + 1e-9
  bool pass_cor_coercivity = false;  // coercivity >= infsup_skeleton^2 / 2 - 1e-9
  bool pass_kernel = false;          // equal kernel dimensions
  bool pass_index = false;           // both indices zero
  bool all_pass() const { return pass_thm_final && pass_cor_coercivity && pass_kernel && pass_index; }
};

SpectralReport verify_estimates(const Problem& pb, const AnalysisOptions& opt = {});

/// Smallest eigenvalue of the discrete Dirichlet Laplacian (K, M restricted
/// to vertices off Gamma) for the setup's mesh.
double dirichlet_resonance(const ProblemSetup& setup);

/// nx = ny = ceil(10 k / (2 pi)) rounded up to a multiple of `multiple`.
int sweep_resolution(double k, int multiple);

struct SweepRow {
  double k = 0.0;
  int nx = 0;
  SpectralReport report;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  bool has_slopes = false;
  double slope_infsup = 0.0;
  double slope_coercivity = 0.0;
};

/// Robin problem with Lambda = k * boundary mass and gamma = 1/k for every
/// k in the list; geometry, partition and T_Gamma choice come from `base`.
SweepResult sweep_wavenumber(const ProblemSetup& base, const std::vector<double>& ks,
                             const AnalysisOptions& opt = {});

/// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace osm
