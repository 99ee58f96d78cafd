#include "osm/problem.hpp"

#include <cmath>

namespace osm {

ProblemSetup reference_setup() {
  ProblemSetup s;
  s.k = 5.0;
  s.gamma = 1.0 / s.k;
  s.lambda_scale = s.k;
  s.bc = BcKind::robin;
  return s;
}

namespace {

Mesh make_mesh(const ProblemSetup& s) {
  Mesh m = build_rect_mesh(s.nx, s.ny, s.width, s.height);
  if (s.bc == BcKind::mixed) {
    if (!s.dirichlet_part) throw InvalidArgument("mixed conditions need a Dirichlet part predicate");
    auto rule = [&](Point x) { return s.dirichlet_part(x) ? BoundaryTag::dirichlet : BoundaryTag::neumann; };
    return tag_boundary(m, rule, TagMode::mixed);
  }
  const BoundaryTag tag = s.bc == BcKind::dirichlet ? BoundaryTag::dirichlet : BoundaryTag::neumann;
  return tag_boundary(m, [tag](Point) { return tag; }, TagMode::pure);
}

Coefficients make_coeffs(const ProblemSetup& s, const Mesh& mesh) {
  Coefficients c;
  c.mu = s.mu;
  if (s.kappa_sq) {
    c.kappa_sq = s.kappa_sq;
  } else {
    const cplx k2 = s.k * s.k;
    c.kappa_sq = [k2](Point) { return k2; };
  }
  c.kappa_sq_affine = s.kappa_sq_affine;
  c.gamma = s.gamma;
  c.validate(mesh);
  return c;
}

RMat make_t_gamma(const ProblemSetup& s, const Mesh& mesh, const Partition& part) {
  if (s.tgamma == TGammaKind::collar) return collar_impedance(mesh, part.gamma_dofs, s.gamma);
  return boundary_h1_impedance(mesh, part.gamma_dofs, s.gamma);
}

std::vector<RMat> make_blocks(const RMat& t_gamma, const std::vector<LocalForms>& forms) {
  std::vector<RMat> blocks{t_gamma};
  for (const auto& f : forms) blocks.push_back(schur_dtn(f.H, f.num_interior));
  return blocks;
}

BoundaryOperator make_bc(const ProblemSetup& s, const Mesh& mesh, const Partition& part,
                         const RMat& t_gamma) {
  switch (s.bc) {
    case BcKind::dirichlet:
      return BoundaryOperator::dirichlet(t_gamma);
    case BcKind::neumann:
      return BoundaryOperator::neumann(t_gamma);
    case BcKind::robin:
      if (!(s.lambda_scale > 0.0)) throw InvalidArgument("robin: lambda_scale must be positive");
      return BoundaryOperator::robin(t_gamma, s.lambda_scale * boundary_mass(mesh, part.gamma_dofs));
    case BcKind::mixed:
      return BoundaryOperator::mixed(t_gamma, dirichlet_dof_mask(mesh, part.gamma_dofs));
  }
  throw InvalidArgument("unknown boundary condition");
}

Vec sample(const std::function<cplx(Point)>& g, const Mesh& mesh, const std::vector<int>& dofs) {
  Vec out = Vec::Zero(static_cast<Eigen::Index>(dofs.size()));
  if (!g) return out;
  for (std::size_t k = 0; k < dofs.size(); ++k) out[k] = g(mesh.vertices[dofs[k]]);
  return out;
}

std::function<cplx(Point)> or_zero(const std::function<cplx(Point)>& f) {
  if (f) return f;
  return [](Point) { return cplx(0.0); };
}

LoadTuple make_load(const ProblemSetup& s, const Mesh& mesh, const Partition& part,
                    const BoundaryOperator& bc) {
  LoadTuple load = assemble_load(mesh, part, or_zero(s.source));
  const BoundaryLoad bl = boundary_load(bc, mesh, part.gamma_dofs, sample(s.g_d, mesh, part.gamma_dofs),
                                        sample(s.g_n, mesh, part.gamma_dofs));
  load.ell_alpha = bl.ell_alpha;
  load.ell_p = bl.ell_p;
  return load;
}

}  // namespace

Problem::Problem(const ProblemSetup& s)
    : setup(s),
      mesh(make_mesh(s)),
      partition(partition_checkerboard(mesh, s.px, s.py)),
      index(skeleton_index(partition)),
      coeffs(make_coeffs(s, mesh)),
      forms(assemble_all_subdomains(mesh, partition, coeffs)),
      restriction(mesh, partition),
      trace(index, forms),
      basis(index),
      t_gamma(make_t_gamma(s, mesh, partition)),
      impedance(make_blocks(t_gamma, forms), basis),
      bc(make_bc(s, mesh, partition, t_gamma)),
      local(forms, impedance, bc, s.rcond_min),
      exchange(basis, impedance),
      load(make_load(s, mesh, partition, bc)) {}

PrimarySystem Problem::primary() const {
  return assemble_primary(mesh, partition, coeffs, bc.matrix(), or_zero(setup.source), load.ell_alpha,
                          load.ell_p);
}

RSpMat Problem::primary_gram() const {
  const int n = mesh.num_vertices();
  const int ng = num_gamma();
  const GlobalForms g = assemble_global(mesh, coeffs);
  const RMat tinv = t_gamma.llt().solve(RMat::Identity(ng, ng));
  std::vector<Eigen::Triplet<double>> trip;
  for (int k = 0; k < g.H.outerSize(); ++k) {
    for (RSpMat::InnerIterator it(g.H, k); it; ++it) trip.emplace_back(it.row(), it.col(), it.value());
  }
  const auto& gd = partition.gamma_dofs;
  for (int r = 0; r < ng; ++r) {
    for (int c = 0; c < ng; ++c) {
      trip.emplace_back(gd[r], gd[c], t_gamma(r, c));
      trip.emplace_back(n + r, n + c, 0.5 * (tinv(r, c) + tinv(c, r)));
    }
  }
  RSpMat W(n + ng, n + ng);
  W.setFromTriplets(trip.begin(), trip.end());
  return W;
}

double Problem::primary_norm(const Vec& z) const {
  const RSpMat W = primary_gram();
  const double re = z.real().dot(W * z.real());
  const double im = z.imag().dot(W * z.imag());
  return std::sqrt(std::max(0.0, re + im));
}

}  // namespace osm
