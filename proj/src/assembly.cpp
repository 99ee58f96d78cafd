#include "osm/assembly.hpp"

#include <string>

namespace osm {

Coefficients Coefficients::constant(cplx kappa_sq, double gamma, cplx mu) {
  Coefficients c;
  c.mu = mu;
  c.kappa_sq = [kappa_sq](Point) { return kappa_sq; };
  c.kappa_sq_affine = true;
  c.gamma = gamma;
  return c;
}

void Coefficients::validate(const Mesh& mesh) const {
  if (!(mu.real() > 0.0) || mu.imag() < 0.0) {
    throw InvalidArgument("(A2) violated: need Re mu > 0 and Im mu >= 0");
  }
  if (!(gamma > 0.0)) throw InvalidArgument("gamma must be positive");
  if (!kappa_sq) throw InvalidArgument("kappa^2 is not set");
  auto check = [](cplx k2) {
    if (k2.imag() < 0.0) throw InvalidArgument("(A2) violated: Im kappa^2 < 0");
  };
  if (kappa_sq_affine) {
    for (const auto& v : mesh.vertices) check(kappa_sq(v));
  } else {
    for (int t = 0; t < mesh.num_triangles(); ++t) check(kappa_sq(mesh.centroid(t)));
  }
}

ElementMatrices p1_element(const Mesh& mesh, int t, const Coefficients& coeffs) {
  const auto& tri = mesh.triangles[t];
  const double area = mesh.signed_area(t);
  if (!(area > 0.0)) {
    throw InvalidArgument("p1_element: triangle " + std::to_string(t) + " has non-positive area");
  }
  std::array<double, 3> b{};
  std::array<double, 3> c{};
  for (int a = 0; a < 3; ++a) {
    const Point& p1 = mesh.vertices[tri[(a + 1) % 3]];
    const Point& p2 = mesh.vertices[tri[(a + 2) % 3]];
    b[a] = p1.y - p2.y;
    c[a] = p2.x - p1.x;
  }
  ElementMatrices e;
  for (int r = 0; r < 3; ++r) {
    for (int s = 0; s < 3; ++s) {
      e.K(r, s) = (b[r] * b[s] + c[r] * c[s]) / (4.0 * area);
      e.M(r, s) = area / 12.0 * (r == s ? 2.0 : 1.0);
    }
  }
  if (coeffs.kappa_sq_affine) {
    // int l_r l_s l_q over the triangle: A/10, A/30 or A/60 depending on how
    // many of the indices coincide.
    std::array<cplx, 3> kv{};
    for (int a = 0; a < 3; ++a) kv[a] = coeffs.kappa_sq(mesh.vertices[tri[a]]);
    for (int r = 0; r < 3; ++r) {
      for (int s = 0; s < 3; ++s) {
        cplx v = 0.0;
        for (int q = 0; q < 3; ++q) {
          const int distinct = (r == s && s == q) ? 1 : ((r == s || s == q || r == q) ? 2 : 3);
          const double w = distinct == 1 ? area / 10.0 : (distinct == 2 ? area / 30.0 : area / 60.0);
          v += kv[q] * w;
        }
        e.Mk(r, s) = v;
      }
    }
  } else {
    e.Mk = coeffs.kappa_sq(mesh.centroid(t)) * e.M.cast<cplx>();
  }
  return e;
}

std::vector<int> local_dofs(const Partition& partition, int j) {
  std::vector<int> dofs = partition.interior_dofs[j];
  dofs.insert(dofs.end(), partition.boundary_dofs[j].begin(), partition.boundary_dofs[j].end());
  return dofs;
}

namespace {

template <typename Scalar>
Eigen::SparseMatrix<Scalar> from_triplets(int n, const std::vector<Eigen::Triplet<Scalar>>& trip) {
  Eigen::SparseMatrix<Scalar> m(n, n);
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

}  // namespace

LocalForms assemble_subdomain(const Mesh& mesh, const Partition& partition, int j,
                              const Coefficients& coeffs) {
  LocalForms f;
  f.subdomain = j;
  f.dofs = local_dofs(partition, j);
  f.num_interior = static_cast<int>(partition.interior_dofs[j].size());
  std::vector<int> local(mesh.num_vertices(), -1);
  for (int k = 0; k < f.size(); ++k) local[f.dofs[k]] = k;

  std::vector<Eigen::Triplet<double>> tk, tm;
  std::vector<Eigen::Triplet<cplx>> tmk;
  for (int t : partition.triangles_of[j]) {
    const ElementMatrices e = p1_element(mesh, t, coeffs);
    const auto& tri = mesh.triangles[t];
    for (int r = 0; r < 3; ++r) {
      for (int s = 0; s < 3; ++s) {
        const int lr = local[tri[r]];
        const int ls = local[tri[s]];
        tk.emplace_back(lr, ls, e.K(r, s));
        tm.emplace_back(lr, ls, e.M(r, s));
        tmk.emplace_back(lr, ls, e.Mk(r, s));
      }
    }
  }
  const int n = f.size();
  f.K = from_triplets(n, tk);
  f.M = from_triplets(n, tm);
  f.Mk = from_triplets(n, tmk);
  f.A = (f.K.cast<cplx>() / coeffs.mu - f.Mk).pruned();
  f.H = f.K + f.M / (coeffs.gamma * coeffs.gamma);
  return f;
}

std::vector<LocalForms> assemble_all_subdomains(const Mesh& mesh, const Partition& partition,
                                                const Coefficients& coeffs) {
  std::vector<LocalForms> forms;
  forms.reserve(partition.num_subdomains);
  for (int j = 0; j < partition.num_subdomains; ++j) {
    forms.push_back(assemble_subdomain(mesh, partition, j, coeffs));
  }
  return forms;
}

GlobalForms assemble_global(const Mesh& mesh, const Coefficients& coeffs) {
  std::vector<Eigen::Triplet<double>> tk, tm;
  std::vector<Eigen::Triplet<cplx>> tmk;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const ElementMatrices e = p1_element(mesh, t, coeffs);
    const auto& tri = mesh.triangles[t];
    for (int r = 0; r < 3; ++r) {
      for (int s = 0; s < 3; ++s) {
        tk.emplace_back(tri[r], tri[s], e.K(r, s));
        tm.emplace_back(tri[r], tri[s], e.M(r, s));
        tmk.emplace_back(tri[r], tri[s], e.Mk(r, s));
      }
    }
  }
  GlobalForms g;
  const int n = mesh.num_vertices();
  g.K = from_triplets(n, tk);
  g.M = from_triplets(n, tm);
  g.Mk = from_triplets(n, tmk);
  g.A = (g.K.cast<cplx>() / coeffs.mu - g.Mk).pruned();
  g.H = g.K + g.M / (coeffs.gamma * coeffs.gamma);
  return g;
}

VolumeTuple LoadTuple::as_dual_tuple() const {
  VolumeTuple t;
  t.kind = FieldKind::dual;
  t.alpha = ell_alpha;
  t.p = ell_p;
  t.omega = omega;
  return t;
}

LoadTuple assemble_load(const Mesh& mesh, const Partition& partition,
                        const std::function<cplx(Point)>& f) {
  LoadTuple load;
  const int ng = static_cast<int>(partition.gamma_dofs.size());
  load.ell_alpha = Vec::Zero(ng);
  load.ell_p = Vec::Zero(ng);
  std::vector<int> local(mesh.num_vertices(), -1);
  for (int j = 0; j < partition.num_subdomains; ++j) {
    const std::vector<int> dofs = local_dofs(partition, j);
    for (std::size_t k = 0; k < dofs.size(); ++k) local[dofs[k]] = static_cast<int>(k);
    Vec w = Vec::Zero(static_cast<Eigen::Index>(dofs.size()));
    for (int t : partition.triangles_of[j]) {
      const cplx val = f(mesh.centroid(t)) * (mesh.signed_area(t) / 3.0);
      for (int v : mesh.triangles[t]) w[local[v]] += val;
    }
    load.omega.push_back(std::move(w));
  }
  return load;
}

Vec assemble_global_load(const Mesh& mesh, const std::function<cplx(Point)>& f) {
  Vec w = Vec::Zero(mesh.num_vertices());
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const cplx val = f(mesh.centroid(t)) * (mesh.signed_area(t) / 3.0);
    for (int v : mesh.triangles[t]) w[v] += val;
  }
  return w;
}

Restriction::Restriction(const Mesh& mesh, const Partition& partition)
    : num_vertices_(mesh.num_vertices()), gamma_dofs_(partition.gamma_dofs) {
  for (int j = 0; j < partition.num_subdomains; ++j) dofs_.push_back(local_dofs(partition, j));
}

int Restriction::tuple_size() const {
  int n = 2 * num_gamma();
  for (const auto& d : dofs_) n += static_cast<int>(d.size());
  return n;
}

VolumeTuple Restriction::apply(const Vec& u, const Vec& p) const {
  if (u.size() != num_vertices_ || p.size() != num_gamma()) {
    throw InvalidArgument("Restriction::apply: dimension mismatch");
  }
  VolumeTuple t;
  t.kind = FieldKind::primal;
  t.alpha.resize(num_gamma());
  for (int k = 0; k < num_gamma(); ++k) t.alpha[k] = u[gamma_dofs_[k]];
  t.p = p;
  for (const auto& d : dofs_) {
    Vec w(static_cast<Eigen::Index>(d.size()));
    for (std::size_t k = 0; k < d.size(); ++k) w[k] = u[d[k]];
    t.omega.push_back(std::move(w));
  }
  return t;
}

std::pair<Vec, Vec> Restriction::adjoint(const VolumeTuple& dual) const {
  if (dual.alpha.size() != num_gamma() || dual.p.size() != num_gamma() ||
      dual.omega.size() != dofs_.size()) {
    throw InvalidArgument("Restriction::adjoint: dimension mismatch");
  }
  Vec u = Vec::Zero(num_vertices_);
  for (int k = 0; k < num_gamma(); ++k) u[gamma_dofs_[k]] += dual.alpha[k];
  for (std::size_t j = 0; j < dofs_.size(); ++j) {
    if (dual.omega[j].size() != static_cast<Eigen::Index>(dofs_[j].size())) {
      throw InvalidArgument("Restriction::adjoint: subdomain block size mismatch");
    }
    for (std::size_t k = 0; k < dofs_[j].size(); ++k) u[dofs_[j][k]] += dual.omega[j][k];
  }
  return {u, dual.p};
}

SpMat Restriction::matrix() const {
  const int ng = num_gamma();
  std::vector<Eigen::Triplet<cplx>> trip;
  for (int k = 0; k < ng; ++k) {
    trip.emplace_back(k, gamma_dofs_[k], 1.0);
    trip.emplace_back(ng + k, num_vertices_ + k, 1.0);
  }
  int row = 2 * ng;
  for (const auto& d : dofs_) {
    for (int v : d) trip.emplace_back(row++, v, 1.0);
  }
  SpMat r(tuple_size(), num_vertices_ + ng);
  r.setFromTriplets(trip.begin(), trip.end());
  return r;
}

VolumeTuple flat_to_tuple(const Restriction& r, FieldKind kind, const Vec& flat) {
  if (flat.size() != r.tuple_size()) throw InvalidArgument("flat_to_tuple: size mismatch");
  VolumeTuple t;
  t.kind = kind;
  const int ng = r.num_gamma();
  t.alpha = flat.head(ng);
  t.p = flat.segment(ng, ng);
  Eigen::Index off = 2 * ng;
  for (const auto& d : r.subdomain_dofs()) {
    const auto n = static_cast<Eigen::Index>(d.size());
    t.omega.push_back(flat.segment(off, n));
    off += n;
  }
  return t;
}

Vec tuple_to_flat(const VolumeTuple& t) {
  Eigen::Index n = t.alpha.size() + t.p.size();
  for (const auto& w : t.omega) n += w.size();
  Vec out(n);
  out.head(t.alpha.size()) = t.alpha;
  out.segment(t.alpha.size(), t.p.size()) = t.p;
  Eigen::Index off = t.alpha.size() + t.p.size();
  for (const auto& w : t.omega) {
    out.segment(off, w.size()) = w;
    off += w.size();
  }
  return out;
}

PrimarySystem assemble_primary(const Mesh& mesh, const Partition& partition,
                               const Coefficients& coeffs, const Mat& a_gamma,
                               const std::function<cplx(Point)>& f, const Vec& ell_alpha,
                               const Vec& ell_p) {
  const int n = mesh.num_vertices();
  const auto& gd = partition.gamma_dofs;
  const int ng = static_cast<int>(gd.size());
  if (a_gamma.rows() != 2 * ng || a_gamma.cols() != 2 * ng) {
    throw InvalidArgument("assemble_primary: boundary block must be 2*nGamma square");
  }
  const GlobalForms g = assemble_global(mesh, coeffs);
  std::vector<Eigen::Triplet<cplx>> trip;
  for (int k = 0; k < g.A.outerSize(); ++k) {
    for (SpMat::InnerIterator it(g.A, k); it; ++it) trip.emplace_back(it.row(), it.col(), it.value());
  }
  // Boundary slot a in [0, 2 ng): the first ng act on u|Gamma, the rest on p.
  auto global_index = [&](int a) { return a < ng ? gd[a] : n + (a - ng); };
  for (int r = 0; r < 2 * ng; ++r) {
    for (int s = 0; s < 2 * ng; ++s) {
      if (a_gamma(r, s) != cplx(0.0)) trip.emplace_back(global_index(r), global_index(s), a_gamma(r, s));
    }
  }
  PrimarySystem sys;
  sys.num_volume = n;
  sys.num_gamma = ng;
  sys.matrix.resize(n + ng, n + ng);
  sys.matrix.setFromTriplets(trip.begin(), trip.end());
  sys.rhs = Vec::Zero(n + ng);
  sys.rhs.head(n) = assemble_global_load(mesh, f);
  for (int k = 0; k < ng; ++k) sys.rhs[gd[k]] += ell_alpha[k];
  sys.rhs.tail(ng) = ell_p;
  return sys;
}

SpMat block_diagonal(const Mat& a_gamma, const std::vector<LocalForms>& forms, bool transpose) {
  std::vector<Eigen::Triplet<cplx>> trip;
  const auto ng2 = a_gamma.rows();
  for (Eigen::Index r = 0; r < ng2; ++r) {
    for (Eigen::Index s = 0; s < ng2; ++s) {
      const cplx v = transpose ? a_gamma(s, r) : a_gamma(r, s);
      if (v != cplx(0.0)) trip.emplace_back(static_cast<int>(r), static_cast<int>(s), v);
    }
  }
  int off = static_cast<int>(ng2);
  for (const auto& f : forms) {
    for (int k = 0; k < f.A.outerSize(); ++k) {
      for (SpMat::InnerIterator it(f.A, k); it; ++it) {
        const int r = transpose ? static_cast<int>(it.col()) : static_cast<int>(it.row());
        const int c = transpose ? static_cast<int>(it.row()) : static_cast<int>(it.col());
        trip.emplace_back(off + r, off + c, it.value());
      }
    }
    off += f.size();
  }
  SpMat a(off, off);
  a.setFromTriplets(trip.begin(), trip.end());
  return a;
}

SpMat assemble_primary_factored(const Restriction& r, const std::vector<LocalForms>& forms,
                                const Mat& a_gamma) {
  const SpMat R = r.matrix();
  const SpMat A = block_diagonal(a_gamma, forms);
  SpMat out = SpMat(R.transpose()) * A * R;
  return out.pruned();
}

}  // namespace osm
