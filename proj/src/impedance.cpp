#include "osm/impedance.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "osm/assembly.hpp"

namespace osm {

RMat schur_dtn(const RSpMat& H, int num_interior) {
  const int n = static_cast<int>(H.rows());
  const int ni = num_interior;
  const int nb = n - ni;
  RMat Hbb = RMat(H).bottomRightCorner(nb, nb);
  if (ni == 0) return Hbb;
  RSpMat Hii = H.topLeftCorner(ni, ni);
  Eigen::SimplicialLLT<RSpMat> llt(Hii);
  if (llt.info() != Eigen::Success) throw std::runtime_error("schur_dtn: interior block is not SPD");
  const RMat Hib = RMat(H.block(0, ni, ni, nb));
  const RMat X = llt.solve(Hib);
  RMat T = Hbb - Hib.transpose() * X;
  return 0.5 * (T + T.transpose());
}

namespace {

int position_in(const std::vector<int>& sorted, int v) {
  auto it = std::lower_bound(sorted.begin(), sorted.end(), v);
  if (it == sorted.end() || *it != v) return -1;
  return static_cast<int>(it - sorted.begin());
}

}  // namespace

RMat collar_impedance(const Mesh& mesh, const std::vector<int>& gamma_dofs, double gamma) {
  const int nx = mesh.nx;
  const int ny = mesh.ny;
  const double hx = mesh.width / nx;
  const double hy = mesh.height / ny;
  const Mesh big = build_rect_mesh(nx + 2, ny + 2, mesh.width + 2 * hx, mesh.height + 2 * hy);
  const Coefficients c = Coefficients::constant(0.0, gamma);

  // Ring vertices: outer rim first (eliminated), then the inner rim in
  // Gamma order.
  const int ng = static_cast<int>(gamma_dofs.size());
  std::vector<int> local(big.num_vertices(), -1);
  int n_outer = 0;
  for (int J = 0; J <= ny + 2; ++J) {
    for (int I = 0; I <= nx + 2; ++I) {
      if (I == 0 || J == 0 || I == nx + 2 || J == ny + 2) local[big.vertex_id(I, J)] = n_outer++;
    }
  }
  for (int J = 1; J <= ny + 1; ++J) {
    for (int I = 1; I <= nx + 1; ++I) {
      if (I == 1 || J == 1 || I == nx + 1 || J == ny + 1) {
        const int g = position_in(gamma_dofs, mesh.vertex_id(I - 1, J - 1));
        if (g < 0) throw std::logic_error("collar_impedance: inner rim vertex is not on Gamma");
        local[big.vertex_id(I, J)] = n_outer + g;
      }
    }
  }
  const int n = n_outer + ng;
  std::vector<Eigen::Triplet<double>> trip;
  for (int t = 0; t < big.num_triangles(); ++t) {
    const int cell = t / 2;
    const int i = cell % (nx + 2);
    const int j = cell / (nx + 2);
    if (!(i == 0 || j == 0 || i == nx + 1 || j == ny + 1)) continue;
    const ElementMatrices e = p1_element(big, t, c);
    const auto& tri = big.triangles[t];
    for (int r = 0; r < 3; ++r) {
      for (int s = 0; s < 3; ++s) {
        trip.emplace_back(local[tri[r]], local[tri[s]], e.K(r, s) + e.M(r, s) / (gamma * gamma));
      }
    }
  }
  RSpMat H(n, n);
  H.setFromTriplets(trip.begin(), trip.end());
  return schur_dtn(H, n_outer);
}

RMat boundary_mass(const Mesh& mesh, const std::vector<int>& gamma_dofs, const BoundaryTag* only) {
  const int ng = static_cast<int>(gamma_dofs.size());
  RMat Mb = RMat::Zero(ng, ng);
  for (const auto& e : mesh.boundary_edges) {
    if (only && e.tag != *only) continue;
    const Point& a = mesh.vertices[e.v[0]];
    const Point& b = mesh.vertices[e.v[1]];
    const double len = std::hypot(b.x - a.x, b.y - a.y);
    const int i0 = position_in(gamma_dofs, e.v[0]);
    const int i1 = position_in(gamma_dofs, e.v[1]);
    Mb(i0, i0) += len / 3.0;
    Mb(i1, i1) += len / 3.0;
    Mb(i0, i1) += len / 6.0;
    Mb(i1, i0) += len / 6.0;
  }
  return Mb;
}

RMat boundary_h1_impedance(const Mesh& mesh, const std::vector<int>& gamma_dofs, double gamma) {
  const int ng = static_cast<int>(gamma_dofs.size());
  RMat Kb = RMat::Zero(ng, ng);
  for (const auto& e : mesh.boundary_edges) {
    const Point& a = mesh.vertices[e.v[0]];
    const Point& b = mesh.vertices[e.v[1]];
    const double len = std::hypot(b.x - a.x, b.y - a.y);
    const int i0 = position_in(gamma_dofs, e.v[0]);
    const int i1 = position_in(gamma_dofs, e.v[1]);
    Kb(i0, i0) += 1.0 / len;
    Kb(i1, i1) += 1.0 / len;
    Kb(i0, i1) -= 1.0 / len;
    Kb(i1, i0) -= 1.0 / len;
  }
  return Kb + boundary_mass(mesh, gamma_dofs) / gamma;
}

BlockImpedance::BlockImpedance(std::vector<RMat> blocks, const SingleTraceBasis& basis)
    : blocks_(std::move(blocks)) {
  if (static_cast<int>(blocks_.size()) != basis.index().num_blocks()) {
    throw InvalidArgument("BlockImpedance: wrong number of blocks");
  }
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    if (blocks_[b].rows() != basis.index().block_size(static_cast<int>(b))) {
      throw InvalidArgument("BlockImpedance: block " + std::to_string(b) + " has the wrong size");
    }
    llt_.emplace_back(blocks_[b]);
    if (llt_.back().info() != Eigen::Success) {
      throw std::runtime_error("BlockImpedance: block " + std::to_string(b) + " is not SPD");
    }
    factors_.push_back(llt_.back().matrixL());
    sizes_.push_back(static_cast<int>(blocks_[b].rows()));
  }
  // G = E^T T E, assembled block by block.
  const auto& index = basis.index();
  std::vector<Eigen::Triplet<double>> trip;
  for (int b = 0; b < index.num_blocks(); ++b) {
    const auto& m = index.block_map[b];
    for (std::size_t r = 0; r < m.size(); ++r) {
      for (std::size_t s = 0; s < m.size(); ++s) {
        const double v = blocks_[b](static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(s));
        if (v != 0.0) trip.emplace_back(m[r], m[s], v);
      }
    }
  }
  G_.resize(index.num_skeleton(), index.num_skeleton());
  G_.setFromTriplets(trip.begin(), trip.end());
  G_llt_.compute(G_);
  if (G_llt_.info() != Eigen::Success) throw std::runtime_error("BlockImpedance: G is not SPD");
}

SkeletonField BlockImpedance::apply(const SkeletonField& v) const {
  if (v.kind() != FieldKind::primal) throw InvalidArgument("BlockImpedance::apply expects a primal field");
  std::vector<Vec> out;
  for (int b = 0; b < num_blocks(); ++b) out.push_back(blocks_[b].cast<cplx>() * v.block(b));
  return {FieldKind::dual, std::move(out)};
}

SkeletonField BlockImpedance::solve(const SkeletonField& p) const {
  if (p.kind() != FieldKind::dual) throw InvalidArgument("BlockImpedance::solve expects a dual field");
  std::vector<Vec> out;
  for (int b = 0; b < num_blocks(); ++b) {
    Vec x(sizes_[b]);
    x.real() = llt_[b].solve(RVec(p.block(b).real()));
    x.imag() = llt_[b].solve(RVec(p.block(b).imag()));
    out.push_back(std::move(x));
  }
  return {FieldKind::primal, std::move(out)};
}

double BlockImpedance::t_norm(const SkeletonField& v) const {
  if (v.kind() != FieldKind::primal) throw InvalidArgument("t_norm expects a primal field");
  double s = 0.0;
  for (int b = 0; b < num_blocks(); ++b) {
    s += (factors_[b].transpose() * v.block(b).real()).squaredNorm();
    s += (factors_[b].transpose() * v.block(b).imag()).squaredNorm();
  }
  return std::sqrt(s);
}

double BlockImpedance::tinv_norm(const SkeletonField& p) const {
  if (p.kind() != FieldKind::dual) throw InvalidArgument("tinv_norm expects a dual field");
  return whiten(p).norm();
}

Vec BlockImpedance::whiten(const SkeletonField& q) const {
  if (q.kind() != FieldKind::dual) throw InvalidArgument("whiten expects a dual field");
  Vec w(q.size());
  Eigen::Index off = 0;
  for (int b = 0; b < num_blocks(); ++b) {
    const auto L = factors_[b].triangularView<Eigen::Lower>();
    w.segment(off, sizes_[b]).real() = L.solve(RVec(q.block(b).real()));
    w.segment(off, sizes_[b]).imag() = L.solve(RVec(q.block(b).imag()));
    off += sizes_[b];
  }
  return w;
}

SkeletonField BlockImpedance::unwhiten(const Vec& w) const {
  std::vector<Vec> out;
  Eigen::Index off = 0;
  for (int b = 0; b < num_blocks(); ++b) {
    if (off + sizes_[b] > w.size()) throw InvalidArgument("unwhiten: vector too short");
    const auto L = factors_[b].triangularView<Eigen::Lower>();
    Vec x(sizes_[b]);
    x.real() = L * RVec(w.segment(off, sizes_[b]).real());
    x.imag() = L * RVec(w.segment(off, sizes_[b]).imag());
    out.push_back(std::move(x));
    off += sizes_[b];
  }
  if (off != w.size()) throw InvalidArgument("unwhiten: vector too long");
  return {FieldKind::dual, std::move(out)};
}

Vec BlockImpedance::g_solve(const Vec& x) const {
  Vec y(x.size());
  y.real() = G_llt_.solve(RVec(x.real()));
  y.imag() = G_llt_.solve(RVec(x.imag()));
  return y;
}

void BlockImpedance::tamper_for_testing(int b, double eps) {
  if (blocks_[b].rows() < 2) return;
  blocks_[b](0, 1) += eps * blocks_[b](0, 0);
}

}  // namespace osm
