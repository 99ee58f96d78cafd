#include "osm/traces.hpp"

#include <string>

namespace osm {

TraceOperator::TraceOperator(const SkeletonIndex& index, const std::vector<LocalForms>& forms)
    : num_gamma_(index.block_size(gamma_block)), blocks_(forms.size()) {
  for (std::size_t j = 0; j < forms.size(); ++j) {
    const auto& f = forms[j];
    Block& b = blocks_[j];
    b.num_interior = f.num_interior;
    b.num_boundary = f.num_boundary();
    if (b.num_boundary != index.block_size(static_cast<int>(j) + 1)) {
      throw InvalidArgument("TraceOperator: block size mismatch for subdomain " + std::to_string(j));
    }
    const int ni = b.num_interior;
    b.H_ib = f.H.block(0, ni, ni, b.num_boundary);
    if (ni > 0) {
      RSpMat Hii = f.H.topLeftCorner(ni, ni);
      b.H_ii.compute(Hii);
      if (b.H_ii.info() != Eigen::Success) {
        throw std::runtime_error("TraceOperator: interior H block of subdomain " + std::to_string(j) +
                                 " is not SPD");
      }
    }
  }
}

SkeletonField TraceOperator::apply(const VolumeTuple& u) const {
  std::vector<Vec> blocks;
  blocks.push_back(u.alpha);
  for (std::size_t j = 0; j < blocks_.size(); ++j) {
    blocks.push_back(u.omega[j].tail(blocks_[j].num_boundary));
  }
  return {FieldKind::primal, std::move(blocks)};
}

VolumeTuple TraceOperator::adjoint(const SkeletonField& p) const {
  if (p.kind() != FieldKind::dual) throw InvalidArgument("TraceOperator::adjoint expects a dual field");
  VolumeTuple t;
  t.kind = FieldKind::dual;
  t.alpha = p.block(gamma_block);
  t.p = Vec::Zero(num_gamma_);
  for (std::size_t j = 0; j < blocks_.size(); ++j) {
    Vec w = Vec::Zero(blocks_[j].num_interior + blocks_[j].num_boundary);
    w.tail(blocks_[j].num_boundary) = p.block(static_cast<int>(j) + 1);
    t.omega.push_back(std::move(w));
  }
  return t;
}

Vec TraceOperator::lift_block(int j, const Vec& vb) const {
  const Block& b = blocks_[j];
  Vec w(b.num_interior + b.num_boundary);
  w.tail(b.num_boundary) = vb;
  if (b.num_interior > 0) {
    const Eigen::VectorXd re = b.H_ib * vb.real();
    const Eigen::VectorXd im = b.H_ib * vb.imag();
    Vec ui(b.num_interior);
    ui.real() = -b.H_ii.solve(re);
    ui.imag() = -b.H_ii.solve(im);
    w.head(b.num_interior) = ui;
  }
  return w;
}

VolumeTuple TraceOperator::lift(const SkeletonField& v) const {
  if (v.kind() != FieldKind::primal) throw InvalidArgument("TraceOperator::lift expects a primal field");
  VolumeTuple t;
  t.kind = FieldKind::primal;
  t.alpha = v.block(gamma_block);
  t.p = Vec::Zero(num_gamma_);
  for (std::size_t j = 0; j < blocks_.size(); ++j) {
    t.omega.push_back(lift_block(static_cast<int>(j), v.block(static_cast<int>(j) + 1)));
  }
  return t;
}

SkeletonField TraceOperator::lift_adjoint(const VolumeTuple& phi) const {
  if (phi.kind != FieldKind::dual) throw InvalidArgument("TraceOperator::lift_adjoint expects a dual tuple");
  std::vector<Vec> blocks;
  blocks.push_back(phi.alpha);
  for (std::size_t j = 0; j < blocks_.size(); ++j) {
    const Block& b = blocks_[j];
    Vec out = phi.omega[j].tail(b.num_boundary);
    if (b.num_interior > 0) {
      const Vec pi = phi.omega[j].head(b.num_interior);
      Vec y(b.num_interior);
      y.real() = b.H_ii.solve(Eigen::VectorXd(pi.real()));
      y.imag() = b.H_ii.solve(Eigen::VectorXd(pi.imag()));
      const RSpMat Hbi = b.H_ib.transpose();
      out.real() -= Hbi * y.real();
      out.imag() -= Hbi * y.imag();
    }
    blocks.push_back(std::move(out));
  }
  return {FieldKind::dual, std::move(blocks)};
}

SingleTraceBasis::SingleTraceBasis(const SkeletonIndex& index) : index_(index) {
  std::vector<Eigen::Triplet<double>> trip;
  int row = 0;
  for (const auto& m : index.block_map) {
    for (int pos : m) trip.emplace_back(row++, pos, 1.0);
  }
  E_.resize(row, index.num_skeleton());
  E_.setFromTriplets(trip.begin(), trip.end());
}

SkeletonField SingleTraceBasis::embed(const Vec& x) const {
  if (x.size() != index_.num_skeleton()) throw InvalidArgument("SingleTraceBasis::embed: length mismatch");
  std::vector<Vec> blocks;
  for (const auto& m : index_.block_map) {
    Vec b(static_cast<Eigen::Index>(m.size()));
    for (std::size_t k = 0; k < m.size(); ++k) b[k] = x[m[k]];
    blocks.push_back(std::move(b));
  }
  return {FieldKind::primal, std::move(blocks)};
}

Vec SingleTraceBasis::adjoint(const SkeletonField& q) const {
  if (q.kind() != FieldKind::dual) throw InvalidArgument("SingleTraceBasis::adjoint expects a dual field");
  Vec out = Vec::Zero(index_.num_skeleton());
  for (int b = 0; b < index_.num_blocks(); ++b) {
    const auto& m = index_.block_map[b];
    for (std::size_t k = 0; k < m.size(); ++k) out[m[k]] += q.block(b)[k];
  }
  return out;
}

cplx duality_pair(const SkeletonField& p, const SkeletonField& v) {
  if (p.kind() != FieldKind::dual || v.kind() != FieldKind::primal) {
    throw InvalidArgument("duality_pair: expects (dual, primal)");
  }
  if (p.num_blocks() != v.num_blocks()) throw InvalidArgument("duality_pair: block count mismatch");
  cplx s = 0.0;
  for (int b = 0; b < p.num_blocks(); ++b) {
    if (p.block(b).size() != v.block(b).size()) throw InvalidArgument("duality_pair: block size mismatch");
    s += (p.block(b).transpose() * v.block(b))(0);
  }
  return s;
}

cplx skew_pair(const SkeletonField& u, const SkeletonField& p, const SkeletonField& v,
               const SkeletonField& q) {
  return duality_pair(q, u) - duality_pair(p, v);
}

}  // namespace osm
