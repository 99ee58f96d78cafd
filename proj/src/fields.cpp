#include "osm/fields.hpp"

#include <string>

namespace osm {

const char* to_string(FieldKind kind) { return kind == FieldKind::primal ? "primal" : "dual"; }

SkeletonField::SkeletonField(FieldKind kind, std::vector<Vec> blocks)
    : kind_(kind), blocks_(std::move(blocks)) {}

SkeletonField SkeletonField::zeros(const SkeletonIndex& index, FieldKind kind) {
  std::vector<Vec> blocks;
  blocks.reserve(index.num_blocks());
  for (int b = 0; b < index.num_blocks(); ++b) blocks.push_back(Vec::Zero(index.block_size(b)));
  return {kind, std::move(blocks)};
}

SkeletonField SkeletonField::from_flat(const SkeletonIndex& index, FieldKind kind, const Vec& flat) {
  if (flat.size() != index.total_block_size()) {
    throw InvalidArgument("SkeletonField::from_flat: expected length " +
                          std::to_string(index.total_block_size()) + ", got " +
                          std::to_string(flat.size()));
  }
  std::vector<Vec> blocks;
  Eigen::Index offset = 0;
  for (int b = 0; b < index.num_blocks(); ++b) {
    const int n = index.block_size(b);
    blocks.push_back(flat.segment(offset, n));
    offset += n;
  }
  return {kind, std::move(blocks)};
}

Vec SkeletonField::flatten() const {
  Vec out(size());
  Eigen::Index offset = 0;
  for (const auto& blk : blocks_) {
    out.segment(offset, blk.size()) = blk;
    offset += blk.size();
  }
  return out;
}

int SkeletonField::size() const {
  Eigen::Index n = 0;
  for (const auto& blk : blocks_) n += blk.size();
  return static_cast<int>(n);
}

double SkeletonField::coeff_norm() const {
  double s = 0.0;
  for (const auto& blk : blocks_) s += blk.squaredNorm();
  return std::sqrt(s);
}

void SkeletonField::require_same(const SkeletonField& other, const char* op) const {
  if (kind_ != other.kind_) {
    throw InvalidArgument(std::string("SkeletonField ") + op + ": kind mismatch (" +
                          to_string(kind_) + " vs " + to_string(other.kind_) + ")");
  }
  if (blocks_.size() != other.blocks_.size()) {
    throw InvalidArgument(std::string("SkeletonField ") + op + ": block count mismatch");
  }
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    if (blocks_[b].size() != other.blocks_[b].size()) {
      throw InvalidArgument(std::string("SkeletonField ") + op + ": block size mismatch");
    }
  }
}

SkeletonField& SkeletonField::operator+=(const SkeletonField& other) {
  require_same(other, "+=");
  for (std::size_t b = 0; b < blocks_.size(); ++b) blocks_[b] += other.blocks_[b];
  return *this;
}

SkeletonField& SkeletonField::operator-=(const SkeletonField& other) {
  require_same(other, "-=");
  for (std::size_t b = 0; b < blocks_.size(); ++b) blocks_[b] -= other.blocks_[b];
  return *this;
}

SkeletonField& SkeletonField::operator*=(cplx a) {
  for (auto& blk : blocks_) blk *= a;
  return *this;
}

SkeletonField operator+(SkeletonField a, const SkeletonField& b) { return a += b; }
SkeletonField operator-(SkeletonField a, const SkeletonField& b) { return a -= b; }
SkeletonField operator*(cplx a, SkeletonField b) { return b *= a; }

namespace {

void require_same(const VolumeTuple& a, const VolumeTuple& b) {
  if (a.kind != b.kind) throw InvalidArgument("VolumeTuple: kind mismatch");
  if (a.omega.size() != b.omega.size() || a.alpha.size() != b.alpha.size() ||
      a.p.size() != b.p.size()) {
    throw InvalidArgument("VolumeTuple: dimension mismatch");
  }
  for (std::size_t j = 0; j < a.omega.size(); ++j) {
    if (a.omega[j].size() != b.omega[j].size()) throw InvalidArgument("VolumeTuple: block size mismatch");
  }
}

}  // namespace

VolumeTuple& VolumeTuple::operator+=(const VolumeTuple& other) {
  require_same(*this, other);
  alpha += other.alpha;
  p += other.p;
  for (std::size_t j = 0; j < omega.size(); ++j) omega[j] += other.omega[j];
  return *this;
}

VolumeTuple& VolumeTuple::operator-=(const VolumeTuple& other) {
  require_same(*this, other);
  alpha -= other.alpha;
  p -= other.p;
  for (std::size_t j = 0; j < omega.size(); ++j) omega[j] -= other.omega[j];
  return *this;
}

VolumeTuple& VolumeTuple::operator*=(cplx a) {
  alpha *= a;
  p *= a;
  for (auto& w : omega) w *= a;
  return *this;
}

double VolumeTuple::coeff_norm() const {
  double s = alpha.squaredNorm() + p.squaredNorm();
  for (const auto& w : omega) s += w.squaredNorm();
  return std::sqrt(s);
}

VolumeTuple operator+(VolumeTuple a, const VolumeTuple& b) { return a += b; }
VolumeTuple operator-(VolumeTuple a, const VolumeTuple& b) { return a -= b; }

cplx pair_volume(const VolumeTuple& dual, const VolumeTuple& primal) {
  if (dual.kind != FieldKind::dual || primal.kind != FieldKind::primal) {
    throw InvalidArgument("pair_volume: expects (dual, primal)");
  }
  cplx s = (dual.alpha.transpose() * primal.alpha)(0);
  s += (dual.p.transpose() * primal.p)(0);
  for (std::size_t j = 0; j < dual.omega.size(); ++j) s += (dual.omega[j].transpose() * primal.omega[j])(0);
  return s;
}

}  // namespace osm
