#pragma once

#include <vector>

#include "osm/geometry.hpp"
#include "osm/types.hpp"

namespace osm {

/// Primal fields are tuples of Dirichlet traces, dual fields tuples of
/// Neumann-type traces. Both use nodal coordinates; they pair through the
/// unconjugated dot product.
enum class FieldKind { primal, dual };

const char* to_string(FieldKind kind);

/// One complex vector per skeleton block (block 0 = outer boundary).
class SkeletonField {
 public:
  SkeletonField() = default;
  SkeletonField(FieldKind kind, std::vector<Vec> blocks);

  static SkeletonField zeros(const SkeletonIndex& index, FieldKind kind);
  /// Inverse of flatten(): split a concatenated vector into blocks.
  static SkeletonField from_flat(const SkeletonIndex& index, FieldKind kind, const Vec& flat);

  FieldKind kind() const { return kind_; }
  int num_blocks() const { return static_cast<int>(blocks_.size()); }
  Vec& block(int b) { return blocks_[b]; }
  const Vec& block(int b) const { return blocks_[b]; }
  const std::vector<Vec>& blocks() const { return blocks_; }

  Vec flatten() const;
  int size() const;
  double coeff_norm() const;

  SkeletonField& operator+=(const SkeletonField& other);
  SkeletonField& operator-=(const SkeletonField& other);
  SkeletonField& operator*=(cplx a);

 private:
  void require_same(const SkeletonField& other, const char* op) const;

  FieldKind kind_ = FieldKind::primal;
  std::vector<Vec> blocks_;
};

SkeletonField operator+(SkeletonField a, const SkeletonField& b);
SkeletonField operator-(SkeletonField a, const SkeletonField& b);
SkeletonField operator*(cplx a, SkeletonField b);

/// Element of the broken volume space: the boundary pair (alpha, p) and one
/// coefficient vector per subdomain, ordered interior dofs first then
/// boundary dofs. A dual tuple stores functionals in the same layout.
struct VolumeTuple {
  FieldKind kind = FieldKind::primal;
  Vec alpha;
  Vec p;
  std::vector<Vec> omega;

  VolumeTuple& operator+=(const VolumeTuple& other);
  VolumeTuple& operator-=(const VolumeTuple& other);
  VolumeTuple& operator*=(cplx a);
  double coeff_norm() const;
};

VolumeTuple operator+(VolumeTuple a, const VolumeTuple& b);
VolumeTuple operator-(VolumeTuple a, const VolumeTuple& b);

/// Bilinear pairing <dual, volume> summed over all slots, no conjugation.
cplx pair_volume(const VolumeTuple& dual, const VolumeTuple& primal);

}  // namespace osm
