#pragma once

#include <random>

#include "osm/fields.hpp"
#include "osm/geometry.hpp"
#include "osm/types.hpp"

namespace testutil {

inline std::mt19937_64& rng() {
  static std::mt19937_64 g(42);
  return g;
}

inline osm::Vec random_vec(Eigen::Index n) {
  std::normal_distribution<double> nd;
  osm::Vec v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = osm::cplx(nd(rng()), nd(rng()));
  return v;
}

inline osm::SkeletonField random_field(const osm::SkeletonIndex& idx, osm::FieldKind kind) {
  return osm::SkeletonField::from_flat(idx, kind, random_vec(idx.total_block_size()));
}

inline double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace testutil
