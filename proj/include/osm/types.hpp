#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace osm {

using cplx = std::complex<double>;
using Vec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;
using Mat = Eigen::MatrixXcd;
using RMat = Eigen::MatrixXd;
using SpMat = Eigen::SparseMatrix<cplx>;
using RSpMat = Eigen::SparseMatrix<double>;

inline constexpr cplx I{0.0, 1.0};

/// Raised when an input violates a documented precondition (bad counts,
/// non-divisible partitions, kind mismatches between fields).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A local impedance problem (A_j - i B_j^T T_j B_j) is singular or too badly
/// conditioned to be trusted.
class LocalSolvabilityError : public std::runtime_error {
 public:
  LocalSolvabilityError(int block, double rcond, const std::string& what)
      : std::runtime_error(what), block_(block), rcond_(rcond) {}
  int block() const { return block_; }
  double rcond() const { return rcond_; }

 private:
  int block_;
  double rcond_;
};

/// Dense analysis was requested on a problem larger than the configured cap.
class CapExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace osm
