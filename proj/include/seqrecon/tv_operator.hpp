#pragma once

#include "seqrecon/grid.hpp"

namespace seqrecon {

/// Anisotropic first-difference operator L on a rows x cols image.
///
/// Output layout: the first rows*cols entries are differences along the row
/// index (x), the second half along the column index (y), each row-major.
/// (Lx)_i = x(i+1) - x(i); with `periodic` the last difference wraps around,
/// with `replicate` it is zero.
class TVOperator {
 public:
  enum class Boundary { periodic, replicate };

  TVOperator(Eigen::Index rows, Eigen::Index cols, Boundary boundary = Boundary::periodic);

  Eigen::Index rows() const { return rows_; }
  Eigen::Index cols() const { return cols_; }
  Eigen::Index input_size() const { return rows_ * cols_; }
  Eigen::Index output_size() const { return 2 * rows_ * cols_; }
  Boundary boundary() const { return boundary_; }

  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
  Eigen::VectorXd apply_adjoint(const Eigen::VectorXd& y) const;
  /// L^T L x without forming the intermediate in the caller.
  Eigen::VectorXd normal(const Eigen::VectorXd& x) const { return apply_adjoint(apply(x)); }

  /// Eigenvalue of L^T L at DFT index (k,l), periodic case only:
  /// 4 sin^2(pi k/rows) + 4 sin^2(pi l/cols).
  double normal_eigenvalue(Eigen::Index k, Eigen::Index l) const;

 private:
  void check_input(const Eigen::VectorXd& x) const;

  Eigen::Index rows_, cols_;
  Boundary boundary_;
};

}  // namespace seqrecon
