#include "seqrecon/tv_operator.hpp"

#include <cmath>
#include <numbers>

namespace seqrecon {

TVOperator::TVOperator(Eigen::Index rows, Eigen::Index cols, Boundary boundary)
    : rows_(rows), cols_(cols), boundary_(boundary) {
  if (rows < 1 || cols < 1) throw DimensionError("TVOperator: empty image");
}

void TVOperator::check_input(const Eigen::VectorXd& x) const {
  if (x.size() != input_size())
    throw DimensionError("TVOperator: input has " + std::to_string(x.size()) + " entries, expected " +
                         std::to_string(input_size()));
}

Eigen::VectorXd TVOperator::apply(const Eigen::VectorXd& x) const {
  check_input(x);
  const bool wrap = boundary_ == Boundary::periodic;
  const Eigen::Index n = input_size();
  Eigen::VectorXd y(output_size());
  for (Eigen::Index i = 0; i < rows_; ++i) {
    for (Eigen::Index j = 0; j < cols_; ++j) {
      const Eigen::Index p = i * cols_ + j;
      if (i + 1 < rows_) y(p) = x((i + 1) * cols_ + j) - x(p);
      else y(p) = wrap ? x(j) - x(p) : 0.0;
      if (j + 1 < cols_) y(n + p) = x(p + 1) - x(p);
      else y(n + p) = wrap ? x(i * cols_) - x(p) : 0.0;
    }
  }
  return y;
}

Eigen::VectorXd TVOperator::apply_adjoint(const Eigen::VectorXd& y) const {
  if (y.size() != output_size())
    throw DimensionError("TVOperator: adjoint input has " + std::to_string(y.size()) +
                         " entries, expected " + std::to_string(output_size()));
  const bool wrap = boundary_ == Boundary::periodic;
  const Eigen::Index n = input_size();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < rows_; ++i) {
    for (Eigen::Index j = 0; j < cols_; ++j) {
      const Eigen::Index p = i * cols_ + j;
      const double a = y(p), b = y(n + p);
      if (i + 1 < rows_) {
        x((i + 1) * cols_ + j) += a;
        x(p) -= a;
      } else if (wrap) {
        x(j) += a;
        x(p) -= a;
      }
      if (j + 1 < cols_) {
        x(p + 1) += b;
        x(p) -= b;
      } else if (wrap) {
        x(i * cols_) += b;
        x(p) -= b;
      }
    }
  }
  return x;
}

double TVOperator::normal_eigenvalue(Eigen::Index k, Eigen::Index l) const {
  if (boundary_ != Boundary::periodic)
    throw Error("TVOperator: DFT eigenvalues exist only for periodic boundary");
  using std::numbers::pi;
  const double a = std::sin(pi * static_cast<double>(k) / rows_);
  const double b = std::sin(pi * static_cast<double>(l) / cols_);
  return 4.0 * (a * a + b * b);
}

}  // namespace seqrecon
