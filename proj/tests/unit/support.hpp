#pragma once

#include <cstdint>
#include <random>

#include "seqrecon/grid.hpp"

namespace seqrecon::testing {

inline RealImage random_image(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> n(0.0, 1.0);
  RealImage a(rows, cols);
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = n(rng);
  return a;
}

inline ComplexImage random_complex(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> n(0.0, 1.0);
  ComplexImage a(rows, cols);
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = {n(rng), n(rng)};
  return a;
}

inline Mask random_mask(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols, double density) {
  std::bernoulli_distribution b(density);
  Mask m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = b(rng) ? 1 : 0;
  return m;
}

inline Eigen::VectorXd random_vector(std::mt19937_64& rng, Eigen::Index n) {
  std::normal_distribution<double> d(0.0, 1.0);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = d(rng);
  return v;
}

}  // namespace seqrecon::testing
