#pragma once

#include "seqrecon/grid.hpp"

namespace seqrecon::fft {

/// Unnormalized 2D DFT, X(k,l) = sum_{m,n} x(m,n) exp(-2 pi i (km/R + ln/C)).
ComplexImage forward(const ComplexImage& x);
ComplexImage forward(const RealImage& x);

/// Unnormalized inverse, x(m,n) = sum_{k,l} X(k,l) exp(+2 pi i (km/R + ln/C)).
/// Divide by R*C for the true inverse.
ComplexImage backward(const ComplexImage& x);

/// Moves index 0 to the center of each axis (odd sizes: shift by (n-1)/2).
template <class ArrayT>
ArrayT to_centered(const ArrayT& a) {
  const Eigen::Index r = a.rows(), c = a.cols();
  const Eigen::Index hr = r / 2, hc = c / 2;
  ArrayT out(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) out((i + hr) % r, (j + hc) % c) = a(i, j);
  return out;
}

/// Inverse of to_centered.
template <class ArrayT>
ArrayT from_centered(const ArrayT& a) {
  const Eigen::Index r = a.rows(), c = a.cols();
  const Eigen::Index hr = r / 2, hc = c / 2;
  ArrayT out(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) out(i, j) = a((i + hr) % r, (j + hc) % c);
  return out;
}

/// Signed frequency of storage index i on an axis of length n (FFT layout).
inline int signed_frequency(Eigen::Index i, Eigen::Index n) {
  return static_cast<int>(i <= (n - 1) / 2 ? i : i - n);
}

}  // namespace seqrecon::fft
