#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace seqrecon {

using RealImage = Eigen::Array<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ComplexImage =
    Eigen::Array<std::complex<double>, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
/// Binary array, 1 = set. Stored as bytes so it maps directly onto the `.sqr` u8 dtype.
using Mask = Eigen::Array<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Uniform pixel grid on the unit square with 2N+1 points per axis.
///
/// Row index mu corresponds to x and frequency k, column index nu to y and
/// frequency l. The grid is treated as one period of a 1-periodic image, so
/// pixel mu sits at x = mu / (2N+1).
struct GridSpec {
  int half_bandwidth = 0;  // N
  int frames = 1;          // J

  GridSpec() = default;
  explicit GridSpec(int n, int j = 1) : half_bandwidth(n), frames(j) { validate(); }

  int side() const { return 2 * half_bandwidth + 1; }
  int pixels() const { return side() * side(); }
  double dx() const { return 1.0 / side(); }
  double coord(int index) const { return index * dx(); }

  /// Storage offset of frequency k in a centered array.
  int freq_offset(int k) const { return k + half_bandwidth; }

  void validate() const {
    if (half_bandwidth < 1) throw Error("GridSpec: N must be positive");
    if (frames < 1) throw Error("GridSpec: J must be positive");
  }

  bool operator==(const GridSpec&) const = default;
};

struct ImageGrid {
  GridSpec grid;
  RealImage values;

  ImageGrid() = default;
  ImageGrid(GridSpec g, RealImage v) : grid(g), values(std::move(v)) { check(); }

  static ImageGrid zeros(GridSpec g) { return {g, RealImage::Zero(g.side(), g.side())}; }

  void check() const {
    if (values.rows() != grid.side() || values.cols() != grid.side())
      throw DimensionError("ImageGrid: values are " + std::to_string(values.rows()) + "x" +
                           std::to_string(values.cols()) + ", grid side is " +
                           std::to_string(grid.side()));
  }
};

/// Fourier coefficients b_j(k,l) for k,l in [-N,N], stored centered: entry
/// (k+N, l+N) holds frequency (k,l).
struct FourierFrame {
  GridSpec grid;
  ComplexImage coeffs;
  Mask available;
  int index = 1;  // j, 1-based
  double noise_sigma = 0.0;

  std::complex<double> at(int k, int l) const {
    return coeffs(grid.freq_offset(k), grid.freq_offset(l));
  }
  bool is_available(int k, int l) const {
    return available(grid.freq_offset(k), grid.freq_offset(l)) != 0;
  }

  void check() const {
    const int s = grid.side();
    if (coeffs.rows() != s || coeffs.cols() != s || available.rows() != s ||
        available.cols() != s)
      throw DimensionError("FourierFrame: array shape does not match grid");
  }
};

inline void require_same_shape(const auto& a, const auto& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DimensionError(std::string(what) + ": shape mismatch (" + std::to_string(a.rows()) +
                         "x" + std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) +
                         "x" + std::to_string(b.cols()) + ")");
}

inline long count_set(const Mask& m) { return (m != 0).count(); }

}  // namespace seqrecon
