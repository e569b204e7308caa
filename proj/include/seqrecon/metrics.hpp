#pragma once

#include <string>
#include <vector>

#include "seqrecon/grid.hpp"

namespace seqrecon {

struct RegionSelector {
  enum class Kind { whole, smooth, occluded, point_neighborhood };

  Kind kind = Kind::whole;
  Mask mask;        // smooth / occluded: the precomputed region
  int k = 0, l = 0; // neighborhood center
  int half_width = 2;  // 5 x 5

  static RegionSelector whole() { return {}; }
  static RegionSelector smooth(Mask m) { return {Kind::smooth, std::move(m)}; }
  static RegionSelector occluded(Mask m) { return {Kind::occluded, std::move(m)}; }
  static RegionSelector neighborhood(int k, int l) {
    return {Kind::point_neighborhood, Mask(), k, l, 2};
  }
  /// Nearest grid pixel to (x, y) in unit coordinates.
  static RegionSelector neighborhood_at(double x, double y, int side);
};

/// Region as a mask on a rows x cols grid (neighborhoods are clipped at the border).
Mask region_mask(const RegionSelector& region, Eigen::Index rows, Eigen::Index cols);

struct MseLog {
  double value = 0.0;
  long size = 0;
  bool clamped = false;  // exact zero error, reported as log10(eps^2)
};

/// log10 of the mean squared error over the region.
MseLog mse_log(const ImageGrid& f, const ImageGrid& approx, const RegionSelector& region);

struct LogError {
  RealImage value;
  long clamped = 0;
};

/// Entrywise log10 |f - approx|, zeros clamped to log10(eps^2).
LogError pointwise_log_error(const ImageGrid& f, const ImageGrid& approx);

double log_floor();

/// Pixels within `radius` (Chebyshev) of a neighbour with a different value.
Mask edge_band(const RealImage& truth, int radius);

/// Pixels farther than `radius` from both the true edges and the occluded set.
Mask smooth_region(const RealImage& truth, const Mask& occluded, int radius = 2);

}  // namespace seqrecon
