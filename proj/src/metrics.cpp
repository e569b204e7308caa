#include "seqrecon/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace seqrecon {

double log_floor() {
  const double eps = std::numeric_limits<double>::epsilon();
  return std::log10(eps * eps);
}

RegionSelector RegionSelector::neighborhood_at(double x, double y, int side) {
  const int k = std::clamp(static_cast<int>(std::lround(x * side)), 0, side - 1);
  const int l = std::clamp(static_cast<int>(std::lround(y * side)), 0, side - 1);
  return neighborhood(k, l);
}

Mask region_mask(const RegionSelector& region, Eigen::Index rows, Eigen::Index cols) {
  switch (region.kind) {
    case RegionSelector::Kind::whole:
      return Mask::Ones(rows, cols);
    case RegionSelector::Kind::smooth:
    case RegionSelector::Kind::occluded:
      if (region.mask.rows() != rows || region.mask.cols() != cols)
        throw DimensionError("region mask does not match the image");
      return region.mask;
    case RegionSelector::Kind::point_neighborhood: {
      Mask m = Mask::Zero(rows, cols);
      for (int dk = -region.half_width; dk <= region.half_width; ++dk)
        for (int dl = -region.half_width; dl <= region.half_width; ++dl) {
          const Eigen::Index k = region.k + dk, l = region.l + dl;
          if (k >= 0 && l >= 0 && k < rows && l < cols) m(k, l) = 1;
        }
      return m;
    }
  }
  return Mask::Zero(rows, cols);
}

MseLog mse_log(const ImageGrid& f, const ImageGrid& approx, const RegionSelector& region) {
  f.check();
  approx.check();
  require_same_shape(f.values, approx.values, "mse_log");
  const Mask m = region_mask(region, f.values.rows(), f.values.cols());
  MseLog out;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    if (!m.data()[i]) continue;
    const double e = f.values.data()[i] - approx.values.data()[i];
    acc += e * e;
    ++out.size;
  }
  if (out.size == 0) throw Error("mse_log: empty region");
  const double mse = acc / static_cast<double>(out.size);
  if (mse == 0.0) {
    out.clamped = true;
    out.value = log_floor();
  } else {
    out.value = std::max(std::log10(mse), log_floor());
  }
  return out;
}

LogError pointwise_log_error(const ImageGrid& f, const ImageGrid& approx) {
  require_same_shape(f.values, approx.values, "pointwise_log_error");
  LogError out;
  out.value.resize(f.values.rows(), f.values.cols());
  for (Eigen::Index i = 0; i < f.values.size(); ++i) {
    const double e = std::abs(f.values.data()[i] - approx.values.data()[i]);
    if (e == 0.0) {
      ++out.clamped;
      out.value.data()[i] = log_floor();
    } else {
      out.value.data()[i] = std::log10(e);
    }
  }
  return out;
}

namespace {

Mask chebyshev_dilate(const Mask& m, int radius) {
  if (radius <= 0) return m;
  const Eigen::Index r = m.rows(), c = m.cols();
  Mask out = Mask::Zero(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) {
      if (!m(i, j)) continue;
      for (Eigen::Index a = std::max<Eigen::Index>(0, i - radius); a <= std::min(r - 1, i + radius); ++a)
        for (Eigen::Index b = std::max<Eigen::Index>(0, j - radius); b <= std::min(c - 1, j + radius);
             ++b)
          out(a, b) = 1;
    }
  return out;
}

}  // namespace

Mask edge_band(const RealImage& truth, int radius) {
  const Eigen::Index r = truth.rows(), c = truth.cols();
  Mask edge = Mask::Zero(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) {
      if (i + 1 < r && truth(i + 1, j) != truth(i, j)) edge(i, j) = edge(i + 1, j) = 1;
      if (j + 1 < c && truth(i, j + 1) != truth(i, j)) edge(i, j) = edge(i, j + 1) = 1;
    }
  return chebyshev_dilate(edge, radius);
}

Mask smooth_region(const RealImage& truth, const Mask& occluded, int radius) {
  require_same_shape(truth, occluded, "smooth_region");
  // The occluder outline is a jump in the observed scene, so its band is
  // excluded along with the true edges.
  const Mask band = edge_band(truth, radius);
  const Mask covered = chebyshev_dilate(occluded, radius);
  return ((band == 0) && (covered == 0)).cast<std::uint8_t>();
}

}  // namespace seqrecon
