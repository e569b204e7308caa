#pragma once

#include <vector>

#include "seqrecon/edge_detect.hpp"

namespace seqrecon {

/// Per-pixel l1 weights for the weighted TV penalty.
struct WeightMask {
  Eigen::VectorXd w;   // length side^2, row-major pixel order
  double tau = 0.0;    // threshold tau^w
  long edge_count = 0; // c = #{i : r_i > tau}
  bool degenerate = false;  // c == 0, all weights 1
};

struct Indicator {
  Eigen::VectorXd r;
  bool no_edges = false;  // every product |g v| was zero
};

/// Population variance across the columns of P (one row per pixel).
Eigen::VectorXd pointwise_variance(const Eigen::MatrixXd& P);

/// r_i = |g_i v_i| / max_i |g_i v_i|.
Indicator normalized_indicator(const Eigen::VectorXd& gbar, const Eigen::VectorXd& v);

/// w_i = (1 - r_i)/c above tau, 1 elsewhere.
WeightMask build_weights(const Eigen::VectorXd& r, double tau);

/// Default threshold 1/(2N+1).
inline double default_weight_threshold(const GridSpec& grid) { return 1.0 / grid.side(); }

/// Rows = pixels, columns = |H_theta_m|.
Eigen::MatrixXd rotation_magnitudes(const EdgeMap& map);

/// Full chain: magnitudes of the per-rotation maps, their variance, the
/// normalized indicator against the averaged map, and the thresholded weights.
WeightMask weights_from_edges(const EdgeMap& map, double tau);

inline Eigen::VectorXd vectorize(const RealImage& a) {
  return Eigen::Map<const Eigen::VectorXd>(a.data(), a.size());
}

inline RealImage unvectorize(const Eigen::VectorXd& v, Eigen::Index rows, Eigen::Index cols) {
  if (v.size() != rows * cols) throw DimensionError("unvectorize: size mismatch");
  return Eigen::Map<const RealImage>(v.data(), rows, cols);
}

}  // namespace seqrecon
