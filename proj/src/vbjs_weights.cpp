#include "seqrecon/vbjs_weights.hpp"

namespace seqrecon {

Eigen::VectorXd pointwise_variance(const Eigen::MatrixXd& P) {
  if (P.cols() < 2) throw Error("pointwise_variance: need at least 2 columns");
  const Eigen::VectorXd mean = P.rowwise().mean();
  return (P.array().square().rowwise().mean() - mean.array().square()).cwiseMax(0.0).matrix();
}

Indicator normalized_indicator(const Eigen::VectorXd& gbar, const Eigen::VectorXd& v) {
  if (gbar.size() != v.size()) throw DimensionError("normalized_indicator: size mismatch");
  Indicator out;
  const Eigen::VectorXd prod = (gbar.array() * v.array()).abs().matrix();
  const double peak = prod.size() ? prod.maxCoeff() : 0.0;
  if (!(peak > 0.0)) {
    out.r = Eigen::VectorXd::Zero(prod.size());
    out.no_edges = true;
    return out;
  }
  out.r = prod / peak;
  return out;
}

WeightMask build_weights(const Eigen::VectorXd& r, double tau) {
  if ((r.array() < 0.0).any() || (r.array() > 1.0).any())
    throw Error("build_weights: indicator must lie in [0,1]");
  WeightMask m;
  m.tau = tau;
  m.edge_count = (r.array() > tau).count();
  m.w = Eigen::VectorXd::Ones(r.size());
  if (m.edge_count == 0) {
    m.degenerate = true;
    return m;
  }
  const double c = static_cast<double>(m.edge_count);
  for (Eigen::Index i = 0; i < r.size(); ++i)
    if (r(i) > tau) m.w(i) = (1.0 - r(i)) / c;
  return m;
}

Eigen::MatrixXd rotation_magnitudes(const EdgeMap& map) {
  if (map.per_rotation.empty()) throw Error("rotation_magnitudes: empty edge map");
  const Eigen::Index n = map.per_rotation.front().size();
  Eigen::MatrixXd P(n, static_cast<Eigen::Index>(map.per_rotation.size()));
  for (size_t m = 0; m < map.per_rotation.size(); ++m) {
    if (map.per_rotation[m].size() != n) throw DimensionError("rotation_magnitudes: ragged maps");
    P.col(static_cast<Eigen::Index>(m)) = vectorize(map.per_rotation[m].abs());
  }
  return P;
}

WeightMask weights_from_edges(const EdgeMap& map, double tau) {
  const Eigen::VectorXd v = pointwise_variance(rotation_magnitudes(map));
  const Indicator ind = normalized_indicator(vectorize(map.averaged), v);
  return build_weights(ind.r, tau);
}

}  // namespace seqrecon
