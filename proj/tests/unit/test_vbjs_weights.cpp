#include <doctest.h>

#include "seqrecon/phantoms.hpp"
#include "seqrecon/metrics.hpp"
#include "seqrecon/vbjs_weights.hpp"
#include "support.hpp"

using namespace seqrecon;

TEST_CASE("pointwise variance is the population variance of each row") {
  std::mt19937_64 rng(21);
  Eigen::MatrixXd P(30, 7);
  for (Eigen::Index i = 0; i < P.size(); ++i) P.data()[i] = std::uniform_real_distribution<double>(0, 3)(rng);
  const Eigen::VectorXd v = pointwise_variance(P);
  for (Eigen::Index i = 0; i < P.rows(); ++i) {
    double mean = 0.0;
    for (Eigen::Index m = 0; m < P.cols(); ++m) mean += P(i, m);
    mean /= P.cols();
    double var = 0.0;
    for (Eigen::Index m = 0; m < P.cols(); ++m) var += (P(i, m) - mean) * (P(i, m) - mean);
    CHECK(v(i) == doctest::Approx(var / P.cols()).epsilon(1e-12));
  }
  CHECK_THROWS_AS(pointwise_variance(Eigen::MatrixXd::Ones(4, 1)), Error);
  CHECK(pointwise_variance(Eigen::MatrixXd::Constant(3, 5, 2.0)).maxCoeff() == 0.0);
}

TEST_CASE("normalized indicator") {
  Eigen::VectorXd g(3), v(3);
  g << 1.0, -2.0, 0.5;
  v << 0.5, 1.0, 0.0;
  const Indicator ind = normalized_indicator(g, v);
  CHECK_FALSE(ind.no_edges);
  CHECK(ind.r(0) == doctest::Approx(0.25));
  CHECK(ind.r(1) == 1.0);
  CHECK(ind.r(2) == 0.0);
  const Indicator none = normalized_indicator(g, Eigen::VectorXd::Zero(3));
  CHECK(none.no_edges);
  CHECK(none.r.maxCoeff() == 0.0);
  CHECK_THROWS_AS(normalized_indicator(g, Eigen::VectorXd::Zero(2)), DimensionError);
}

TEST_CASE("weights on a worked example") {
  Eigen::VectorXd r(4);
  r << 0.9, 0.5, 0.01, 0.0;
  const WeightMask w = build_weights(r, 0.05);
  CHECK(w.edge_count == 2);
  CHECK(w.w(0) == doctest::Approx(0.05));
  CHECK(w.w(1) == doctest::Approx(0.25));
  CHECK(w.w(2) == 1.0);
  CHECK(w.w(3) == 1.0);
  CHECK_FALSE(w.degenerate);

  const WeightMask flat = build_weights(Eigen::VectorXd::Zero(5), 0.1);
  CHECK(flat.degenerate);
  CHECK(flat.w.minCoeff() == 1.0);
  CHECK_THROWS_AS(build_weights(Eigen::VectorXd::Constant(2, 1.5), 0.1), Error);
}

TEST_CASE("weight properties on random indicators") {
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::Index n = 1 + static_cast<Eigen::Index>(u(rng) * 200);
    Eigen::VectorXd r(n);
    for (Eigen::Index i = 0; i < n; ++i) r(i) = u(rng) < 0.7 ? 0.1 * u(rng) : u(rng);
    const double tau = 0.2 * u(rng);
    const WeightMask w = build_weights(r, tau);
    CHECK(w.edge_count == (r.array() > tau).count());
    for (Eigen::Index i = 0; i < n; ++i) {
      CHECK(w.w(i) >= 0.0);
      CHECK(w.w(i) <= 1.0);
      if (r(i) <= tau) CHECK(w.w(i) == 1.0);
      // Above the threshold, larger indicator means smaller weight.
      for (Eigen::Index j = 0; j < n; j += 7)
        if (r(i) > tau && r(j) > tau && r(i) > r(j)) CHECK(w.w(i) <= w.w(j));
    }
  }
}

TEST_CASE("default threshold") {
  CHECK(default_weight_threshold(GridSpec(64)) == doctest::Approx(1.0 / 129.0));
}

TEST_CASE("vectorize is row-major and invertible") {
  RealImage a(2, 3);
  a << 1, 2, 3, 4, 5, 6;
  const Eigen::VectorXd v = vectorize(a);
  CHECK(v(1) == 2.0);
  CHECK(v(3) == 4.0);
  CHECK((unvectorize(v, 2, 3) == a).all());
  CHECK_THROWS_AS(unvectorize(v, 4, 2), DimensionError);
}

TEST_CASE("weights on a noiseless disk separate edges from flat regions") {
  // One contrast level: the indicator scales roughly with contrast cubed, so
  // in multi-contrast scenes at small N faint boundaries can fall under tau.
  const GridSpec g(32);
  SceneSpec scene;
  scene.frames = 1;
  Shape disk;
  disk.value = 1.0;
  disk.a = disk.b = 0.25;
  scene.background = {disk};
  scene.occlusions = {{}};
  SimulationOptions opt;
  opt.grid = g;
  opt.apply_bands = false;
  opt.noise.sigma = {0.0};
  const auto frames = acquire(scene, opt);
  const EdgeMap map = edge_map(frames[0], 10, EdgeRegularizer::for_grid(g));
  const WeightMask w = weights_from_edges(map, default_weight_threshold(g));
  const RealImage truth = rasterize(scene, 1, g).values;
  const Mask edges = edge_band(truth, 0);
  const Mask smooth = smooth_region(truth, Mask::Zero(g.side(), g.side()), 2);
  double we = 0.0, ws = 0.0;
  long ne = 0, ns = 0;
  for (Eigen::Index i = 0; i < truth.size(); ++i) {
    if (edges.data()[i]) we += w.w(i), ++ne;
    if (smooth.data()[i]) ws += w.w(i), ++ns;
  }
  REQUIRE(ne > 0);
  REQUIRE(ns > 0);
  CHECK(we / ne < 0.1 * ws / ns);
  CHECK(ws / ns == 1.0);
}
