#include <doctest.h>

#include <cmath>

#include "seqrecon/phantoms.hpp"

using namespace seqrecon;

namespace {

Shape disk(double cx, double cy, double r, double value) {
  Shape s;
  s.cx = cx, s.cy = cy, s.a = r, s.b = r, s.value = value;
  return s;
}

int px(double u, int side) { return static_cast<int>(std::lround(u * side)); }

}  // namespace

TEST_CASE("shape membership") {
  Shape e;
  e.cx = 0.5, e.cy = 0.5, e.a = 0.2, e.b = 0.1;
  CHECK(e.contains(0.69, 0.5));
  CHECK_FALSE(e.contains(0.5, 0.61));
  e.angle_deg = 90.0;
  CHECK(e.contains(0.5, 0.69));
  CHECK_FALSE(e.contains(0.69, 0.5));

  Shape tri;
  tri.kind = Shape::Kind::polygon;
  tri.vertices = {{0.1, 0.1}, {0.9, 0.1}, {0.1, 0.9}};
  CHECK(tri.contains(0.2, 0.2));
  CHECK_FALSE(tri.contains(0.8, 0.8));
}

TEST_CASE("moving a shape") {
  Shape sq;
  sq.kind = Shape::Kind::polygon;
  sq.vertices = {{0.4, 0.4}, {0.6, 0.4}, {0.6, 0.6}, {0.4, 0.6}};
  const Shape r = sq.moved(0.1, 0.0, 90.0);
  CHECK(r.vertices[0][0] == doctest::Approx(0.7));
  CHECK(r.vertices[0][1] == doctest::Approx(0.4));
  const auto b = r.bounds();
  CHECK(b[0] == doctest::Approx(0.5));
  CHECK(b[2] == doctest::Approx(0.7));

  const Shape e = disk(0.3, 0.3, 0.1, 1.0).moved(0.2, -0.1, 15.0);
  CHECK(e.cx == doctest::Approx(0.5));
  CHECK(e.cy == doctest::Approx(0.2));
  CHECK(e.angle_deg == 15.0);
}

TEST_CASE("dynamic objects move linearly in time") {
  DynamicObject d{"a", disk(0.2, 0.5, 0.05, 1.0), {0.1, 0.0}, 10.0, 2, 4};
  CHECK_FALSE(d.present(1));
  CHECK(d.present(4));
  CHECK_FALSE(d.present(5));
  CHECK(d.at(3).cx == doctest::Approx(0.4));
  CHECK(d.at(3).angle_deg == doctest::Approx(20.0));
}

TEST_CASE("default scene") {
  const SceneSpec s = default_scene();
  CHECK_NOTHROW(s.validate());
  CHECK(s.frames == 6);
  CHECK(s.dynamic.size() == 2);
  CHECK(s.points.size() == 4);
  // Eight pixels per frame on the 129-point grid.
  CHECK(s.dynamic[0].velocity[0] * 129.0 == doctest::Approx(8.0));
  CHECK(s.dynamic[1].velocity[0] * 129.0 == doctest::Approx(-8.0));
  CHECK(s.dynamic[0].rotation_deg == 10.0);
  for (int t : {1, 2, 4, 5}) CHECK_FALSE(s.occlusions_at(t).empty());
  for (int t : {3, 6}) CHECK(s.occlusions_at(t).empty());
  CHECK(s.occlusions_at(9).empty());

  const int side = 129;
  const RealImage img = render(s, 1, side);
  CHECK(img(px(0.5, side), px(0.5, side)) == 0.0);
  CHECK(img(px(0.5, side), px(0.05, side)) == 0.3);  // annulus
  CHECK(img(px(0.30, side), px(0.28, side)) == 0.3);
  CHECK(img(px(0.72, side), px(0.27, side)) == 0.3);
  CHECK(img(px(0.22, side), px(0.55, side)) == 0.8);
  CHECK(img(px(0.72, side), px(0.74, side)) == 0.9);
  CHECK(img.maxCoeff() == 0.9);
  CHECK(img.minCoeff() == 0.0);
}

TEST_CASE("ground-truth change covers exactly the moving objects") {
  const SceneSpec s = default_scene();
  const int side = 65;
  const Mask C = ground_truth_change(s, 2, side);
  Mask expected = Mask::Zero(side, side);
  for (const auto& d : s.dynamic) {
    expected = expected.max(shape_support(d.at(2), side));
    expected = expected.max(shape_support(d.at(3), side));
  }
  CHECK((C == (expected == 0).cast<std::uint8_t>()).all());

  SceneSpec still = s;
  for (auto& d : still.dynamic) d.velocity = {0.0, 0.0}, d.rotation_deg = 0.0;
  CHECK((ground_truth_change(still, 1, side) == 1).all());

  SceneSpec appear;
  appear.frames = 2;
  appear.dynamic.push_back({"late", disk(0.5, 0.5, 0.1, 1.0), {0.0, 0.0}, 0.0, 2, 2});
  CHECK((ground_truth_change(appear, 1, side) == (shape_support(appear.dynamic[0].shape, side) == 0).cast<std::uint8_t>()).all());
}

TEST_CASE("occluded region follows the boxes") {
  const SceneSpec s = default_scene();
  const Mask m = occluded_region(s, 1, 129);
  CHECK(m(px(0.30, 129), px(0.28, 129)) == 1);
  CHECK(m(px(0.5, 129), px(0.5, 129)) == 0);
  CHECK(count_set(occluded_region(s, 3, 129)) == 0);
}

TEST_CASE("scene validation") {
  SceneSpec s;
  s.frames = 2;
  s.background.push_back(disk(0.05, 0.5, 0.1, 1.0));
  CHECK_THROWS_AS(s.validate(), Error);
  s.background = {disk(0.5, 0.5, 0.1, 1.0)};
  s.dynamic.push_back({"a", disk(0.3, 0.5, 0.1, 1.0), {0.15, 0.0}, 0.0});
  s.dynamic.push_back({"b", disk(0.7, 0.5, 0.1, 1.0), {-0.15, 0.0}, 0.0});
  CHECK_THROWS_AS(s.validate(), Error);  // they overlap at frame 2
  s.dynamic[1].velocity = {0.0, 0.0};
  s.dynamic[0].velocity = {0.0, 0.0};
  CHECK_NOTHROW(s.validate());
  s.points.push_back({"p", 0.5, 0.5, 3});
  CHECK_THROWS_AS(s.validate(), Error);
}

TEST_CASE("acquisition is deterministic in the seed") {
  const SceneSpec s = default_scene();
  SimulationOptions opt;
  opt.grid = GridSpec(16, 6);
  opt.snr_db = {5.0};
  opt.noise.seed = 4;
  const auto a = acquire(s, opt);
  const auto b = acquire(s, opt);
  opt.noise.seed = 5;
  const auto c = acquire(s, opt);
  REQUIRE(a.size() == 6);
  for (size_t j = 0; j < 6; ++j) {
    CHECK((a[j].coeffs == b[j].coeffs).all());
    CHECK_FALSE((a[j].coeffs == c[j].coeffs).all());
    CHECK(a[j].index == static_cast<int>(j) + 1);
  }
  // Noise differs between frames even with one seed.
  CHECK(a[2].noise_sigma > 0.0);
  CHECK(rasterize_fine(s, 1, opt.grid, 4).rows() == 4 * 33);
}
