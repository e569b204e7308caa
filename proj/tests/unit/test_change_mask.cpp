#include <doctest.h>

#include <cmath>
#include <numbers>

#include "seqrecon/change_mask.hpp"
#include "support.hpp"

using namespace seqrecon;
using seqrecon::testing::random_mask;
using seqrecon::testing::random_vector;

namespace {

Mask from_points(const std::vector<Point>& pts, int rows, int cols) {
  Mask m = Mask::Zero(rows, cols);
  for (Point p : pts) m(p.k, p.l) = 1;
  return m;
}

std::vector<Point> ring_points(double ck, double cl, double R, int side) {
  std::vector<Point> pts;
  for (int k = 0; k < side; ++k)
    for (int l = 0; l < side; ++l)
      if (std::abs(std::hypot(k - ck, l - cl) - R) < 0.5) pts.push_back({k, l});
  return pts;
}

double dot(const FrameStack& a, const FrameStack& b) {
  double s = 0.0;
  for (size_t j = 0; j < a.size(); ++j) s += a[j].dot(b[j]);
  return s;
}

}  // namespace

TEST_CASE("binarize defaults to half the maximum magnitude") {
  RealImage G(1, 4);
  G << 0.1, -0.8, 0.5, 0.39;
  const auto b = binarize(G);
  CHECK(b.tau == doctest::Approx(0.4));
  CHECK(b.U(0, 0) == 0);
  CHECK(b.U(0, 1) == 1);
  CHECK(b.U(0, 2) == 1);
  CHECK(b.U(0, 3) == 0);
  CHECK(binarize(RealImage::Zero(3, 3)).empty);
  CHECK(count_set(binarize(G, 0.05).U) == 4);
  RealImage bad = G;
  bad(0, 0) = std::nan("");
  CHECK_THROWS_AS(binarize(bad), Error);
}

TEST_CASE("disk structuring element") {
  for (int d : {1, 2, 3, 5}) {
    long expected = 0;
    for (int a = -d; a <= d; ++a)
      for (int b = -d; b <= d; ++b) expected += a * a + b * b <= d * d;
    CHECK(static_cast<long>(disk_offsets(d).size()) == expected);
  }
  CHECK(disk_offsets(3).size() == 29);
}

TEST_CASE("dilation, erosion and closing") {
  Mask m = Mask::Zero(15, 15);
  m(7, 7) = 1;
  CHECK(count_set(dilate(m, 2)) == 13);
  CHECK((erode(dilate(m, 2), 2) == m).all());

  // A one-pixel gap across a bar is bridged by closing; a one-pixel-wide line
  // is not, since the disk centred off the line touches it only at the gap.
  Mask bar = Mask::Zero(15, 15);
  for (int k = 5; k <= 9; ++k)
    for (int l = 2; l <= 12; ++l) bar(k, l) = l == 7 ? 0 : 1;
  CHECK(close(bar, 1)(7, 7) == 1);
  Mask line = Mask::Zero(15, 15);
  for (int l = 2; l <= 12; ++l) line(7, l) = l == 7 ? 0 : 1;
  CHECK(close(line, 1)(7, 7) == 0);
  // Closing is extensive.
  std::mt19937_64 rng(31);
  for (int t = 0; t < 20; ++t) {
    const Mask r = random_mask(rng, 20, 17, 0.3);
    const Mask c = close(r, 2);
    CHECK(((r != 0) <= (c != 0)).all());
  }
  // Objects touching the border survive erosion.
  Mask edge = Mask::Zero(10, 10);
  edge.block(0, 0, 3, 10).setOnes();
  CHECK(erode(edge, 1)(0, 5) == 1);
}

TEST_CASE("8-connected components in raster order") {
  Mask m = Mask::Zero(6, 6);
  m(0, 0) = m(1, 1) = m(2, 2) = 1;  // diagonal chain
  m(0, 4) = m(0, 5) = 1;
  m(5, 0) = 1;
  const auto comps = connected_components(m);
  REQUIRE(comps.size() == 3);
  CHECK(comps[0].size() == 3);
  CHECK(comps[0][0] == Point{0, 0});
  CHECK(comps[1][0] == Point{0, 4});
  CHECK(comps[2].size() == 1);
}

TEST_CASE("bridge and cluster discards specks") {
  Mask m = Mask::Zero(30, 30);
  for (int l = 5; l < 20; ++l) m(10, l) = 1;
  m(25, 25) = 1;
  const auto clusters = bridge_and_cluster(m, 3);
  REQUIRE(clusters.size() == 1);
  CHECK(clusters[0].id == 1);
  CHECK(clusters[0].points.size() >= 15);
  CHECK_THROWS_AS(bridge_and_cluster(m, 0), Error);
}

TEST_CASE("enclosing clusters are dropped only above the threshold") {
  std::vector<SingleObjectMask> clusters;
  std::vector<Point> outer, inner;
  for (int i = 0; i <= 20; ++i) outer.insert(outer.end(), {{0, i}, {20, i}, {i, 0}, {i, 20}});
  for (int i = 8; i <= 12; ++i) inner.insert(inner.end(), {{8, i}, {12, i}});
  clusters.push_back({1, outer});
  clusters.push_back({2, inner});
  const RealImage G = RealImage::Ones(21, 21);
  CHECK(remove_enclosing(clusters, G, 0.5).size() == 1);
  CHECK(remove_enclosing(clusters, G, 2.0).size() == 2);
}

TEST_CASE("edge points are ordered by angle about the centroid") {
  const auto pts = ring_points(15.0, 15.0, 8.0, 31);
  std::vector<Point> shuffled = pts;
  std::mt19937_64 rng(32);
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  const auto ordered = order_edge_points(shuffled);
  REQUIRE(ordered.size() >= 3);
  double prev = -1.0;
  for (Point p : ordered) {
    double a = std::atan2(double(p.l - 15), double(p.k - 15));
    if (a < 0) a += 2.0 * std::numbers::pi;
    CHECK(a > prev);
    prev = a;
  }
  CHECK(order_edge_points(shuffled) == ordered);
  CHECK_THROWS_AS(order_edge_points({{0, 0}, {1, 1}}), Error);
}

TEST_CASE("polygon fill") {
  SUBCASE("axis-aligned square includes its boundary") {
    const auto f = fill_polygon({{2, 2}, {2, 7}, {7, 7}, {7, 2}}, 12, 12);
    CHECK(count_set(f.Q) == 36);
    CHECK(f.Q(2, 2) == 1);
    CHECK(f.Q(8, 5) == 0);
    CHECK_FALSE(f.self_intersecting);
  }
  SUBCASE("triangle matches the lattice-point count") {
    // Pick's theorem: area 12, boundary points 4 + 6 + 2 = 12 -> 7 interior.
    const auto f = fill_polygon({{0, 0}, {4, 0}, {0, 6}}, 10, 10);
    CHECK(count_set(f.Q) == 7 + 12);
  }
  SUBCASE("bow tie is flagged") {
    CHECK(fill_polygon({{0, 0}, {5, 5}, {0, 5}, {5, 0}}, 8, 8).self_intersecting);
  }
  SUBCASE("digital circle fills to a disk") {
    const double R = 9.0;
    const auto ordered = order_edge_points(ring_points(20.0, 20.0, R, 41));
    const auto f = fill_polygon(ordered, 41, 41);
    long disk = 0;
    for (int k = 0; k < 41; ++k)
      for (int l = 0; l < 41; ++l) disk += std::hypot(k - 20.0, l - 20.0) <= R;
    CHECK(std::abs(count_set(f.Q) - disk) < 2.0 * std::numbers::pi * R);
    CHECK(f.Q(20, 20) == 1);
    CHECK_FALSE(f.self_intersecting);
  }
}

TEST_CASE("diff measure properties on random pairs") {
  std::mt19937_64 rng(33);
  std::uniform_int_distribution<int> size(1, 24);
  std::uniform_real_distribution<double> dens(0.0, 1.0);
  for (int t = 0; t < 1000; ++t) {
    const int r = size(rng), c = size(rng);
    const Mask A = random_mask(rng, r, c, dens(rng));
    const Mask B = random_mask(rng, r, c, dens(rng));
    const double ab = diff_measure(A, B), ba = diff_measure(B, A);
    CHECK(ab == ba);
    CHECK(ab >= 0.0);
    CHECK(ab <= 1.0);
    CHECK(diff_measure(A, A) == 0.0);
    const Mask disjoint = ((A == 0) && (B != 0)).cast<std::uint8_t>();
    if (count_set(A) + count_set(disjoint) > 0) CHECK(diff_measure(A, disjoint) == 1.0);
  }
  bool both = false;
  CHECK(diff_measure(Mask::Zero(3, 3), Mask::Zero(3, 3), &both) == 0.0);
  CHECK(both);
  CHECK_THROWS_AS(diff_measure(Mask::Zero(3, 3), Mask::Zero(3, 4)), DimensionError);
}

TEST_CASE("change index sets drop matched objects") {
  const Mask a = from_points({{1, 1}, {1, 2}, {2, 1}, {2, 2}}, 10, 10);
  const Mask b = from_points({{6, 6}, {6, 7}, {7, 6}, {7, 7}}, 10, 10);
  const Mask b_moved = from_points({{6, 7}, {6, 8}, {7, 7}, {7, 8}}, 10, 10);
  const auto sets = change_index_sets({a, b}, {a, b_moved});
  CHECK(sets.first == std::vector<int>{1});
  CHECK(sets.second == std::vector<int>{1});
  CHECK(sets.diff(0, 0) == 0.0);
  CHECK(sets.diff(1, 1) == doctest::Approx(0.5));
  CHECK_THROWS_AS(change_index_sets({a}, {a}, 0.0), Error);
}

TEST_CASE("assembled change mask is zero on unmatched objects") {
  const Mask a = from_points({{1, 1}, {1, 2}}, 5, 5);
  const Mask b = from_points({{3, 3}}, 5, 5);
  const Mask C = assemble_change_mask({a}, {0}, {b}, {0}, 5, 5);
  CHECK(C(1, 1) == 0);
  CHECK(C(1, 2) == 0);
  CHECK(C(3, 3) == 0);
  CHECK(count_set(C) == 25 - 3);
  CHECK((assemble_change_mask({a}, {}, {b}, {}, 5, 5) == 1).all());
}

TEST_CASE("identical object sets give the all-ones mask") {
  Mask U = Mask::Zero(40, 40);
  for (Point p : ring_points(20, 20, 8, 40)) U(p.k, p.l) = 1;
  const RealImage G = U.cast<double>();
  ChangeMaskOptions opt;
  const auto fa = extract_objects(G, opt);
  REQUIRE(fa.filled.size() == 1);
  const auto pc = change_mask_for_pair(fa, fa, opt);
  CHECK((pc.C == 1).all());
}

TEST_CASE("coupling operator") {
  std::mt19937_64 rng(34);
  const int rows = 6, cols = 5, J = 4;
  std::vector<Mask> masks;
  for (int j = 0; j < J - 1; ++j) masks.push_back(random_mask(rng, rows, cols, 0.6));
  const CouplingOperator phi = build_phi(masks, J);
  CHECK(phi.frames() == J);
  CHECK(phi.pixels() == rows * cols);

  FrameStack s, y;
  for (int j = 0; j < J; ++j) s.push_back(random_vector(rng, rows * cols));
  for (int j = 0; j < J - 1; ++j) y.push_back(random_vector(rng, rows * cols));
  CHECK(dot(phi.apply(s), y) == doctest::Approx(dot(s, phi.apply_adjoint(y))).epsilon(1e-12));

  // Entry j of Phi s is C_j (s_j - s_{j+1}).
  const FrameStack ps = phi.apply(s);
  for (int j = 0; j < J - 1; ++j)
    for (int i = 0; i < rows * cols; ++i)
      CHECK(ps[j](i) == (masks[j].data()[i] ? s[j](i) - s[j + 1](i) : 0.0));

  // Diagonal of Phi^T Phi from unit probes.
  for (int j = 0; j < J; ++j) {
    const Eigen::VectorXd d = phi.normal_diagonal(j);
    for (int i = 0; i < rows * cols; i += 3) {
      FrameStack e(J, Eigen::VectorXd::Zero(rows * cols));
      e[j](i) = 1.0;
      CHECK(phi.normal(e)[j](i) == doctest::Approx(d(i)));
    }
  }

  // Uncoupled pixels see no coupling force.
  const CouplingOperator none = build_phi(std::vector<Mask>(J - 1, Mask::Zero(rows, cols)), J);
  for (const auto& v : none.normal(s)) CHECK(v.norm() == 0.0);

  CHECK_THROWS_AS(build_phi(masks, J + 1), DimensionError);
  CHECK_THROWS_AS(phi.apply(FrameStack(J - 1, Eigen::VectorXd::Zero(rows * cols))), Error);
  const CouplingOperator single = build_phi({}, 1);
  CHECK(single.frames() == 1);
  CHECK(single.normal(FrameStack(1, Eigen::VectorXd::Ones(7)))[0].norm() == 0.0);
}
