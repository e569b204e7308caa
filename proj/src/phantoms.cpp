#include "seqrecon/phantoms.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace seqrecon {
namespace {

constexpr double deg = std::numbers::pi / 180.0;

std::array<double, 2> vertex_mean(const std::vector<std::array<double, 2>>& v) {
  std::array<double, 2> c{0.0, 0.0};
  for (const auto& p : v) c[0] += p[0], c[1] += p[1];
  c[0] /= static_cast<double>(v.size());
  c[1] /= static_cast<double>(v.size());
  return c;
}

}  // namespace

bool Shape::contains(double x, double y) const {
  if (kind == Kind::ellipse) {
    const double c = std::cos(angle_deg * deg), s = std::sin(angle_deg * deg);
    const double u = ((x - cx) * c + (y - cy) * s) / a;
    const double v = (-(x - cx) * s + (y - cy) * c) / b;
    return u * u + v * v <= 1.0;
  }
  bool inside = false;
  const size_t n = vertices.size();
  for (size_t i = 0, j = n - 1; i < n; j = i++) {
    const auto& p = vertices[i];
    const auto& q = vertices[j];
    if ((p[1] > y) != (q[1] > y) && x < p[0] + (y - p[1]) * (q[0] - p[0]) / (q[1] - p[1]))
      inside = !inside;
  }
  return inside;
}

Shape Shape::moved(double dx, double dy, double degrees) const {
  Shape out = *this;
  if (kind == Kind::ellipse) {
    out.cx += dx;
    out.cy += dy;
    out.angle_deg += degrees;
    return out;
  }
  const auto c = vertex_mean(vertices);
  const double cs = std::cos(degrees * deg), sn = std::sin(degrees * deg);
  for (auto& p : out.vertices) {
    const double u = p[0] - c[0], v = p[1] - c[1];
    p = {c[0] + u * cs - v * sn + dx, c[1] + u * sn + v * cs + dy};
  }
  return out;
}

std::array<double, 4> Shape::bounds() const {
  if (kind == Kind::ellipse) {
    const double c = std::cos(angle_deg * deg), s = std::sin(angle_deg * deg);
    const double hx = std::hypot(a * c, b * s), hy = std::hypot(a * s, b * c);
    return {cx - hx, cy - hy, cx + hx, cy + hy};
  }
  std::array<double, 4> r{1e300, 1e300, -1e300, -1e300};
  for (const auto& p : vertices) {
    r[0] = std::min(r[0], p[0]), r[1] = std::min(r[1], p[1]);
    r[2] = std::max(r[2], p[0]), r[3] = std::max(r[3], p[1]);
  }
  return r;
}

Shape DynamicObject::at(int t) const {
  const double steps = t - 1;
  return shape.moved(steps * velocity[0], steps * velocity[1], steps * rotation_deg);
}

const std::vector<Occlusion>& SceneSpec::occlusions_at(int t) const {
  static const std::vector<Occlusion> none;
  if (t < 1 || t > static_cast<int>(occlusions.size())) return none;
  return occlusions[static_cast<size_t>(t) - 1];
}

void SceneSpec::validate() const {
  if (frames < 1) throw Error("scene: frames must be positive");
  auto check_bounds = [](const Shape& s, const std::string& what) {
    if (s.kind == Shape::Kind::ellipse && (!(s.a > 0) || !(s.b > 0)))
      throw Error("scene: " + what + " has non-positive semi-axis");
    if (s.kind == Shape::Kind::polygon && s.vertices.size() < 3)
      throw Error("scene: " + what + " polygon needs at least 3 vertices");
    const auto r = s.bounds();
    if (r[0] < 0 || r[1] < 0 || r[2] > 1 || r[3] > 1)
      throw Error("scene: " + what + " leaves the unit square");
  };
  for (size_t i = 0; i < background.size(); ++i)
    check_bounds(background[i], "background shape " + std::to_string(i + 1));
  for (const auto& o : occlusions)
    for (const auto& occ : o) occ.validate();
  constexpr int probe = 257;
  for (int t = 1; t <= frames; ++t) {
    std::vector<Mask> supports;
    for (const auto& d : dynamic) {
      if (!d.present(t)) continue;
      check_bounds(d.at(t), "dynamic object '" + d.name + "' at frame " + std::to_string(t));
      supports.push_back(shape_support(d.at(t), probe));
    }
    for (size_t i = 0; i < supports.size(); ++i)
      for (size_t j = i + 1; j < supports.size(); ++j)
        if (((supports[i] != 0) && (supports[j] != 0)).any())
          throw Error("scene: dynamic objects overlap at frame " + std::to_string(t));
  }
  for (const auto& p : points)
    if (p.x < 0 || p.x > 1 || p.y < 0 || p.y > 1 || p.frame < 1 || p.frame > frames)
      throw Error("scene: evaluation point '" + p.name + "' is out of range");
}

Mask shape_support(const Shape& shape, int side) {
  Mask m = Mask::Zero(side, side);
  for (int i = 0; i < side; ++i)
    for (int j = 0; j < side; ++j)
      if (shape.contains(static_cast<double>(i) / side, static_cast<double>(j) / side)) m(i, j) = 1;
  return m;
}

RealImage render(const SceneSpec& scene, int t, int side) {
  if (side < 1) throw Error("render: side must be positive");
  RealImage img = RealImage::Zero(side, side);
  auto paint = [&](const Shape& s) {
    const auto r = s.bounds();
    const int i0 = std::max(0, static_cast<int>(std::floor(r[0] * side)));
    const int i1 = std::min(side - 1, static_cast<int>(std::ceil(r[2] * side)));
    const int j0 = std::max(0, static_cast<int>(std::floor(r[1] * side)));
    const int j1 = std::min(side - 1, static_cast<int>(std::ceil(r[3] * side)));
    for (int i = i0; i <= i1; ++i)
      for (int j = j0; j <= j1; ++j)
        if (s.contains(static_cast<double>(i) / side, static_cast<double>(j) / side))
          img(i, j) = s.value;
  };
  for (const auto& s : scene.background) paint(s);
  for (const auto& d : scene.dynamic)
    if (d.present(t)) paint(d.at(t));
  return img;
}

ImageGrid rasterize(const SceneSpec& scene, int t, const GridSpec& grid) {
  return {grid, render(scene, t, grid.side())};
}

RealImage rasterize_fine(const SceneSpec& scene, int t, const GridSpec& grid, int oversample) {
  if (oversample < 1) throw Error("rasterize: oversample must be >= 1");
  return render(scene, t, grid.side() * oversample);
}

Mask ground_truth_change(const SceneSpec& scene, int t, int side) {
  Mask changed = Mask::Zero(side, side);
  for (const auto& d : scene.dynamic) {
    const bool a = d.present(t), b = d.present(t + 1);
    if (!a && !b) continue;
    if (a && b && d.at(t) == d.at(t + 1)) continue;
    if (a) changed = changed.max(shape_support(d.at(t), side));
    if (b) changed = changed.max(shape_support(d.at(t + 1), side));
  }
  return (changed == 0).cast<std::uint8_t>();
}

Mask occluded_region(const SceneSpec& scene, int t, int side) {
  return occlusion_mask(side, scene.occlusions_at(t));
}

std::vector<FourierFrame> acquire(const SceneSpec& scene, const SimulationOptions& options) {
  scene.validate();
  std::vector<RealImage> images;
  std::vector<std::vector<Occlusion>> occ;
  for (int t = 1; t <= scene.frames; ++t) {
    images.push_back(rasterize_fine(scene, t, options.grid, options.oversample));
    occ.push_back(scene.occlusions_at(t));
  }
  SimulationOptions opt = options;
  opt.grid.frames = scene.frames;
  return simulate_sequence(images, occ, opt);
}

SceneSpec default_scene() {
  SceneSpec s;
  s.frames = 6;
  auto ellipse = [](double cx, double cy, double a, double b, double angle, double value) {
    Shape e;
    e.kind = Shape::Kind::ellipse;
    e.cx = cx, e.cy = cy, e.a = a, e.b = b, e.angle_deg = angle, e.value = value;
    return e;
  };
  s.background.push_back(ellipse(0.5, 0.5, 0.47, 0.47, 0.0, 0.3));  // skull
  s.background.push_back(ellipse(0.5, 0.5, 0.43, 0.43, 0.0, 0.0));
  s.background.push_back(ellipse(0.30, 0.28, 0.07, 0.05, 0.0, 0.3));
  Shape rect;
  rect.kind = Shape::Kind::polygon;
  rect.value = 0.3;
  rect.vertices = {{0.66, 0.20}, {0.78, 0.20}, {0.78, 0.34}, {0.66, 0.34}};
  s.background.push_back(rect);

  const double step = 8.0 / 129.0;
  s.dynamic.push_back({"ellipse_a", ellipse(0.22, 0.55, 0.06, 0.04, 0.0, 0.8), {step, 0.0}, 10.0});
  s.dynamic.push_back({"ellipse_b", ellipse(0.72, 0.74, 0.05, 0.035, 30.0, 0.9), {-step, 0.0}, 10.0});

  auto box = [](double x0, double y0, double x1, double y1) {
    Occlusion o;
    o.x0 = x0, o.y0 = y0, o.x1 = x1, o.y1 = y1;
    return o;
  };
  s.occlusions = {{box(0.25, 0.22, 0.35, 0.34)},
                  {box(0.68, 0.22, 0.76, 0.32)},
                  {},
                  {box(0.24, 0.26, 0.32, 0.36)},
                  {box(0.03, 0.44, 0.12, 0.56)},
                  {}};
  s.points = {{"point1", 0.30, 0.28, 1},
              {"point2", 0.72, 0.27, 1},
              {"point3", 0.38, 0.28, 1},
              {"point4", 0.50, 0.35, 1}};
  return s;
}

}  // namespace seqrecon
