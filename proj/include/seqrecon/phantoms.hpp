#pragma once

#include <array>
#include <climits>
#include <string>
#include <vector>

#include "seqrecon/fourier.hpp"

namespace seqrecon {

/// Shape in unit coordinates, x along rows and y along columns.
struct Shape {
  enum class Kind { ellipse, polygon };

  Kind kind = Kind::ellipse;
  double value = 0.0;
  // ellipse: center, semi-axes along its own x/y before rotation, rotation in degrees
  double cx = 0.5, cy = 0.5, a = 0.1, b = 0.1, angle_deg = 0.0;
  // polygon vertices (x, y), any orientation
  std::vector<std::array<double, 2>> vertices;

  bool contains(double x, double y) const;
  /// Translated by (dx, dy) and rotated by `degrees` about its center
  /// (polygon: vertex mean).
  Shape moved(double dx, double dy, double degrees) const;
  /// Axis-aligned bounds {x0, y0, x1, y1}.
  std::array<double, 4> bounds() const;
  bool operator==(const Shape&) const = default;
};

/// Object that moves between frames: shape(t) = shape translated by
/// (t-1)*velocity and rotated by (t-1)*rotation_deg. Present for
/// first_frame <= t <= last_frame.
struct DynamicObject {
  std::string name;
  Shape shape;
  std::array<double, 2> velocity{0.0, 0.0};
  double rotation_deg = 0.0;
  int first_frame = 1;
  int last_frame = INT_MAX;

  bool present(int t) const { return t >= first_frame && t <= last_frame; }
  Shape at(int t) const;
};

struct EvaluationPoint {
  std::string name;
  double x = 0.0, y = 0.0;
  int frame = 1;
};

struct SceneSpec {
  int frames = 6;
  /// Painted in order onto a zero background; a later shape overwrites
  /// earlier ones, so a value-0 shape carves a hole.
  std::vector<Shape> background;
  std::vector<DynamicObject> dynamic;
  /// occlusions[t-1] applies to frame t; may be shorter than `frames`.
  std::vector<std::vector<Occlusion>> occlusions;
  std::vector<EvaluationPoint> points;

  /// Throws on shapes leaving [0,1]^2 or dynamic objects that overlap.
  void validate() const;
  const std::vector<Occlusion>& occlusions_at(int t) const;
};

/// Samples the scene at pixel positions (mu/side, nu/side).
RealImage render(const SceneSpec& scene, int t, int side);

/// Ground truth on the reconstruction grid.
ImageGrid rasterize(const SceneSpec& scene, int t, const GridSpec& grid);

/// Source image for acquisition, oversample * side pixels per axis.
RealImage rasterize_fine(const SceneSpec& scene, int t, const GridSpec& grid, int oversample);

Mask shape_support(const Shape& shape, int side);

/// 1 = unchanged; 0 on the union of supports of every object that moved,
/// appeared or disappeared between frames t and t+1.
Mask ground_truth_change(const SceneSpec& scene, int t, int side);

Mask occluded_region(const SceneSpec& scene, int t, int side);

/// Renders every frame, occludes and acquires it.
std::vector<FourierFrame> acquire(const SceneSpec& scene, const SimulationOptions& options);

/// Skull-like annulus, two static structures of magnitude 0.3, two ellipses
/// of magnitude 0.8 and 0.9 translating 8 pixels (at N = 64) and rotating 10
/// degrees per frame, and zero-valued occluders over static structures in
/// frames 1, 2, 4 and 5.
SceneSpec default_scene();

}  // namespace seqrecon
