#pragma once

#include <optional>
#include <string>
#include <vector>

#include "seqrecon/grid.hpp"

namespace seqrecon {

/// Pixel position: k is the row index, l the column index.
struct Point {
  int k = 0;
  int l = 0;
  bool operator==(const Point&) const = default;
};

struct BinaryEdgeMask {
  Mask U;
  double tau = 0.0;
  bool empty = false;  // nothing exceeded the threshold
};

/// U = |G| > tau, with tau = max|G|/2 unless given.
BinaryEdgeMask binarize(const RealImage& G, std::optional<double> tau = std::nullopt);

/// Disk structuring element of radius d (offsets with dk^2 + dl^2 <= d^2).
std::vector<Point> disk_offsets(int d);
Mask dilate(const Mask& m, int d);
/// Out-of-bounds neighbours are ignored, so objects touching the border survive.
Mask erode(const Mask& m, int d);
Mask close(const Mask& m, int d);

struct SingleObjectMask {
  int id = 0;  // 1-based
  std::vector<Point> points;
};

/// 8-connected components of m, in raster order of their first pixel.
std::vector<std::vector<Point>> connected_components(const Mask& m);

/// Closing with a radius-d disk, then 8-connected labelling; clusters with
/// at most d points are discarded.
std::vector<SingleObjectMask> bridge_and_cluster(const Mask& U, int d);

/// Drops clusters whose bounding box encloses another cluster and whose mean
/// |G| over their points is at least `threshold` (enclosing-structure pass).
std::vector<SingleObjectMask> remove_enclosing(std::vector<SingleObjectMask> clusters,
                                               const RealImage& G, double threshold);

/// Sorts points by angle about their centroid, angle 0 along +k and pi/2
/// along +l, keeping only the farthest point at each angle. Points at the
/// centroid itself have no angle and are dropped.
std::vector<Point> order_edge_points(const std::vector<Point>& points);

struct FilledObjectMask {
  Mask Q;
  int source = 0;
  bool self_intersecting = false;
};

/// Closed polygon through the ordered vertices (last joins first). Pixels on
/// an edge or inside by the even-odd rule are set.
FilledObjectMask fill_polygon(const std::vector<Point>& ordered, Eigen::Index rows,
                              Eigen::Index cols);

/// sum (A-B)^2 / (sum A^2 + sum B^2). Two empty masks give 0 and set *both_empty.
double diff_measure(const Mask& A, const Mask& B, bool* both_empty = nullptr);

struct ChangeIndexSets {
  std::vector<int> first;   // unmatched object indices in frame j (0-based)
  std::vector<int> second;  // unmatched object indices in frame j+1
  Eigen::MatrixXd diff;     // diff(Q_j[a], Q_{j+1}[b])
};

/// Removes every pair (a, b) with diff < tau_diff from both index sets.
ChangeIndexSets change_index_sets(const std::vector<Mask>& Qj, const std::vector<Mask>& Qnext,
                                  double tau_diff = 1e-3);

/// C = 1 - R with R = ceil((ceil(avg_{a in I} Qj[a]) + ceil(avg_{b in I'} Qnext[b])) / 2).
/// An empty index set contributes the zero array. Returns a side x side mask,
/// 1 where frames j and j+1 are coupled.
Mask assemble_change_mask(const std::vector<Mask>& Qj, const std::vector<int>& Ij,
                          const std::vector<Mask>& Qnext, const std::vector<int>& Inext,
                          Eigen::Index rows, Eigen::Index cols);

struct ChangeMaskOptions {
  int d = 3;
  double tau_diff = 1e-3;
  std::optional<double> tau_u;  // default: half the max of |G|
  bool remove_enclosing = false;
  double enclosing_threshold = 0.0;
};

struct FrameObjects {
  BinaryEdgeMask binary;
  std::vector<SingleObjectMask> clusters;
  std::vector<FilledObjectMask> filled;
  std::vector<std::string> warnings;
};

/// Steps from an averaged edge map to filled single-object masks.
FrameObjects extract_objects(const RealImage& G, const ChangeMaskOptions& options);

struct PairChange {
  Mask C;
  ChangeIndexSets sets;
};

PairChange change_mask_for_pair(const FrameObjects& a, const FrameObjects& b,
                                const ChangeMaskOptions& options);

using FrameStack = std::vector<Eigen::VectorXd>;

/// Phi s = (C_j (s_j - s_{j+1}))_{j=1..J-1}, applied without materializing Phi.
class CouplingOperator {
 public:
  /// masks[j] couples frames j and j+1 (0-based); all must share one shape.
  /// With no masks (a single frame) and no `pixels`, block sizes are unchecked.
  explicit CouplingOperator(std::vector<Mask> masks, Eigen::Index pixels = -1);

  int frames() const { return static_cast<int>(masks_.size()) + 1; }
  Eigen::Index pixels() const { return pixels_; }
  const std::vector<Mask>& masks() const { return masks_; }

  FrameStack apply(const FrameStack& s) const;
  FrameStack apply_adjoint(const FrameStack& y) const;
  FrameStack normal(const FrameStack& s) const;
  /// Diagonal of Phi^T Phi for frame j: C_{j-1} + C_j (binary masks).
  Eigen::VectorXd normal_diagonal(int j) const;

 private:
  void check(const FrameStack& s, size_t expected) const;

  std::vector<Mask> masks_;
  Eigen::Index pixels_ = 0;
};

/// Wraps build-time validation of the per-pair masks for J frames.
CouplingOperator build_phi(std::vector<Mask> change_masks, int frames, Eigen::Index pixels = -1);

}  // namespace seqrecon
