#include "seqrecon/change_mask.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

namespace seqrecon {
namespace {

using i64 = std::int64_t;

bool in_bounds(const Mask& m, i64 k, i64 l) {
  return k >= 0 && l >= 0 && k < m.rows() && l < m.cols();
}

// Segment-segment intersection for the self-intersection check.
int orient(Point a, Point b, Point c) {
  const i64 v = i64(b.k - a.k) * (c.l - a.l) - i64(b.l - a.l) * (c.k - a.k);
  return (v > 0) - (v < 0);
}

bool on_segment(Point a, Point b, Point p) {
  return orient(a, b, p) == 0 && std::min(a.k, b.k) <= p.k && p.k <= std::max(a.k, b.k) &&
         std::min(a.l, b.l) <= p.l && p.l <= std::max(a.l, b.l);
}

bool segments_cross(Point a, Point b, Point c, Point d) {
  const int o1 = orient(a, b, c), o2 = orient(a, b, d), o3 = orient(c, d, a), o4 = orient(c, d, b);
  if (o1 != o2 && o3 != o4) return true;
  return (o1 == 0 && on_segment(a, b, c)) || (o2 == 0 && on_segment(a, b, d)) ||
         (o3 == 0 && on_segment(c, d, a)) || (o4 == 0 && on_segment(c, d, b));
}

bool polygon_self_intersects(const std::vector<Point>& v) {
  const size_t n = v.size();
  if (n < 4) return false;
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i + 1; j < n; ++j) {
      if (j == i + 1 || (i == 0 && j == n - 1)) continue;  // adjacent edges share a vertex
      if (segments_cross(v[i], v[(i + 1) % n], v[j], v[(j + 1) % n])) return true;
    }
  }
  return false;
}

double clamped_ceil(double v) { return v < 1e-12 ? 0.0 : std::ceil(v - 1e-12); }

}  // namespace

BinaryEdgeMask binarize(const RealImage& G, std::optional<double> tau) {
  if (!G.isFinite().all()) throw Error("binarize: edge map is not finite");
  BinaryEdgeMask out;
  const RealImage mag = G.abs();
  out.tau = tau ? *tau : 0.5 * (mag.size() ? mag.maxCoeff() : 0.0);
  out.U = (mag > out.tau).cast<std::uint8_t>();
  out.empty = count_set(out.U) == 0;
  return out;
}

std::vector<Point> disk_offsets(int d) {
  if (d < 0) throw Error("disk_offsets: negative radius");
  std::vector<Point> off;
  for (int dk = -d; dk <= d; ++dk)
    for (int dl = -d; dl <= d; ++dl)
      if (dk * dk + dl * dl <= d * d) off.push_back({dk, dl});
  return off;
}

Mask dilate(const Mask& m, int d) {
  const auto off = disk_offsets(d);
  Mask out = Mask::Zero(m.rows(), m.cols());
  for (Eigen::Index k = 0; k < m.rows(); ++k)
    for (Eigen::Index l = 0; l < m.cols(); ++l) {
      if (!m(k, l)) continue;
      for (const Point& o : off)
        if (in_bounds(m, k + o.k, l + o.l)) out(k + o.k, l + o.l) = 1;
    }
  return out;
}

Mask erode(const Mask& m, int d) {
  const auto off = disk_offsets(d);
  Mask out = Mask::Zero(m.rows(), m.cols());
  for (Eigen::Index k = 0; k < m.rows(); ++k)
    for (Eigen::Index l = 0; l < m.cols(); ++l) {
      if (!m(k, l)) continue;
      bool keep = true;
      for (const Point& o : off) {
        if (in_bounds(m, k + o.k, l + o.l) && !m(k + o.k, l + o.l)) {
          keep = false;
          break;
        }
      }
      out(k, l) = keep;
    }
  return out;
}

Mask close(const Mask& m, int d) { return erode(dilate(m, d), d); }

std::vector<std::vector<Point>> connected_components(const Mask& m) {
  std::vector<std::vector<Point>> comps;
  Eigen::Array<int, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> label =
      Eigen::Array<int, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>::Constant(m.rows(),
                                                                                   m.cols(), -1);
  std::vector<Point> stack;
  for (Eigen::Index k = 0; k < m.rows(); ++k)
    for (Eigen::Index l = 0; l < m.cols(); ++l) {
      if (!m(k, l) || label(k, l) >= 0) continue;
      const int id = static_cast<int>(comps.size());
      comps.emplace_back();
      stack.push_back({static_cast<int>(k), static_cast<int>(l)});
      label(k, l) = id;
      while (!stack.empty()) {
        const Point p = stack.back();
        stack.pop_back();
        comps.back().push_back(p);
        for (int dk = -1; dk <= 1; ++dk)
          for (int dl = -1; dl <= 1; ++dl) {
            const int qk = p.k + dk, ql = p.l + dl;
            if (!in_bounds(m, qk, ql) || !m(qk, ql) || label(qk, ql) >= 0) continue;
            label(qk, ql) = id;
            stack.push_back({qk, ql});
          }
      }
    }
  for (auto& c : comps)
    std::sort(c.begin(), c.end(), [](Point a, Point b) { return a.k != b.k ? a.k < b.k : a.l < b.l; });
  return comps;
}

std::vector<SingleObjectMask> bridge_and_cluster(const Mask& U, int d) {
  if (d < 1) throw Error("bridge_and_cluster: d must be >= 1");
  std::vector<SingleObjectMask> out;
  for (auto& comp : connected_components(close(U, d))) {
    if (static_cast<int>(comp.size()) <= d) continue;
    out.push_back({static_cast<int>(out.size()) + 1, std::move(comp)});
  }
  return out;
}

std::vector<SingleObjectMask> remove_enclosing(std::vector<SingleObjectMask> clusters,
                                               const RealImage& G, double threshold) {
  struct Box {
    int k0, l0, k1, l1;
  };
  std::vector<Box> boxes;
  for (const auto& c : clusters) {
    Box b{c.points[0].k, c.points[0].l, c.points[0].k, c.points[0].l};
    for (Point p : c.points) {
      b.k0 = std::min(b.k0, p.k), b.k1 = std::max(b.k1, p.k);
      b.l0 = std::min(b.l0, p.l), b.l1 = std::max(b.l1, p.l);
    }
    boxes.push_back(b);
  }
  std::vector<SingleObjectMask> kept;
  for (size_t i = 0; i < clusters.size(); ++i) {
    bool encloses = false;
    for (size_t j = 0; j < clusters.size() && !encloses; ++j) {
      if (i == j) continue;
      encloses = boxes[i].k0 < boxes[j].k0 && boxes[i].l0 < boxes[j].l0 &&
                 boxes[i].k1 > boxes[j].k1 && boxes[i].l1 > boxes[j].l1;
    }
    double mean = 0.0;
    for (Point p : clusters[i].points) mean += std::abs(G(p.k, p.l));
    mean /= static_cast<double>(clusters[i].points.size());
    if (encloses && mean >= threshold) continue;
    kept.push_back(std::move(clusters[i]));
  }
  for (size_t i = 0; i < kept.size(); ++i) kept[i].id = static_cast<int>(i) + 1;
  return kept;
}

std::vector<Point> order_edge_points(const std::vector<Point>& points) {
  if (points.size() < 3) throw Error("order_edge_points: need at least 3 points");
  // Directions are scaled by the point count so the centroid stays integral
  // and every comparison below is exact.
  const i64 m = static_cast<i64>(points.size());
  i64 sk = 0, sl = 0;
  for (Point p : points) sk += p.k, sl += p.l;

  struct Dir {
    Point p;
    i64 dk, dl;
    int half() const { return (dl > 0 || (dl == 0 && dk > 0)) ? 0 : 1; }
    i64 r2() const { return dk * dk + dl * dl; }
  };
  std::vector<Dir> dirs;
  for (Point p : points) {
    Dir d{p, m * p.k - sk, m * p.l - sl};
    if (d.dk != 0 || d.dl != 0) dirs.push_back(d);
  }
  if (dirs.empty()) throw Error("degenerate cluster");

  auto same_angle = [](const Dir& a, const Dir& b) {
    return a.half() == b.half() && a.dk * b.dl - a.dl * b.dk == 0;
  };
  std::sort(dirs.begin(), dirs.end(), [&](const Dir& a, const Dir& b) {
    if (a.half() != b.half()) return a.half() < b.half();
    const i64 cross = a.dk * b.dl - a.dl * b.dk;
    if (cross != 0) return cross > 0;
    if (a.r2() != b.r2()) return a.r2() > b.r2();
    return a.p.k != b.p.k ? a.p.k < b.p.k : a.p.l < b.p.l;
  });
  std::vector<Point> out;
  for (size_t i = 0; i < dirs.size(); ++i)
    if (i == 0 || !same_angle(dirs[i], dirs[i - 1])) out.push_back(dirs[i].p);
  return out;
}

FilledObjectMask fill_polygon(const std::vector<Point>& v, Eigen::Index rows, Eigen::Index cols) {
  if (v.size() < 3) throw Error("fill_polygon: need at least 3 vertices");
  FilledObjectMask out;
  out.Q = Mask::Zero(rows, cols);
  out.self_intersecting = polygon_self_intersects(v);
  int k0 = v[0].k, k1 = v[0].k, l0 = v[0].l, l1 = v[0].l;
  for (Point p : v) {
    k0 = std::min(k0, p.k), k1 = std::max(k1, p.k);
    l0 = std::min(l0, p.l), l1 = std::max(l1, p.l);
  }
  k0 = std::max(k0, 0), l0 = std::max(l0, 0);
  k1 = std::min<int>(k1, static_cast<int>(rows) - 1), l1 = std::min<int>(l1, static_cast<int>(cols) - 1);
  const size_t n = v.size();
  for (int k = k0; k <= k1; ++k) {
    for (int l = l0; l <= l1; ++l) {
      const Point p{k, l};
      bool inside = false, boundary = false;
      for (size_t i = 0; i < n && !boundary; ++i) {
        const Point a = v[i], b = v[(i + 1) % n];
        if (on_segment(a, b, p)) {
          boundary = true;
          break;
        }
        // Ray from p towards +k; count edges straddling the line l = p.l.
        if ((a.l > l) != (b.l > l)) {
          // Intersection k-coordinate k* = a.k + (l - a.l)(b.k - a.k)/(b.l - a.l); test k < k*.
          const i64 dl = b.l - a.l;
          const i64 lhs = i64(k - a.k) * dl, rhs = i64(l - a.l) * (b.k - a.k);
          if (dl > 0 ? lhs < rhs : lhs > rhs) inside = !inside;
        }
      }
      if (boundary || inside) out.Q(k, l) = 1;
    }
  }
  return out;
}

double diff_measure(const Mask& A, const Mask& B, bool* both_empty) {
  require_same_shape(A, B, "diff_measure");
  const long a = count_set(A), b = count_set(B);
  if (both_empty) *both_empty = a == 0 && b == 0;
  if (a + b == 0) return 0.0;
  const long differ = ((A != 0) != (B != 0)).count();
  return static_cast<double>(differ) / static_cast<double>(a + b);
}

ChangeIndexSets change_index_sets(const std::vector<Mask>& Qj, const std::vector<Mask>& Qnext,
                                  double tau_diff) {
  if (!(tau_diff > 0)) throw Error("change_index_sets: tau_diff must be positive");
  ChangeIndexSets out;
  out.diff.resize(static_cast<Eigen::Index>(Qj.size()), static_cast<Eigen::Index>(Qnext.size()));
  std::vector<bool> gone_a(Qj.size(), false), gone_b(Qnext.size(), false);
  for (size_t a = 0; a < Qj.size(); ++a)
    for (size_t b = 0; b < Qnext.size(); ++b) {
      const double dv = diff_measure(Qj[a], Qnext[b]);
      out.diff(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = dv;
      if (dv < tau_diff) gone_a[a] = gone_b[b] = true;
    }
  for (size_t a = 0; a < Qj.size(); ++a)
    if (!gone_a[a]) out.first.push_back(static_cast<int>(a));
  for (size_t b = 0; b < Qnext.size(); ++b)
    if (!gone_b[b]) out.second.push_back(static_cast<int>(b));
  return out;
}

Mask assemble_change_mask(const std::vector<Mask>& Qj, const std::vector<int>& Ij,
                          const std::vector<Mask>& Qnext, const std::vector<int>& Inext,
                          Eigen::Index rows, Eigen::Index cols) {
  auto ceil_avg = [&](const std::vector<Mask>& Q, const std::vector<int>& I) {
    RealImage acc = RealImage::Zero(rows, cols);
    if (I.empty()) return acc;
    for (int i : I) {
      const Mask& q = Q.at(static_cast<size_t>(i));
      if (q.rows() != rows || q.cols() != cols)
        throw DimensionError("assemble_change_mask: object mask shape mismatch");
      acc += q.cast<double>();
    }
    acc /= static_cast<double>(I.size());
    return RealImage(acc.unaryExpr(&clamped_ceil));
  };
  const RealImage R = (0.5 * (ceil_avg(Qj, Ij) + ceil_avg(Qnext, Inext))).unaryExpr(&clamped_ceil);
  return (R == 0.0).cast<std::uint8_t>();
}

FrameObjects extract_objects(const RealImage& G, const ChangeMaskOptions& opt) {
  FrameObjects fo;
  fo.binary = binarize(G, opt.tau_u);
  if (fo.binary.empty) {
    fo.warnings.push_back("no edges detected");
    return fo;
  }
  fo.clusters = bridge_and_cluster(fo.binary.U, opt.d);
  if (opt.remove_enclosing)
    fo.clusters = remove_enclosing(std::move(fo.clusters), G, opt.enclosing_threshold);
  for (const auto& c : fo.clusters) {
    std::vector<Point> ordered;
    try {
      ordered = order_edge_points(c.points);
    } catch (const Error&) {
      ordered.clear();
    }
    FilledObjectMask f;
    if (ordered.size() >= 3) {
      f = fill_polygon(ordered, G.rows(), G.cols());
      if (f.self_intersecting)
        fo.warnings.push_back("object " + std::to_string(c.id) + ": self-intersecting outline");
    } else {
      // Degenerate outline: keep the cluster pixels themselves.
      f.Q = Mask::Zero(G.rows(), G.cols());
      for (Point p : c.points) f.Q(p.k, p.l) = 1;
      fo.warnings.push_back("object " + std::to_string(c.id) + ": degenerate outline");
    }
    f.source = c.id;
    fo.filled.push_back(std::move(f));
  }
  return fo;
}

PairChange change_mask_for_pair(const FrameObjects& a, const FrameObjects& b,
                                const ChangeMaskOptions& opt) {
  std::vector<Mask> qa, qb;
  for (const auto& f : a.filled) qa.push_back(f.Q);
  for (const auto& f : b.filled) qb.push_back(f.Q);
  PairChange out;
  out.sets = change_index_sets(qa, qb, opt.tau_diff);
  out.C = assemble_change_mask(qa, out.sets.first, qb, out.sets.second, a.binary.U.rows(),
                               a.binary.U.cols());
  return out;
}

CouplingOperator::CouplingOperator(std::vector<Mask> masks, Eigen::Index pixels)
    : masks_(std::move(masks)) {
  if (masks_.empty()) {
    // A single frame has nothing to couple; without a pixel count the
    // operator accepts any block size.
    pixels_ = pixels;
    return;
  }
  pixels_ = masks_.front().size();
  for (const auto& m : masks_) require_same_shape(m, masks_.front(), "CouplingOperator");
  if (pixels >= 0 && pixels != pixels_) throw DimensionError("CouplingOperator: pixel count mismatch");
}

void CouplingOperator::check(const FrameStack& s, size_t expected) const {
  if (s.size() != expected)
    throw DimensionError("CouplingOperator: expected " + std::to_string(expected) + " blocks, got " +
                         std::to_string(s.size()));
  for (const auto& v : s)
    if (pixels_ >= 0 && v.size() != pixels_) throw DimensionError("CouplingOperator: block size mismatch");
}

FrameStack CouplingOperator::apply(const FrameStack& s) const {
  check(s, static_cast<size_t>(frames()));
  FrameStack y(masks_.size());
  for (size_t j = 0; j < masks_.size(); ++j) {
    const Eigen::Map<const Eigen::Array<std::uint8_t, Eigen::Dynamic, 1>> c(masks_[j].data(),
                                                                             pixels_);
    y[j] = (c.cast<double>() * (s[j] - s[j + 1]).array()).matrix();
  }
  return y;
}

FrameStack CouplingOperator::normal(const FrameStack& s) const {
  check(s, static_cast<size_t>(frames()));
  if (masks_.empty()) {
    FrameStack z;
    for (const auto& v : s) z.push_back(Eigen::VectorXd::Zero(v.size()));
    return z;
  }
  return apply_adjoint(apply(s));
}

FrameStack CouplingOperator::apply_adjoint(const FrameStack& y) const {
  check(y, masks_.size());
  if (pixels_ < 0) throw Error("CouplingOperator: pixel count unknown for a single frame");
  FrameStack s(static_cast<size_t>(frames()), Eigen::VectorXd::Zero(pixels_));
  for (size_t j = 0; j < masks_.size(); ++j) {
    const Eigen::Map<const Eigen::Array<std::uint8_t, Eigen::Dynamic, 1>> c(masks_[j].data(),
                                                                             pixels_);
    const Eigen::VectorXd cy = (c.cast<double>() * y[j].array()).matrix();
    s[j] += cy;
    s[j + 1] -= cy;
  }
  return s;
}

Eigen::VectorXd CouplingOperator::normal_diagonal(int j) const {
  if (j < 0 || j >= frames()) throw Error("CouplingOperator: frame index out of range");
  if (pixels_ < 0) throw Error("CouplingOperator: pixel count unknown for a single frame");
  Eigen::VectorXd d = Eigen::VectorXd::Zero(pixels_);
  auto add = [&](const Mask& m) {
    d += Eigen::Map<const Eigen::Array<std::uint8_t, Eigen::Dynamic, 1>>(m.data(), pixels_)
             .cast<double>()
             .matrix();
  };
  if (j > 0) add(masks_[static_cast<size_t>(j) - 1]);
  if (j < frames() - 1) add(masks_[static_cast<size_t>(j)]);
  return d;
}

CouplingOperator build_phi(std::vector<Mask> change_masks, int frames, Eigen::Index pixels) {
  if (frames < 1) throw Error("build_phi: need at least one frame");
  if (static_cast<int>(change_masks.size()) != frames - 1)
    throw DimensionError("build_phi: expected " + std::to_string(frames - 1) + " change masks, got " +
                         std::to_string(change_masks.size()));
  return CouplingOperator(std::move(change_masks), pixels);
}

}  // namespace seqrecon
