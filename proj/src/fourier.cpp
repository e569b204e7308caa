#include "seqrecon/fourier.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <random>

#include "seqrecon/fft.hpp"

namespace seqrecon {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t frame_seed(std::uint64_t seed, int frame, std::uint64_t stream) {
  return splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(frame) * 0x100000001b3ULL + stream));
}

}  // namespace

BandInterval missing_band(int j, int frames) {
  if (frames < 1 || j < 1 || j > frames)
    throw Error("missing_band: frame index " + std::to_string(j) + " outside [1," +
                std::to_string(frames) + "]");
  const int shift = frames * (j - 1);
  return {10 + shift, 35 + shift};
}

Mask band_mask(const GridSpec& grid, std::optional<BandInterval> band, BandRule rule) {
  const int n = grid.half_bandwidth, s = grid.side();
  Mask m = Mask::Ones(s, s);
  if (!band) return m;
  for (int k = -n; k <= n; ++k) {
    for (int l = -n; l <= n; ++l) {
      bool removed = false;
      if (rule == BandRule::cross) {
        removed = band->contains(k) || band->contains(l);
      } else {
        removed = band->contains(std::max(std::abs(k), std::abs(l)));
      }
      if (removed) m(k + n, l + n) = 0;
    }
  }
  return m;
}

bool is_conjugate_symmetric(const Mask& m) {
  const Eigen::Index r = m.rows(), c = m.cols();
  if (r % 2 == 0 || c % 2 == 0) return false;
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j)
      if (m(i, j) != m(r - 1 - i, c - 1 - j)) return false;
  return true;
}

FourierFrame forward(const ImageGrid& image, const Mask& mask, int index) {
  image.check();
  require_same_shape(image.values, mask, "forward");
  if (!is_conjugate_symmetric(mask))
    throw Error("forward: band mask is not symmetric under (k,l) -> (-k,-l)");
  FourierFrame frame;
  frame.grid = image.grid;
  frame.index = index;
  frame.available = mask;
  frame.coeffs = fft::to_centered(fft::forward(image.values));
  for (Eigen::Index i = 0; i < mask.size(); ++i)
    if (!mask.data()[i]) frame.coeffs.data()[i] = 0.0;
  return frame;
}

RealImage adjoint(const GridSpec& grid, const ComplexImage& centered, const Mask& mask) {
  if (centered.rows() != grid.side() || centered.cols() != grid.side())
    throw DimensionError("adjoint: coefficient array does not match grid");
  require_same_shape(centered, mask, "adjoint");
  ComplexImage y = centered;
  for (Eigen::Index i = 0; i < mask.size(); ++i)
    if (!mask.data()[i]) y.data()[i] = 0.0;
  return fft::backward(fft::from_centered(y)).real();
}

RealImage inverse(const FourierFrame& frame) {
  frame.check();
  const double n = static_cast<double>(frame.grid.pixels());
  return adjoint(frame.grid, frame.coeffs, frame.available) / n;
}

double NoiseModel::sigma_for(int frame_index) const {
  if (sigma.empty()) return 0.0;
  if (sigma.size() == 1) return sigma.front();
  if (frame_index < 1 || frame_index > static_cast<int>(sigma.size()))
    throw Error("NoiseModel: no sigma for frame " + std::to_string(frame_index));
  return sigma[frame_index - 1];
}

FourierFrame add_noise(FourierFrame frame, double sigma, std::uint64_t seed) {
  frame.check();
  if (sigma < 0) throw Error("add_noise: sigma must be non-negative");
  frame.noise_sigma = sigma;
  if (sigma == 0.0) return frame;
  std::mt19937_64 rng(frame_seed(seed, frame.index, 1));
  std::normal_distribution<double> normal(0.0, sigma / std::sqrt(2.0));
  for (Eigen::Index i = 0; i < frame.coeffs.size(); ++i) {
    if (!frame.available.data()[i]) continue;
    const double re = normal(rng);
    const double im = normal(rng);
    frame.coeffs.data()[i] += std::complex<double>(re, im);
  }
  return frame;
}

FourierFrame add_noise(const FourierFrame& frame, const NoiseModel& model) {
  return add_noise(frame, model.sigma_for(frame.index), model.seed);
}

double signal_level(const FourierFrame& frame, SnrMean mean) {
  std::complex<double> sum = 0.0;
  double mag = 0.0;
  long count = 0;
  for (Eigen::Index i = 0; i < frame.coeffs.size(); ++i) {
    if (!frame.available.data()[i]) continue;
    sum += frame.coeffs.data()[i];
    mag += std::abs(frame.coeffs.data()[i]);
    ++count;
  }
  if (count == 0) return 0.0;
  return mean == SnrMean::complex_mean ? std::abs(sum) / count : mag / count;
}

double snr_db(const FourierFrame& frame, SnrMean mean) {
  if (frame.noise_sigma == 0.0) return std::numeric_limits<double>::infinity();
  const double ratio = signal_level(frame, mean) / frame.noise_sigma;
  return 10.0 * std::log10(ratio * ratio);
}

double sigma_for_snr(const FourierFrame& noiseless, double snr, SnrMean mean) {
  return signal_level(noiseless, mean) / std::pow(10.0, snr / 20.0);
}

bool Occlusion::contains(double x, double y) const {
  if (shape == Shape::rectangle) return x >= x0 && x <= x1 && y >= y0 && y <= y1;
  const double cx = 0.5 * (x0 + x1), cy = 0.5 * (y0 + y1);
  const double a = 0.5 * (x1 - x0), b = 0.5 * (y1 - y0);
  if (a <= 0 || b <= 0) return false;
  const double u = (x - cx) / a, v = (y - cy) / b;
  return u * u + v * v <= 1.0;
}

void Occlusion::validate() const {
  if (!(x0 >= 0 && y0 >= 0 && x1 <= 1 && y1 <= 1 && x0 <= x1 && y0 <= y1))
    throw Error("occlusion region outside [0,1]^2");
  if (fill == Fill::gaussian && stddev < 0) throw Error("occlusion: negative stddev");
}

Mask occlusion_mask(int side, const std::vector<Occlusion>& occlusions) {
  Mask m = Mask::Zero(side, side);
  for (const auto& occ : occlusions) {
    occ.validate();
    for (int i = 0; i < side; ++i)
      for (int j = 0; j < side; ++j)
        if (occ.contains(static_cast<double>(i) / side, static_cast<double>(j) / side))
          m(i, j) = 1;
  }
  return m;
}

RealImage apply_occlusions(RealImage image, const std::vector<Occlusion>& occlusions,
                           std::uint64_t seed) {
  if (image.rows() != image.cols()) throw DimensionError("apply_occlusions: image not square");
  const int side = static_cast<int>(image.rows());
  std::mt19937_64 rng(splitmix64(seed ^ 0x6f63636cULL));
  for (const auto& occ : occlusions) {
    occ.validate();
    std::normal_distribution<double> normal(0.0, occ.stddev > 0 ? occ.stddev : 1.0);
    for (int i = 0; i < side; ++i) {
      for (int j = 0; j < side; ++j) {
        if (!occ.contains(static_cast<double>(i) / side, static_cast<double>(j) / side)) continue;
        image(i, j) = occ.fill == Occlusion::Fill::constant ? occ.value
                      : occ.stddev > 0                      ? normal(rng)
                                                            : 0.0;
      }
    }
  }
  return image;
}

ComplexImage truncated_coefficients(const RealImage& fine, const GridSpec& grid) {
  const int side = grid.side(), n = grid.half_bandwidth;
  if (fine.rows() != fine.cols() || fine.rows() % side != 0)
    throw DimensionError("truncated_coefficients: fine image must be a square multiple of " +
                         std::to_string(side));
  const Eigen::Index fine_side = fine.rows();
  const double scale = static_cast<double>(side) * side / (static_cast<double>(fine_side) * fine_side);
  const ComplexImage spectrum = fft::forward(fine);
  ComplexImage out(side, side);
  for (int k = -n; k <= n; ++k) {
    const Eigen::Index fk = (k + fine_side) % fine_side;
    for (int l = -n; l <= n; ++l) {
      const Eigen::Index fl = (l + fine_side) % fine_side;
      out(k + n, l + n) = spectrum(fk, fl) * scale;
    }
  }
  return out;
}

std::vector<FourierFrame> simulate_sequence(const std::vector<RealImage>& images,
                                            const std::vector<std::vector<Occlusion>>& occlusions,
                                            const SimulationOptions& opt) {
  opt.grid.validate();
  if (opt.oversample < 1) throw Error("simulate_sequence: oversample must be >= 1");
  if (!occlusions.empty() && occlusions.size() != images.size())
    throw Error("simulate_sequence: need one occlusion list per frame");
  const int frames = static_cast<int>(images.size());
  const int fine_side = opt.oversample * opt.grid.side();
  GridSpec grid = opt.grid;
  grid.frames = frames;

  std::vector<FourierFrame> out;
  out.reserve(images.size());
  for (int j = 1; j <= frames; ++j) {
    const RealImage& src = images[j - 1];
    if (src.rows() != fine_side || src.cols() != fine_side)
      throw DimensionError("simulate_sequence: frame " + std::to_string(j) + " is " +
                           std::to_string(src.rows()) + "x" + std::to_string(src.cols()) +
                           ", expected " + std::to_string(fine_side));
    RealImage scene = occlusions.empty()
                          ? src
                          : apply_occlusions(src, occlusions[j - 1],
                                             frame_seed(opt.noise.seed, j, 2));
    FourierFrame frame;
    frame.grid = grid;
    frame.index = j;
    frame.coeffs = truncated_coefficients(scene, grid);
    frame.available =
        band_mask(grid, opt.apply_bands ? std::optional(missing_band(j, frames)) : std::nullopt,
                  opt.band_rule);
    for (Eigen::Index i = 0; i < frame.available.size(); ++i)
      if (!frame.available.data()[i]) frame.coeffs.data()[i] = 0.0;

    double sigma = 0.0;
    if (!opt.snr_db.empty()) {
      const double target =
          opt.snr_db.size() == 1 ? opt.snr_db.front() : opt.snr_db.at(static_cast<size_t>(j - 1));
      sigma = sigma_for_snr(frame, target, opt.calibration);
    } else {
      sigma = opt.noise.sigma_for(j);
    }
    out.push_back(add_noise(std::move(frame), sigma, opt.noise.seed));
  }
  return out;
}

}  // namespace seqrecon
