#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "seqrecon/grid.hpp"

namespace seqrecon {

/// How a missing band removes coefficients.
enum class BandRule {
  cross,           // |k| OR |l| inside the interval: whole rows and columns
  square_annulus,  // max(|k|,|l|) inside the interval
};

/// Symmetric index band [lo, hi] together with its mirror [-hi, -lo].
struct BandInterval {
  int lo = 0;
  int hi = 0;
  bool contains(int k) const {
    const int a = k < 0 ? -k : k;
    return a >= lo && a <= hi;
  }
  bool operator==(const BandInterval&) const = default;
};

/// Band removed from frame j of J: [10 + J(j-1), 35 + J(j-1)].
BandInterval missing_band(int j, int frames);

/// Availability mask (1 = sampled) in centered layout. nullopt means full sampling.
Mask band_mask(const GridSpec& grid, std::optional<BandInterval> band,
               BandRule rule = BandRule::cross);

/// True if mask(k,l) == mask(-k,-l) everywhere (centered layout).
bool is_conjugate_symmetric(const Mask& centered_mask);

/// b = M F x with F the unnormalized 2D DFT and M the band mask. Index (0,0)
/// is the DC coefficient sum(x).
FourierFrame forward(const ImageGrid& image, const Mask& band_mask, int index = 1);

/// Real adjoint of forward: Re(F^H M y), the map satisfying
/// Re<forward(x), y> = <x, adjoint(y)>.
RealImage adjoint(const GridSpec& grid, const ComplexImage& centered, const Mask& band_mask);

/// Masked inverse transform Re(F^{-1} b) of the frame's data.
RealImage inverse(const FourierFrame& frame);

struct NoiseModel {
  std::vector<double> sigma;  // per frame, or a single value for all frames
  std::uint64_t seed = 0;

  double sigma_for(int frame_index) const;
};

/// Adds circular complex Gaussian noise with variance sigma^2 (sigma^2/2 per
/// real component) to the available entries only. Deterministic in seed.
FourierFrame add_noise(FourierFrame frame, double sigma, std::uint64_t seed);
FourierFrame add_noise(const FourierFrame& frame, const NoiseModel& model);

/// Statistic used for the signal level in the SNR ratio.
enum class SnrMean {
  complex_mean,    // |mean(b)| over available entries
  mean_magnitude,  // mean(|b|) over available entries
};

double signal_level(const FourierFrame& frame, SnrMean mean);

/// 10 log10((mean / sigma)^2). Returns +infinity when sigma == 0.
double snr_db(const FourierFrame& frame, SnrMean mean = SnrMean::complex_mean);

/// Noise level that yields the requested SNR for a noiseless frame.
double sigma_for_snr(const FourierFrame& noiseless, double snr_db_value, SnrMean mean);

/// Pixel-domain obstruction, given by its bounding box in [0,1]^2 (x along
/// rows, y along columns). Applied to the image before acquisition.
struct Occlusion {
  enum class Shape { rectangle, ellipse };
  enum class Fill { constant, gaussian };

  Shape shape = Shape::rectangle;
  double x0 = 0, y0 = 0, x1 = 0, y1 = 0;
  Fill fill = Fill::constant;
  double value = 0.0;   // constant fill
  double stddev = 0.0;  // zero-mean gaussian fill

  bool contains(double x, double y) const;
  void validate() const;
};

/// Pixels of a side x side periodic grid covered by the occlusions.
Mask occlusion_mask(int side, const std::vector<Occlusion>& occlusions);

RealImage apply_occlusions(RealImage image, const std::vector<Occlusion>& occlusions,
                           std::uint64_t seed);

struct SimulationOptions {
  GridSpec grid;
  int oversample = 4;  // source images are (oversample * side) per axis
  bool apply_bands = true;
  BandRule band_rule = BandRule::cross;
  std::vector<double> snr_db;  // per frame or one value; empty = use noise.sigma
  SnrMean calibration = SnrMean::mean_magnitude;
  NoiseModel noise;
};

/// Occludes each image, computes its coefficients on the fine grid,
/// truncates to [-N,N]^2 (rescaled to the coarse DFT convention), applies the
/// frame's missing band, then adds noise. images[j] has oversample*side pixels
/// per axis.
std::vector<FourierFrame> simulate_sequence(const std::vector<RealImage>& images,
                                            const std::vector<std::vector<Occlusion>>& occlusions,
                                            const SimulationOptions& options);

/// Fine-grid image -> centered coarse coefficients without mask or noise.
ComplexImage truncated_coefficients(const RealImage& fine_image, const GridSpec& grid);

}  // namespace seqrecon
