#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "seqrecon/grid.hpp"

namespace seqrecon {

/// Admissible concentration factor sigma(eta), eta = |k|/N in (0,1].
/// Every kind is normalized so that int_0^1 sigma(eta)/eta d eta = pi, which
/// makes the concentration sum converge to the jump height.
struct ConcentrationFactor {
  enum class Kind { trigonometric, polynomial, exponential };

  Kind kind = Kind::trigonometric;
  int order = 1;       // polynomial: sigma = p*pi*eta^p
  double alpha = 6.0;  // exponential: sigma = C*eta*exp(1/(alpha*eta*(eta-1)))

  static ConcentrationFactor trigonometric() { return {}; }
  static ConcentrationFactor polynomial(int p) { return {Kind::polynomial, p, 6.0}; }
  static ConcentrationFactor exponential(double a = 6.0) { return {Kind::exponential, 1, a}; }

  /// Accepts "trig", "poly", "polyP" (e.g. "poly3") and "exp".
  static ConcentrationFactor parse(std::string_view name);

  double operator()(double eta) const;
};

/// Si(pi) = int_0^pi sin(t)/t dt.
inline constexpr double sine_integral_pi = 1.8519370519824661703610533701579913633458;

/// Regularized edge indicator h(r/eps) = exp(-5 (r/eps)^2).
struct EdgeRegularizer {
  double epsilon = 0.0;

  /// Default support: three pixels of the given grid.
  static EdgeRegularizer for_grid(const GridSpec& grid, double pixels = 3.0) {
    return {pixels * grid.dx()};
  }

  static double h(double t);
  /// Fourier transform of h under the exp(-2 pi i w t) convention:
  /// sqrt(pi/5) exp(-pi^2 w^2 / 5).
  static double h_hat(double w);
};

/// S_N f(x) = i sum_{1<=|k|<=N} sgn(k) sigma(|k|/N) fhat_k exp(2 pi i k x),
/// evaluated at each x. fhat has 2N+1 entries, index k+N. Returns the real part.
std::vector<double> concentration_sum_1d(std::span<const std::complex<double>> fhat,
                                         const ConcentrationFactor& factor,
                                         std::span<const double> x);

/// Rotated edge coefficients
///   2 pi i w eps hhat(eps w) fhat(k,l),  w = k cos(theta) + l sin(theta),
/// with fhat = b / side^2 (continuous-coefficient scale). Unavailable entries
/// contribute zero. Centered layout.
ComplexImage edge_coefficients_2d(const FourierFrame& frame, double theta,
                                  const EdgeRegularizer& reg);

/// Same rotation, but with a 1D concentration factor applied along the
/// direction theta: i sgn(w) sigma(|w|/N) fhat(k,l), zero for |w| > N.
ComplexImage concentration_coefficients_2d(const FourierFrame& frame, double theta,
                                           const ConcentrationFactor& factor);

/// theta_m = pi (m-1)/(M-1), m = 1..M.
std::vector<double> rotation_angles(int rotations);

struct EdgeMap {
  std::vector<double> angles;
  std::vector<RealImage> per_rotation;  // signed H_theta on the pixel grid
  RealImage signed_average;             // mean of per_rotation
  RealImage averaged;                   // mean of |per_rotation|, used downstream
};

/// Per-rotation partial sums of the edge coefficients and their average.
/// With no factor the Gaussian-regularized relation is used; otherwise the
/// given concentration factor is applied along each rotation.
EdgeMap edge_map(const FourierFrame& frame, int rotations, const EdgeRegularizer& reg,
                 std::optional<ConcentrationFactor> factor = std::nullopt);

/// Partial sum sum_{k,l} c(k,l) exp(2 pi i (k x_mu + l y_nu)) on the grid, real part.
RealImage partial_sum(const ComplexImage& centered);

}  // namespace seqrecon
