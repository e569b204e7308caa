#include "seqrecon/edge_detect.hpp"

#include <charconv>
#include <cmath>
#include <numbers>

#include "seqrecon/fft.hpp"

namespace seqrecon {
namespace {

using std::numbers::pi;

// int_0^1 exp(1/(alpha t (t-1))) dt by composite Simpson; the integrand is
// flat (C-infinity, all derivatives zero) at both ends.
double exponential_normalizer(double alpha) {
  constexpr int n = 4000;
  const double h = 1.0 / n;
  double sum = 0.0;
  for (int i = 1; i < n; ++i) {
    const double t = i * h;
    sum += (i % 2 ? 4.0 : 2.0) * std::exp(1.0 / (alpha * t * (t - 1.0)));
  }
  return sum * h / 3.0;
}

}  // namespace

ConcentrationFactor ConcentrationFactor::parse(std::string_view name) {
  if (name == "trig" || name == "trigonometric") return trigonometric();
  if (name == "exp" || name == "exponential") return exponential();
  if (name.starts_with("poly")) {
    auto rest = name.substr(4);
    if (rest.starts_with("nomial")) rest = rest.substr(6);
    int p = 1;
    if (!rest.empty()) {
      auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), p);
      if (ec != std::errc() || ptr != rest.data() + rest.size() || p < 1)
        throw Error("unknown concentration factor '" + std::string(name) + "'");
    }
    return polynomial(p);
  }
  throw Error("unknown concentration factor '" + std::string(name) + "'");
}

double ConcentrationFactor::operator()(double eta) const {
  if (eta <= 0.0 || eta > 1.0) return 0.0;
  switch (kind) {
    case Kind::trigonometric:
      return pi * std::sin(pi * eta) / sine_integral_pi;
    case Kind::polynomial:
      return order * pi * std::pow(eta, order);
    case Kind::exponential: {
      if (eta >= 1.0) return 0.0;
      thread_local double cached_alpha = -1.0, cached_norm = 0.0;
      if (alpha != cached_alpha) {
        cached_alpha = alpha;
        cached_norm = pi / exponential_normalizer(alpha);
      }
      return cached_norm * eta * std::exp(1.0 / (alpha * eta * (eta - 1.0)));
    }
  }
  return 0.0;
}

double EdgeRegularizer::h(double t) { return std::exp(-5.0 * t * t); }

double EdgeRegularizer::h_hat(double w) {
  return std::sqrt(pi / 5.0) * std::exp(-pi * pi * w * w / 5.0);
}

std::vector<double> concentration_sum_1d(std::span<const std::complex<double>> fhat,
                                         const ConcentrationFactor& factor,
                                         std::span<const double> x) {
  if (fhat.size() % 2 == 0) throw DimensionError("concentration_sum_1d: need 2N+1 coefficients");
  const int n = static_cast<int>(fhat.size() / 2);
  std::vector<std::complex<double>> weighted(fhat.size(), 0.0);
  for (int k = -n; k <= n; ++k) {
    if (k == 0) continue;
    const double sgn = k > 0 ? 1.0 : -1.0;
    weighted[k + n] = std::complex<double>(0.0, sgn * factor(std::abs(k) / double(n))) * fhat[k + n];
  }
  std::vector<double> out(x.size(), 0.0);
  for (size_t i = 0; i < x.size(); ++i) {
    std::complex<double> s = 0.0;
    for (int k = -n; k <= n; ++k) {
      if (k == 0) continue;
      s += weighted[k + n] * std::polar(1.0, 2.0 * pi * k * x[i]);
    }
    out[i] = s.real();
  }
  return out;
}

ComplexImage edge_coefficients_2d(const FourierFrame& frame, double theta,
                                  const EdgeRegularizer& reg) {
  frame.check();
  if (!(reg.epsilon > 0)) throw Error("edge_coefficients_2d: epsilon must be positive");
  const int n = frame.grid.half_bandwidth;
  const double norm = 1.0 / frame.grid.pixels();
  const double c = std::cos(theta), s = std::sin(theta);
  ComplexImage out(frame.grid.side(), frame.grid.side());
  for (int k = -n; k <= n; ++k) {
    for (int l = -n; l <= n; ++l) {
      const int i = k + n, j = l + n;
      if (!frame.available(i, j)) {
        out(i, j) = 0.0;
        continue;
      }
      const double w = k * c + l * s;
      const double mult = 2.0 * pi * w * reg.epsilon * EdgeRegularizer::h_hat(reg.epsilon * w);
      out(i, j) = std::complex<double>(0.0, mult) * frame.coeffs(i, j) * norm;
    }
  }
  return out;
}

ComplexImage concentration_coefficients_2d(const FourierFrame& frame, double theta,
                                           const ConcentrationFactor& factor) {
  frame.check();
  const int n = frame.grid.half_bandwidth;
  const double norm = 1.0 / frame.grid.pixels();
  const double c = std::cos(theta), s = std::sin(theta);
  ComplexImage out = ComplexImage::Zero(frame.grid.side(), frame.grid.side());
  for (int k = -n; k <= n; ++k) {
    for (int l = -n; l <= n; ++l) {
      const int i = k + n, j = l + n;
      if (!frame.available(i, j)) continue;
      const double w = k * c + l * s;
      if (w == 0.0) continue;
      const double mult = (w > 0 ? 1.0 : -1.0) * factor(std::abs(w) / n);
      out(i, j) = std::complex<double>(0.0, mult) * frame.coeffs(i, j) * norm;
    }
  }
  return out;
}

std::vector<double> rotation_angles(int rotations) {
  if (rotations < 2) throw Error("rotation_angles: need at least 2 rotations");
  std::vector<double> angles(rotations);
  for (int m = 0; m < rotations; ++m) angles[m] = pi * m / (rotations - 1);
  return angles;
}

RealImage partial_sum(const ComplexImage& centered) {
  return fft::backward(fft::from_centered(centered)).real();
}

EdgeMap edge_map(const FourierFrame& frame, int rotations, const EdgeRegularizer& reg,
                 std::optional<ConcentrationFactor> factor) {
  EdgeMap map;
  map.angles = rotation_angles(rotations);
  const int side = frame.grid.side();
  map.signed_average = RealImage::Zero(side, side);
  map.averaged = RealImage::Zero(side, side);
  map.per_rotation.reserve(rotations);
  for (double theta : map.angles) {
    const ComplexImage coeffs = factor ? concentration_coefficients_2d(frame, theta, *factor)
                                       : edge_coefficients_2d(frame, theta, reg);
    RealImage h = partial_sum(coeffs);
    map.signed_average += h;
    map.averaged += h.abs();
    map.per_rotation.push_back(std::move(h));
  }
  map.signed_average /= rotations;
  map.averaged /= rotations;
  return map;
}

}  // namespace seqrecon
