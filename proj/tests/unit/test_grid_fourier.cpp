#include <doctest.h>

#include <cmath>
#include <numbers>

#include "seqrecon/fft.hpp"
#include "seqrecon/fourier.hpp"
#include "support.hpp"

using namespace seqrecon;
using seqrecon::testing::random_complex;
using seqrecon::testing::random_image;
using seqrecon::testing::random_mask;

namespace {

constexpr double pi = std::numbers::pi;

// O(n^2) transform straight from the definition.
ComplexImage naive_dft(const ComplexImage& x, double sign) {
  const auto R = x.rows(), C = x.cols();
  ComplexImage out(R, C);
  for (Eigen::Index k = 0; k < R; ++k)
    for (Eigen::Index l = 0; l < C; ++l) {
      std::complex<double> acc = 0.0;
      for (Eigen::Index m = 0; m < R; ++m)
        for (Eigen::Index n = 0; n < C; ++n) {
          const double ph = sign * 2.0 * pi * (double(k * m) / R + double(l * n) / C);
          acc += x(m, n) * std::polar(1.0, ph);
        }
      out(k, l) = acc;
    }
  return out;
}

double max_abs(const ComplexImage& a) { return a.abs().maxCoeff(); }

}  // namespace

TEST_CASE("grid geometry") {
  const GridSpec g(16, 6);
  CHECK(g.side() == 33);
  CHECK(g.pixels() == 33 * 33);
  CHECK(g.coord(0) == 0.0);
  CHECK(g.coord(33) == doctest::Approx(1.0));
  CHECK(g.freq_offset(-16) == 0);
  CHECK(g.freq_offset(16) == 32);
  CHECK_THROWS_AS(GridSpec(0), Error);
  CHECK_THROWS_AS(GridSpec(4, 0), Error);
  CHECK_THROWS_AS(ImageGrid(g, RealImage::Zero(32, 33)), DimensionError);
}

TEST_CASE("fft matches the direct transform") {
  std::mt19937_64 rng(11);
  const ComplexImage x = random_complex(rng, 5, 7);
  CHECK(max_abs(fft::forward(x) - naive_dft(x, -1.0)) < 1e-11);
  CHECK(max_abs(fft::backward(x) - naive_dft(x, +1.0)) < 1e-11);
  const ComplexImage round = fft::backward(fft::forward(x)) / 35.0;
  CHECK(max_abs(round - x) < 1e-13);
}

TEST_CASE("centering is a cyclic shift with an exact inverse") {
  std::mt19937_64 rng(12);
  const RealImage a = random_image(rng, 7, 5);
  const RealImage c = fft::to_centered(a);
  CHECK(c(3, 2) == a(0, 0));
  CHECK(c(0, 0) == a(4, 3));
  CHECK((fft::from_centered(c) == a).all());
  CHECK(fft::signed_frequency(0, 7) == 0);
  CHECK(fft::signed_frequency(3, 7) == 3);
  CHECK(fft::signed_frequency(4, 7) == -3);
}

TEST_CASE("missing band schedule") {
  CHECK(missing_band(1, 6) == BandInterval{10, 35});
  CHECK(missing_band(2, 6) == BandInterval{16, 41});
  CHECK(missing_band(6, 6) == BandInterval{40, 65});
  CHECK_THROWS_AS(missing_band(0, 6), Error);
  CHECK_THROWS_AS(missing_band(7, 6), Error);
  const BandInterval b{10, 35};
  CHECK(b.contains(-10));
  CHECK(b.contains(35));
  CHECK_FALSE(b.contains(9));
  CHECK_FALSE(b.contains(-36));
}

TEST_CASE("band masks") {
  const GridSpec g(16);
  const BandInterval band{10, 35};

  SUBCASE("full sampling") { CHECK(count_set(band_mask(g, std::nullopt)) == g.pixels()); }

  SUBCASE("cross removes whole rows and columns") {
    const Mask m = band_mask(g, band, BandRule::cross);
    long expected = 0;
    for (int k = -16; k <= 16; ++k)
      for (int l = -16; l <= 16; ++l) {
        const bool keep = !band.contains(k) && !band.contains(l);
        expected += keep;
        CHECK((m(g.freq_offset(k), g.freq_offset(l)) != 0) == keep);
      }
    CHECK(count_set(m) == expected);
    CHECK(expected == 19 * 19);
    CHECK(is_conjugate_symmetric(m));
  }

  SUBCASE("square annulus removes a ring") {
    const Mask m = band_mask(g, band, BandRule::square_annulus);
    for (int k = -16; k <= 16; ++k)
      for (int l = -16; l <= 16; ++l) {
        const int r = std::max(std::abs(k), std::abs(l));
        CHECK((m(g.freq_offset(k), g.freq_offset(l)) != 0) == (r < 10 || r > 35));
      }
    CHECK(is_conjugate_symmetric(m));
  }

  SUBCASE("symmetry check catches a lone entry") {
    Mask m = Mask::Ones(g.side(), g.side());
    m(g.freq_offset(3), g.freq_offset(-2)) = 0;
    CHECK_FALSE(is_conjugate_symmetric(m));
  }
}

TEST_CASE("forward places the DC term at the center") {
  const GridSpec g(4);
  const RealImage x = RealImage::Constant(g.side(), g.side(), 2.0);
  const FourierFrame f = forward(ImageGrid(g, x), band_mask(g, std::nullopt), 3);
  CHECK(f.index == 3);
  CHECK(std::abs(f.at(0, 0) - std::complex<double>(2.0 * g.pixels())) < 1e-12);
  CHECK(std::abs(f.at(1, 0)) < 1e-12);
  CHECK(std::abs(f.at(-4, 3)) < 1e-12);
}

TEST_CASE("forward applies the convention exp(-2 pi i (k x + l y))") {
  const GridSpec g(5);
  const int side = g.side();
  RealImage x(side, side);
  for (int m = 0; m < side; ++m)
    for (int n = 0; n < side; ++n) x(m, n) = std::cos(2.0 * pi * (2.0 * m / side - 1.0 * n / side));
  const FourierFrame f = forward(ImageGrid(g, x), band_mask(g, std::nullopt));
  const double half = 0.5 * g.pixels();
  CHECK(std::abs(f.at(2, -1) - half) < 1e-10);
  CHECK(std::abs(f.at(-2, 1) - half) < 1e-10);
  CHECK(std::abs(f.at(2, 1)) < 1e-10);
}

TEST_CASE("masked forward and adjoint are adjoint") {
  std::mt19937_64 rng(13);
  const GridSpec g(6);
  for (int trial = 0; trial < 20; ++trial) {
    Mask m = random_mask(rng, g.side(), g.side(), 0.6);
    const Eigen::Index n = g.side();
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) m(n - 1 - i, n - 1 - j) = m(i, j);
    const RealImage x = random_image(rng, g.side(), g.side());
    const ComplexImage y = random_complex(rng, g.side(), g.side());
    const FourierFrame fx = forward(ImageGrid(g, x), m);
    double lhs = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i)
      lhs += (fx.coeffs.data()[i] * std::conj(y.data()[i])).real();
    const double rhs = (x * adjoint(g, y, m)).sum();
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-11));
    // Unavailable entries are zero.
    for (Eigen::Index i = 0; i < m.size(); ++i)
      if (!m.data()[i]) CHECK(fx.coeffs.data()[i] == std::complex<double>(0.0));
  }
}

TEST_CASE("inverse undoes forward with full sampling") {
  std::mt19937_64 rng(14);
  const GridSpec g(7);
  const RealImage x = random_image(rng, g.side(), g.side());
  const FourierFrame f = forward(ImageGrid(g, x), band_mask(g, std::nullopt));
  CHECK((inverse(f) - x).abs().maxCoeff() < 1e-12);
}

TEST_CASE("truncated coefficients of a disk follow the Bessel formula") {
  // Continuous coefficients of the indicator of a disk of radius R at c:
  //   R J1(2 pi R rho) / rho * exp(-2 pi i (k cx + l cy)),  rho = |(k,l)|.
  const GridSpec g(16);
  const int fine = 8 * g.side();
  const double R = 0.2, cx = 0.45, cy = 0.55;
  RealImage img(fine, fine);
  for (int m = 0; m < fine; ++m)
    for (int n = 0; n < fine; ++n) {
      const double dx = double(m) / fine - cx, dy = double(n) / fine - cy;
      img(m, n) = dx * dx + dy * dy <= R * R ? 1.0 : 0.0;
    }
  const ComplexImage c = truncated_coefficients(img, g);
  const double scale = g.pixels();
  const double area = pi * R * R;
  for (int k = -4; k <= 4; ++k)
    for (int l = -4; l <= 4; ++l) {
      const double rho = std::hypot(double(k), double(l));
      const double mag = rho == 0.0 ? area : R * std::cyl_bessel_j(1.0, 2.0 * pi * R * rho) / rho;
      const std::complex<double> expected = mag * std::polar(1.0, -2.0 * pi * (k * cx + l * cy));
      CHECK(std::abs(c(g.freq_offset(k), g.freq_offset(l)) / scale - expected) < 1e-2 * area);
    }
}

TEST_CASE("noise has the requested variance and is deterministic") {
  const GridSpec g(40);
  FourierFrame f = forward(ImageGrid::zeros(g), band_mask(g, BandInterval{10, 35}));
  const FourierFrame a = add_noise(f, 2.0, 99);
  const FourierFrame b = add_noise(f, 2.0, 99);
  const FourierFrame c = add_noise(f, 2.0, 100);
  CHECK((a.coeffs == b.coeffs).all());
  CHECK_FALSE((a.coeffs == c.coeffs).all());
  CHECK(a.noise_sigma == 2.0);

  double power = 0.0, re2 = 0.0;
  long n = 0;
  for (Eigen::Index i = 0; i < a.coeffs.size(); ++i) {
    if (!a.available.data()[i]) {
      CHECK(a.coeffs.data()[i] == std::complex<double>(0.0));
      continue;
    }
    power += std::norm(a.coeffs.data()[i]);
    re2 += a.coeffs.data()[i].real() * a.coeffs.data()[i].real();
    ++n;
  }
  // 841 available entries: the tolerances are about three standard errors.
  CHECK(power / n == doctest::Approx(4.0).epsilon(0.11));
  CHECK(re2 / n == doctest::Approx(2.0).epsilon(0.15));
}

TEST_CASE("per-frame noise levels") {
  NoiseModel one{{0.5}, 1};
  CHECK(one.sigma_for(1) == 0.5);
  CHECK(one.sigma_for(6) == 0.5);
  NoiseModel per{{0.1, 0.2, 0.3}, 1};
  CHECK(per.sigma_for(2) == 0.2);
  CHECK_THROWS_AS(per.sigma_for(4), Error);
}

TEST_CASE("SNR calibration round trip") {
  std::mt19937_64 rng(15);
  const GridSpec g(8);
  const FourierFrame f = forward(ImageGrid(g, random_image(rng, g.side(), g.side()).abs()),
                                 band_mask(g, BandInterval{3, 5}));
  for (SnrMean mean : {SnrMean::complex_mean, SnrMean::mean_magnitude}) {
    FourierFrame noisy = f;
    noisy.noise_sigma = sigma_for_snr(f, 6.0, mean);
    CHECK(snr_db(noisy, mean) == doctest::Approx(6.0));
  }
  CHECK(std::isinf(snr_db(f)));
  // Mean magnitude dominates the magnitude of the complex mean.
  CHECK(signal_level(f, SnrMean::mean_magnitude) >= signal_level(f, SnrMean::complex_mean));
}

TEST_CASE("occlusions") {
  Occlusion box;
  box.x0 = 0.2, box.y0 = 0.3, box.x1 = 0.4, box.y1 = 0.5;
  CHECK(box.contains(0.3, 0.4));
  CHECK_FALSE(box.contains(0.1, 0.4));
  const int side = 21;
  const Mask m = occlusion_mask(side, {box});
  long expected = 0;
  for (int i = 0; i < side; ++i)
    for (int j = 0; j < side; ++j) expected += box.contains(double(i) / side, double(j) / side);
  CHECK(count_set(m) == expected);

  RealImage img = RealImage::Constant(side, side, 1.0);
  box.value = -2.0;
  const RealImage out = apply_occlusions(img, {box}, 0);
  for (int i = 0; i < side; ++i)
    for (int j = 0; j < side; ++j) CHECK(out(i, j) == (m(i, j) ? -2.0 : 1.0));

  Occlusion bad;
  bad.x0 = 0.5, bad.x1 = 0.4, bad.y0 = 0.1, bad.y1 = 0.2;
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("simulated sequence carries bands, noise and frame indices") {
  const GridSpec g(8, 3);
  const int fine = 4 * g.side();
  std::vector<RealImage> images(3, RealImage::Constant(fine, fine, 1.0));
  SimulationOptions opt;
  opt.grid = g;
  opt.noise.sigma = {0.0};
  const auto frames = simulate_sequence(images, {}, opt);
  REQUIRE(frames.size() == 3);
  for (int j = 1; j <= 3; ++j) {
    const auto& f = frames[static_cast<size_t>(j) - 1];
    CHECK(f.index == j);
    CHECK((f.available == band_mask(g, missing_band(j, 3))).all());
    CHECK(std::abs(f.at(0, 0) - std::complex<double>(g.pixels())) < 1e-9);
  }
  opt.snr_db = {10.0};
  const auto noisy = simulate_sequence(images, {}, opt);
  for (size_t j = 0; j < 3; ++j) {
    const double sigma = sigma_for_snr(frames[j], 10.0, opt.calibration);
    CHECK(noisy[j].noise_sigma == doctest::Approx(sigma));
    CHECK(signal_level(frames[j], opt.calibration) / sigma == doctest::Approx(std::pow(10.0, 0.5)));
  }
}
