#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "nlcoh/error.hpp"
#include "nlcoh/signals/fft.hpp"
#include "nlcoh/signals/frame_io.hpp"
#include "nlcoh/signals/spectra.hpp"

using namespace nlcoh;

TEST_CASE("fft matches a direct DFT") {
  for (std::size_t m : {2u, 5u, 16u, 63u, 100u}) {
    const auto x = test::random_vector(m, m);
    const SpectrumFrame f = fft(TimeFrame{x, 0.01});
    const auto ref = test::direct_dft(x);
    REQUIRE(f.size() == m);
    CHECK(f.df == doctest::Approx(1.0 / (0.01 * static_cast<double>(m))));
    double err = 0.0, scale = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      err = std::max(err, std::abs(f.bins[k] - ref[k]));
      scale = std::max(scale, std::abs(ref[k]));
    }
    CHECK(err <= 1e-12 * scale * static_cast<double>(m));
  }
}

TEST_CASE("cosine at an integer bin puts M/2 in bins k and M-k") {
  const std::size_t m = 64, k0 = 5;
  std::vector<double> x(m);
  for (std::size_t t = 0; t < m; ++t) x[t] = std::cos(2.0 * M_PI * k0 * t / m);
  const SpectrumFrame f = fft(TimeFrame{x, 1.0});
  for (std::size_t k = 0; k < m; ++k) {
    const double expected = (k == k0 || k == m - k0) ? m / 2.0 : 0.0;
    CHECK(std::abs(f.bins[k] - Complex(expected, 0.0)) < 1e-10);
  }
}

TEST_CASE("fft and ifft round trip") {
  const auto x = test::random_vector(6000, 3);
  const TimeFrame back = ifft(fft(TimeFrame{x, 0.0025}));
  CHECK(test::max_abs_diff(back.samples, x) < 1e-12);
  CHECK(back.dt == doctest::Approx(0.0025));

  RealFft r(6000);
  std::vector<Complex> half(r.half_length());
  std::vector<double> out(6000);
  r.forward(x, half);
  r.inverse(half, out);
  CHECK(test::max_abs_diff(out, x) < 1e-12);
}

TEST_CASE("fft rejects degenerate frames and ifft rejects non-Hermitian spectra") {
  CHECK_THROWS_AS(fft(TimeFrame{{}, 1.0}), InvalidInput);
  CHECK_THROWS_AS(fft(TimeFrame{{1.0}, 1.0}), InvalidInput);
  SpectrumFrame s{std::vector<Complex>(8, Complex{}), 1.0};
  s.bins[1] = {1.0, 0.0};
  CHECK_THROWS_AS(ifft(s), InvalidInput);
}

TEST_CASE("cross and power spectra of hand-built frames") {
  std::vector<SpectrumFrame> a{{{Complex(1, 1), Complex(2, 0)}, 1.0}, {{Complex(0, 1), Complex(0, 2)}, 1.0}};
  std::vector<SpectrumFrame> b{{{Complex(1, 0), Complex(1, 0)}, 1.0}, {{Complex(1, 0), Complex(0, -1)}, 1.0}};
  const CrossSpectrum s = cross_spectral_density(a, b);
  CHECK(std::abs(s.values[0] - Complex(0.5, 1.0)) < 1e-15);
  CHECK(std::abs(s.values[1] - Complex(0.0, 0.0)) < 1e-15);  // (2 + 2i*i)/2
  const RealCurve p = power_spectral_density(a);
  CHECK(p.values[0] == doctest::Approx(1.5));
  CHECK(p.values[1] == doctest::Approx(4.0));
}

TEST_CASE("linear coherence: identical, scaled, single frame and independent inputs") {
  std::mt19937_64 g(5);
  const std::size_t n = 1000, bins = 16;
  std::vector<SpectrumFrame> a(n), b(n), c(n);
  for (std::size_t i = 0; i < n; ++i) {
    a[i].bins.resize(bins);
    b[i].bins.resize(bins);
    c[i].bins.resize(bins);
    for (std::size_t k = 0; k < bins; ++k) {
      a[i].bins[k] = test::complex_normal(g, 1.0);
      b[i].bins[k] = Complex(2.0, -1.0) * a[i].bins[k];
      c[i].bins[k] = test::complex_normal(g, 1.0);
    }
  }
  for (double v : linear_coherence(a, b).values) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
  // Expected |coherence|^2 of independent records over n frames is 1/n.
  for (double v : linear_coherence(a, c).values) CHECK(v < 0.02);
  const std::span<const SpectrumFrame> one(a.data(), 1);
  CHECK_THROWS_AS(linear_coherence(one, std::span<const SpectrumFrame>(b.data(), 1)), InvalidInput);
  CoherenceOptions opts;
  opts.allow_single_frame = true;
  CHECK(linear_coherence(one, std::span<const SpectrumFrame>(c.data(), 1), opts).values[3] ==
        doctest::Approx(1.0));
  CHECK_THROWS_AS(linear_coherence(std::span<const SpectrumFrame>(a.data(), 3), std::span<const SpectrumFrame>(b.data(), 2)),
                  InvalidInput);
}

TEST_CASE("linear coherence for a linear system with output noise equals SNR/(1+SNR)") {
  std::mt19937_64 g(9);
  const std::size_t n = 4000;
  std::vector<SpectrumFrame> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i].bins = {test::complex_normal(g, 1.0), test::complex_normal(g, 1.0)};
    // bin 0: SNR 1, bin 1: SNR 3
    y[i].bins = {Complex(0.5, 0.5) * x[i].bins[0] + test::complex_normal(g, 0.5),
                 3.0 * x[i].bins[1] + test::complex_normal(g, 3.0)};
  }
  const RealCurve c = linear_coherence(x, y);
  CHECK(c.values[0] == doctest::Approx(0.5).epsilon(0.06));
  CHECK(c.values[1] == doctest::Approx(0.75).epsilon(0.04));
}

TEST_CASE("controlled-inputs PSD recovers the common component") {
  std::mt19937_64 g(17);
  const std::size_t n = 1000, bins = 8;
  std::vector<SpectrumFrame> y1(n), y2(n);
  for (std::size_t i = 0; i < n; ++i) {
    y1[i].bins.resize(bins);
    y2[i].bins.resize(bins);
    for (std::size_t k = 0; k < bins; ++k) {
      const Complex y = test::complex_normal(g, 2.0);
      y1[i].bins[k] = y + test::complex_normal(g, 2.0);
      y2[i].bins[k] = y + test::complex_normal(g, 2.0);
    }
  }
  for (double v : controlled_inputs_psd(y1, y2).values) CHECK(v == doctest::Approx(2.0).epsilon(0.15));
}

TEST_CASE("band mask and band mean") {
  RealCurve psd{{0.0, 0.5, 100.0, 2.0, 0.9}, 1.0};
  const auto mask = in_band_mask(psd);
  CHECK(mask == std::vector<bool>{false, false, true, true, false});
  const std::vector<double> v{9, 9, 1, 3, 9};
  CHECK(band_mean(v, mask) == doctest::Approx(2.0));
  CHECK(band_mean(v, std::vector<bool>(5, false)) == 0.0);
}

TEST_CASE("frame files round trip bit-exactly") {
  test::TempDir dir("frames");
  FrameSet s(3, 17, 0.002);
  const auto v = test::random_vector(51, 4, 1e3);
  std::copy(v.begin(), v.end(), s.data().begin());
  s.data()[5] = 1e-310;  // subnormal
  for (FrameFormat f : {FrameFormat::binary, FrameFormat::csv}) {
    const auto path = dir.path() / (std::string("x") + std::string(frame_format_extension(f)));
    write_frames(path, s, f);
    CHECK(read_frames(path, 3, 17, 0.002, f) == s);
    CHECK_THROWS_AS(read_frames(path, 4, 17, 0.002, f), DataError);
  }
  CHECK_THROWS_AS(read_frames(dir.path() / "missing.f64", 1, 1, 1.0, FrameFormat::binary), DataError);
  CHECK(parse_frame_format("csv") == FrameFormat::csv);
  CHECK_THROWS_AS(parse_frame_format("hdf5"), InvalidInput);
}
