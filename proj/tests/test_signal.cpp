#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <complex>
#include <random>

#include "approx.hpp"
#include "doctest.h"
#include "pulsebench/signal.hpp"

using namespace pulsebench;

namespace {

// Direct O(n^2) DFT, written independently of the library implementation.
std::vector<std::complex<double>> dft_oracle(
    const std::vector<std::complex<double>>& x) {
  const std::size_t n = x.size();
  std::vector<std::complex<double>> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::complex<double> acc = 0;
    for (std::size_t t = 0; t < n; ++t)
      acc += x[t] * std::polar(1.0, -2.0 * M_PI * static_cast<double>(k * t) / n);
    out[k] = acc;
  }
  return out;
}

std::vector<double> sine(double freq_hz, double fps, std::size_t n,
                         double amp = 1.0, double phase = 0.0) {
  std::vector<double> x(n);
  for (std::size_t t = 0; t < n; ++t)
    x[t] = amp * std::sin(2 * M_PI * freq_hz * t / fps + phase);
  return x;
}

}  // namespace

TEST_CASE("dft matches the direct-evaluation oracle") {
  std::mt19937_64 eng(2);
  std::uniform_real_distribution<double> u(-1, 1);
  for (std::size_t n : {16u, 12u, 64u, 37u}) {
    std::vector<std::complex<double>> x(n);
    for (auto& v : x) v = {u(eng), u(eng)};
    auto got = dft(x);
    auto want = dft_oracle(x);
    for (std::size_t k = 0; k < n; ++k)
      CHECK(std::abs(got[k] - want[k]) < 1e-9 * static_cast<double>(n));
  }
}

TEST_CASE("dft inverse round trip") {
  std::mt19937_64 eng(3);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<std::complex<double>> x(48);
  for (auto& v : x) v = {u(eng), u(eng)};
  auto back = dft(dft(x), true);
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(std::abs(back[i] - x[i]) < 1e-10);
}

TEST_CASE("segment selection is centered with left bias") {
  auto [lo, hi] = segment_range(1800, 30.0, 16.0);
  CHECK(lo == 660);
  CHECK(hi == 1140);

  auto [a, b] = segment_range(320, 20.0, 16.0);
  CHECK(a == 0);
  CHECK(b == 320);

  auto [c, d] = segment_range(321, 20.0, 16.0);  // odd leftover goes left
  CHECK(c == 0);
  CHECK(d == 320);

  CHECK_THROWS_AS(segment_range(200, 20.0, 16.0), TooShort);
}

TEST_CASE("select_segment slices frames") {
  FrameSequence seq;
  seq.fps = 20;
  for (int i = 0; i < 340; ++i) seq.frames.push_back(Frame(2, 2, i % 256));
  FrameSequence out = select_segment(seq, 16.0);
  REQUIRE(out.frames.size() == 320);
  CHECK(out.frames.front().pixels[0] == 10 % 256);
  CHECK(out.frames.back().pixels[0] == 73);  // (10 + 319) % 256
}

TEST_CASE("fourier resampling preserves a band-limited sine") {
  auto x = sine(1.0, 30.0, 480);
  auto y = fourier_resample(x, 320);
  REQUIRE(y.size() == 320);
  double worst = 0;
  for (std::size_t t = 0; t < 320; ++t)
    worst = std::max(worst, std::abs(y[t] - std::sin(2 * M_PI * 1.0 * t / 20.0)));
  CHECK(worst < 1e-9);
}

TEST_CASE("fourier resampling trivia: identity, DC, round trip") {
  auto x = sine(1.3, 20.0, 200, 2.0, 0.4);
  auto same = fourier_resample(x, 200);
  for (std::size_t t = 0; t < 200; ++t)
    CHECK(same[t] == Near{x[t], 1e-12});

  std::vector<double> dc(100, 3.25);
  for (double v : fourier_resample(dc, 60))
    CHECK(v == Near{3.25, 1e-9});

  auto up = fourier_resample(x, 400);
  auto back = fourier_resample(up, 200);
  for (std::size_t t = 0; t < 200; ++t)
    CHECK(back[t] == Near{x[t], 1e-9});
}

TEST_CASE("fourier resampling of PulseSignal and ReferenceSignal updates rates") {
  PulseSignal p;
  p.fps = 30;
  p.samples = sine(1.0, 30.0, 480);
  PulseSignal q = fourier_resample(p, 20.0);
  CHECK(q.fps == 20.0);
  CHECK(q.samples.size() == 320);

  ReferenceSignal r;
  r.sample_rate = 62;
  r.kind = SignalKind::BvpWaveform;
  r.samples = sine(1.2, 62.0, 992);
  ReferenceSignal s = fourier_resample(r, 20.0);
  CHECK(s.sample_rate == 20.0);
  CHECK(s.samples.size() == 320);
  CHECK(s.kind == SignalKind::BvpWaveform);
}

TEST_CASE("standardize hand case and flags") {
  auto z = standardize({1, 2, 3});
  REQUIRE(z.size() == 3);
  CHECK(z[0] == doctest::Approx(-1.2247448714).epsilon(1e-9));
  CHECK(z[1] == Near{0.0, 1e-12});
  CHECK(z[2] == doctest::Approx(1.2247448714).epsilon(1e-9));

  bool flat = false;
  auto c = standardize({5, 5, 5, 5}, &flat);
  CHECK(flat);
  for (double v : c) CHECK(v == 0.0);

  auto again = standardize(z);
  for (std::size_t i = 0; i < 3; ++i)
    CHECK(again[i] == Near{z[i], 1e-12});
}

TEST_CASE("butterworth band-pass gains") {
  const double fc = std::sqrt(0.75 * 2.5);  // geometric band center
  auto x = sine(fc, 20.0, 320);
  auto y = butterworth_bandpass(x, 20.0, 0.75, 2.5);
  double xin = 0, yout = 0;
  for (std::size_t t = 60; t < 260; ++t) {
    xin = std::max(xin, std::abs(x[t]));
    yout = std::max(yout, std::abs(y[t]));
  }
  CHECK(yout / xin > 0.95);
  CHECK(yout / xin < 1.05);

  auto hi = butterworth_bandpass(sine(5.0, 20.0, 320), 20.0, 0.75, 2.5);
  double worst = 0;
  for (std::size_t t = 60; t < 260; ++t) worst = std::max(worst, std::abs(hi[t]));
  CHECK(worst < 0.1);

  // DC: transients from the band edges decay slowly, so measure deep inside
  // a long signal.
  auto dc = butterworth_bandpass(std::vector<double>(2000, 1.0), 20.0, 0.75, 2.5);
  double dcw = 0;
  for (std::size_t t = 900; t < 1100; ++t) dcw = std::max(dcw, std::abs(dc[t]));
  CHECK(dcw < 1e-6);
}

TEST_CASE("butterworth is linear") {
  auto x = sine(1.1, 20.0, 256);
  auto y = sine(2.0, 20.0, 256, 0.7, 1.1);
  std::vector<double> mix(256);
  for (std::size_t t = 0; t < 256; ++t) mix[t] = 2.0 * x[t] - 3.0 * y[t];
  auto fx = butterworth_bandpass(x, 20.0);
  auto fy = butterworth_bandpass(y, 20.0);
  auto fmix = butterworth_bandpass(mix, 20.0);
  for (std::size_t t = 0; t < 256; ++t)
    CHECK(fmix[t] == Near{2.0 * fx[t] - 3.0 * fy[t], 1e-9});
}

TEST_CASE("butterworth band validation") {
  CHECK_THROWS_AS(butterworth_bandpass(sine(1, 20, 64), 20.0, 2.5, 0.75),
                  BandOutOfRange);
  CHECK_THROWS_AS(butterworth_bandpass(sine(1, 20, 64), 20.0, 0.75, 10.5),
                  BandOutOfRange);
}

TEST_CASE("estimate_hr on pure tones") {
  PulseSignal sig;
  sig.fps = 20;
  sig.samples = sine(1.2, 20.0, 320);
  HrEstimate est = estimate_hr(sig);
  CHECK(std::abs(est.bpm - 72.0) < 0.5);
  CHECK(est.peak_freq == Near{1.2, 0.01});
  // The peak-bin-vs-rest SNR is higher for a tone than for white noise.
  std::mt19937_64 eng(99);
  std::uniform_real_distribution<double> u(-1, 1);
  PulseSignal noise;
  noise.fps = 20;
  noise.samples.resize(320);
  for (auto& v : noise.samples) v = u(eng);
  CHECK(est.spectrum_snr > estimate_hr(noise).spectrum_snr);
}

TEST_CASE("estimate_hr prefers the in-band peak") {
  PulseSignal sig;
  sig.fps = 20;
  sig.samples.resize(320);
  for (std::size_t t = 0; t < 320; ++t)
    sig.samples[t] = 3.0 * std::sin(2 * M_PI * 0.5 * t / 20.0) +
                     1.0 * std::sin(2 * M_PI * 1.5 * t / 20.0);
  CHECK(std::abs(estimate_hr(sig).bpm - 90.0) < 0.5);
}

TEST_CASE("estimate_hr stays within the band and rejects flat input") {
  std::mt19937_64 eng(12);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 5; ++trial) {
    PulseSignal sig;
    sig.fps = 20;
    sig.samples.resize(128);
    for (auto& v : sig.samples) v = u(eng);
    HrEstimate est = estimate_hr(sig, 0.75, 2.5);
    CHECK(est.bpm >= 45.0);
    CHECK(est.bpm <= 150.0);
  }
  PulseSignal zero;
  zero.fps = 20;
  zero.samples.assign(320, 0.0);
  CHECK_THROWS_AS(estimate_hr(zero), FlatSpectrum);
}
