#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "approx.hpp"
#include "doctest.h"
#include "pulsebench/rppg.hpp"
#include "pulsebench/signal.hpp"

using namespace pulsebench;

namespace {

double correlation(const std::vector<double>& a, const std::vector<double>& b) {
  const std::size_t n = std::min(a.size(), b.size());
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < n; ++i) { ma += a[i]; mb += b[i]; }
  ma /= n; mb /= n;
  double num = 0, da = 0, db = 0;
  for (std::size_t i = 0; i < n; ++i) {
    num += (a[i] - ma) * (b[i] - mb);
    da += (a[i] - ma) * (a[i] - ma);
    db += (b[i] - mb) * (b[i] - mb);
  }
  return num / std::sqrt(da * db);
}

// Pulsatile trace: base color, pulse sinusoid with per-channel amplitudes,
// common-mode drift below the heart band.
RgbTrace pulsatile_trace(double bpm = 72, double fps = 20, std::size_t n = 320,
                         std::array<double, 3> amp = {0.495, 0.77, 0.424},
                         double drift = 2.0) {
  RgbTrace trace;
  trace.fps = fps;
  trace.samples.resize(n);
  const std::array<double, 3> base{150, 100, 80};
  // A pinch of full-rank noise: purely analytic traces are rank-deficient
  // and would make PBV's Gram matrix singular.
  std::mt19937_64 eng(1234);
  std::uniform_real_distribution<double> jitter(-0.01, 0.01);
  for (std::size_t t = 0; t < n; ++t) {
    const double pulse = std::sin(2 * M_PI * (bpm / 60.0) * t / fps);
    const double dr = drift * std::sin(2 * M_PI * 0.25 * t / fps + 0.3);
    for (int c = 0; c < 3; ++c)
      trace.samples[t][c] = base[c] + amp[c] * pulse + dr + jitter(eng);
  }
  return trace;
}

double trace_bpm(const PulseSignal& sig) {
  return estimate_hr(butterworth_bandpass(sig, 0.75, 2.5), 0.75, 2.5).bpm;
}

RgbTrace constant_trace(std::size_t n = 64) {
  RgbTrace trace;
  trace.fps = 20;
  trace.samples.assign(n, {120, 90, 70});
  return trace;
}

std::vector<double> ground_truth(double bpm, double fps, std::size_t n) {
  std::vector<double> x(n);
  for (std::size_t t = 0; t < n; ++t)
    x[t] = std::sin(2 * M_PI * (bpm / 60.0) * t / fps);
  return x;
}

}  // namespace

TEST_CASE("extract_trace means, masks and carry-forward") {
  FrameSequence seq;
  seq.fps = 20;
  for (int v : {10, 20, 30}) seq.frames.push_back(Frame(4, 4, v));
  RgbTrace t = extract_trace(seq);
  REQUIRE(t.samples.size() == 3);
  for (int i = 0; i < 3; ++i)
    for (int c = 0; c < 3; ++c) CHECK(t.samples[i][c] == (i + 1) * 10.0);

  Frame half(4, 4, 0);
  for (int y = 0; y < 2; ++y)
    for (int x = 0; x < 4; ++x)
      for (int c = 0; c < 3; ++c) half.at(x, y, c) = 255;
  FrameSequence hs;
  hs.fps = 20;
  hs.frames = {half};
  CHECK(extract_trace(hs).samples[0][0] == doctest::Approx(127.5));

  // Hand-computed masked mean: exclude the white half.
  std::vector<MaskImage> masks(1, MaskImage(4, 4));
  for (int y = 0; y < 2; ++y)
    for (int x = 0; x < 4; ++x) masks[0].set(x, y, true);
  CHECK(extract_trace(hs, &masks).samples[0][1] == 0.0);

  // Fully masked second frame carries the first frame's value forward.
  FrameSequence two;
  two.fps = 20;
  two.frames = {Frame(4, 4, 50), Frame(4, 4, 200)};
  std::vector<MaskImage> m2{MaskImage(4, 4), MaskImage(4, 4, true)};
  RgbTrace ct = extract_trace(two, &m2);
  CHECK(ct.samples[1][0] == 50.0);

  std::vector<MaskImage> m1{MaskImage(4, 4, true)};
  CHECK_THROWS_AS(extract_trace(hs, &m1), AllMaskedFirstFrame);
}

TEST_CASE("green depends only on the G column and recovers the tone") {
  RgbTrace trace = pulsatile_trace(72, 20, 320, {0.495, 0.77, 0.424}, 0.0);
  PulseSignal s = green(trace);
  CHECK(s.samples.size() == trace.samples.size());
  CHECK(s.fps == 20.0);
  const auto truth = ground_truth(72, 20, 320);
  CHECK(correlation(s.samples, truth) > 0.99);

  RgbTrace scrambled = trace;
  std::mt19937_64 eng(1);
  std::uniform_real_distribution<double> u(-5, 5);
  for (auto& row : scrambled.samples) { row[0] += u(eng); row[2] += u(eng); }
  PulseSignal s2 = green(scrambled);
  for (std::size_t i = 0; i < s.samples.size(); ++i)
    CHECK(s2.samples[i] == s.samples[i]);
}

TEST_CASE("ica recovers a mixed periodic source and is deterministic") {
  // Invertible mixing of three independent sources.
  const std::size_t n = 320;
  RgbTrace trace;
  trace.fps = 20;
  trace.samples.resize(n);
  std::mt19937_64 eng(5);
  std::uniform_real_distribution<double> u(-1, 1);
  const double mix[3][3] = {{0.9, 0.3, 0.2}, {0.4, 1.0, 0.1}, {0.2, 0.5, 0.8}};
  std::vector<double> s1(n), s2(n), s3(n);
  for (std::size_t t = 0; t < n; ++t) {
    s1[t] = std::sin(2 * M_PI * 1.2 * t / 20.0);
    s2[t] = std::sin(2 * M_PI * 0.3 * t / 20.0);
    s3[t] = u(eng);
    for (int c = 0; c < 3; ++c)
      trace.samples[t][c] = 100 + mix[c][0] * s1[t] + mix[c][1] * s2[t] +
                            mix[c][2] * s3[t];
  }
  PulseSignal a = ica(trace, 42, IcaSelect::Periodic);
  CHECK(std::abs(correlation(a.samples, s1)) > 0.95);

  PulseSignal b = ica(trace, 42, IcaSelect::Periodic);
  CHECK(a.samples == b.samples);

  RgbTrace flat = trace;
  for (auto& row : flat.samples) row[1] = 100.0;
  CHECK_THROWS_AS(ica(flat, 42), ConstantChannel);
}

TEST_CASE("ica second component carries the pulse under drift") {
  RgbTrace trace = pulsatile_trace();
  PulseSignal s = ica(trace, 42, IcaSelect::Second);
  CHECK(trace_bpm(s) == Near{72.0, 2.0});
}

TEST_CASE("chrom recovers the pulse and is scale invariant") {
  RgbTrace trace = pulsatile_trace();
  PulseSignal s = chrom(trace);
  CHECK(std::abs(correlation(s.samples, ground_truth(72, 20, 320))) > 0.9);

  RgbTrace scaled = trace;
  for (auto& row : scaled.samples)
    for (int c = 0; c < 3; ++c) row[c] *= 3.7;
  PulseSignal s2 = chrom(scaled);
  for (std::size_t i = 0; i < s.samples.size(); ++i)
    CHECK(s2.samples[i] == Near{s.samples[i], 1e-9});

  RgbTrace zero;
  zero.fps = 20;
  zero.samples.assign(64, {0, 0, 0});
  CHECK_THROWS_AS(chrom(zero), ZeroMeanChannel);
}

TEST_CASE("pbv recovers variation along the signature") {
  // Pulse along the signature direction in normalized color space, plus two
  // tiny tones along directions orthogonal to it (and mutually orthogonal in
  // time: all three have an integer cycle count over the window). That keeps
  // the Gram matrix invertible without coupling noise into the solution.
  RgbTrace trace;
  trace.fps = 20;
  trace.samples.resize(320);
  const std::array<double, 3> base{150, 100, 80};
  const std::array<double, 3>& p = PbvVector::standard().get();
  std::array<double, 3> v2{p[1], -p[0], 0.0};
  const double n2 = std::hypot(v2[0], v2[1]);
  v2 = {v2[0] / n2, v2[1] / n2, 0.0};
  const std::array<double, 3> v3{p[1] * v2[2] - p[2] * v2[1],
                                 p[2] * v2[0] - p[0] * v2[2],
                                 p[0] * v2[1] - p[1] * v2[0]};
  for (std::size_t t = 0; t < 320; ++t) {
    const double pulse = std::sin(2 * M_PI * 20.0 * t / 320);  // 1.25 Hz
    const double tone2 = std::sin(2 * M_PI * 10.0 * t / 320);
    const double tone3 = std::sin(2 * M_PI * 45.0 * t / 320);
    for (int c = 0; c < 3; ++c)
      trace.samples[t][c] = base[c] * (1.0 + 0.01 * p[c] * pulse +
                                       0.002 * v2[c] * tone2 +
                                       0.002 * v3[c] * tone3);
  }
  PulseSignal s = pbv(trace);
  CHECK(std::abs(correlation(s.samples, ground_truth(75, 20, 320))) > 0.999);

  CHECK_THROWS_AS(pbv(constant_trace()), SingularGram);
  CHECK_THROWS_AS(PbvVector({0.0, 1.0, 0.0}), Error);     // non-positive
  CHECK_THROWS_AS(PbvVector({0.33, 0.77, 0.53}), Error);  // not unit norm
  CHECK_NOTHROW(PbvVector::normalized(0.33, 0.77, 0.53));
}

TEST_CASE("pos window length and pulse recovery") {
  RgbTrace trace = pulsatile_trace();
  PulseSignal s = pos(trace);
  CHECK(s.samples.size() == 320);
  CHECK(trace_bpm(s) == Near{72.0, 1.0});

  // Per-channel gains leave the downstream HR unchanged (tone normalization).
  RgbTrace gained = trace;
  for (auto& row : gained.samples) { row[0] *= 1.4; row[1] *= 0.8; row[2] *= 1.1; }
  CHECK(trace_bpm(pos(gained)) == Near{trace_bpm(s), 0.5});

  RgbTrace tiny;
  tiny.fps = 20;
  tiny.samples.assign(16, {100, 100, 100});  // shorter than l = 32
  CHECK_THROWS_AS(pos(tiny), TooShort);
}

TEST_CASE("lgi annihilates pure common-mode variation") {
  RgbTrace trace;
  trace.fps = 20;
  trace.samples.resize(128);
  for (std::size_t t = 0; t < 128; ++t) {
    const double v = std::sin(2 * M_PI * 1.0 * t / 20.0);
    for (int c = 0; c < 3; ++c) trace.samples[t][c] = 100 + v;
  }
  PulseSignal s = lgi(trace);
  CHECK(s.flagged);
  for (double v : s.samples) CHECK(std::abs(v) <= 1e-9);
}

TEST_CASE("lgi beats green under strong common-mode drift") {
  // Drift inside the band so GREEN locks onto it; LGI projects it out.
  RgbTrace trace = pulsatile_trace(90, 20, 320, {0.3, 0.8, 0.5}, 0.0);
  for (std::size_t t = 0; t < 320; ++t) {
    const double dr = 6.0 * std::sin(2 * M_PI * 0.9 * t / 20.0);
    for (int c = 0; c < 3; ++c) trace.samples[t][c] += dr;
  }
  const double lgi_err = std::abs(trace_bpm(lgi(trace)) - 90.0);
  const double green_err = std::abs(trace_bpm(green(trace)) - 90.0);
  CHECK(lgi_err < green_err);
  CHECK(lgi_err < 2.0);
}

TEST_CASE("all transforms: constant input gives zero or flagged-zero output") {
  RgbTrace flat = constant_trace(320);
  for (const std::string name : {"green", "chrom", "pos", "lgi"}) {
    PulseSignal s = apply_method(name, flat, 42);
    for (double v : s.samples) CHECK(std::abs(v) < 1e-9);
  }
  CHECK_THROWS_AS(apply_method("ica", flat, 42), ConstantChannel);
  CHECK_THROWS_AS(apply_method("pbv", flat, 42), SingularGram);
}

TEST_CASE("scale invariance of chrom, pos, pbv") {
  RgbTrace trace = pulsatile_trace();
  RgbTrace scaled = trace;
  for (auto& row : scaled.samples)
    for (int c = 0; c < 3; ++c) row[c] *= 11.0;
  for (const std::string name : {"chrom", "pos", "pbv"}) {
    PulseSignal a = apply_method(name, trace, 42);
    PulseSignal b = apply_method(name, scaled, 42);
    REQUIRE(a.samples.size() == b.samples.size());
    for (std::size_t i = 0; i < a.samples.size(); ++i)
      CHECK(b.samples[i] == Near{a.samples[i], 1e-9});
  }
}

TEST_CASE("transforms preserve length and fps; unknown method rejected") {
  RgbTrace trace = pulsatile_trace();
  for (const std::string name : {"green", "ica", "chrom", "pbv", "pos", "lgi"}) {
    PulseSignal s = apply_method(name, trace, 42);
    CHECK(s.samples.size() == trace.samples.size());
    CHECK(s.fps == trace.fps);
  }
  CHECK_THROWS_AS(apply_method("fft", trace, 42), Error);
}
