#include "pulsebench/signal.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace pulsebench {

namespace {

bool is_pow2(std::size_t n) { return n && (n & (n - 1)) == 0; }

void fft_radix2(std::vector<std::complex<double>>& a, bool inverse) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    double ang = 2.0 * M_PI / static_cast<double>(len) * (inverse ? 1.0 : -1.0);
    std::complex<double> wl(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        auto u = a[i + k];
        auto v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wl;
      }
    }
  }
}

std::vector<double> lfilter(const std::vector<double>& b, const std::vector<double>& a,
                            const std::vector<double>& x) {
  // Direct form II transposed, zero initial state.
  const std::size_t order = a.size() - 1;
  std::vector<double> z(order, 0.0), y(x.size());
  for (std::size_t n = 0; n < x.size(); ++n) {
    double out = b[0] * x[n] + z[0];
    for (std::size_t i = 0; i < order; ++i) {
      double znext = (i + 1 < order) ? z[i + 1] : 0.0;
      z[i] = b[i + 1] * x[n] - a[i + 1] * out + znext;
    }
    y[n] = out;
  }
  return y;
}

// Polynomial coefficients (descending powers) from complex roots.
std::vector<std::complex<double>> poly_from_roots(
    const std::vector<std::complex<double>>& roots) {
  std::vector<std::complex<double>> c{1.0};
  for (const auto& r : roots) {
    c.push_back(0.0);
    for (std::size_t i = c.size() - 1; i > 0; --i) c[i] -= r * c[i - 1];
  }
  return c;
}

struct Biquad5 {
  std::vector<double> b, a;  // length 5 each
};

Biquad5 design_bandpass(double fs, double low, double high) {
  if (!(0 < low && low < high && high < fs / 2.0))
    throw BandOutOfRange("band must satisfy 0 < low < high < fs/2");
  const double fs2 = 2.0 * fs;
  const double wl = fs2 * std::tan(M_PI * low / fs);
  const double wh = fs2 * std::tan(M_PI * high / fs);
  const double bw = wh - wl;
  const double w0 = std::sqrt(wl * wh);

  // Order-2 Butterworth low-pass prototype poles.
  std::vector<std::complex<double>> proto{
      std::polar(1.0, 3.0 * M_PI / 4.0), std::polar(1.0, 5.0 * M_PI / 4.0)};

  // Low-pass -> band-pass: each pole splits into two; two zeros at s = 0.
  std::vector<std::complex<double>> poles, zeros{0.0, 0.0};
  for (const auto& p : proto) {
    std::complex<double> half = p * bw / 2.0;
    std::complex<double> disc = std::sqrt(half * half - w0 * w0);
    poles.push_back(half + disc);
    poles.push_back(half - disc);
  }
  double gain = bw * bw;  // bw^(prototype order)

  // Bilinear transform.
  std::complex<double> num(1.0, 0.0), den(1.0, 0.0);
  std::vector<std::complex<double>> zp, zz;
  for (const auto& z : zeros) {
    zz.push_back((fs2 + z) / (fs2 - z));
    num *= (fs2 - z);
  }
  for (const auto& p : poles) {
    zp.push_back((fs2 + p) / (fs2 - p));
    den *= (fs2 - p);
  }
  double kz = gain * (num / den).real();
  while (zz.size() < zp.size()) zz.push_back(-1.0);

  auto bc = poly_from_roots(zz);
  auto ac = poly_from_roots(zp);
  Biquad5 f;
  for (const auto& c : bc) f.b.push_back(kz * c.real());
  for (const auto& c : ac) f.a.push_back(c.real());
  return f;
}

}  // namespace

std::vector<std::complex<double>> dft(const std::vector<std::complex<double>>& x,
                                      bool inverse) {
  const std::size_t n = x.size();
  std::vector<std::complex<double>> y;
  if (is_pow2(n)) {
    y = x;
    fft_radix2(y, inverse);
  } else {
    y.assign(n, 0.0);
    const double sign = inverse ? 1.0 : -1.0;
    for (std::size_t k = 0; k < n; ++k) {
      std::complex<double> acc = 0.0;
      for (std::size_t t = 0; t < n; ++t) {
        double ang = sign * 2.0 * M_PI * static_cast<double>(k) *
                     static_cast<double>(t) / static_cast<double>(n);
        acc += x[t] * std::complex<double>(std::cos(ang), std::sin(ang));
      }
      y[k] = acc;
    }
  }
  if (inverse)
    for (auto& v : y) v /= static_cast<double>(n);
  return y;
}

std::pair<std::size_t, std::size_t> segment_range(std::size_t n, double rate,
                                                  double seconds) {
  const std::size_t want =
      static_cast<std::size_t>(std::llround(seconds * rate));
  if (want == 0) throw Error("segment length must be positive");
  if (want > n) throw TooShort("signal shorter than requested segment");
  const std::size_t start = (n - want) / 2;
  return {start, start + want};
}

FrameSequence select_segment(const FrameSequence& seq, double seconds) {
  auto [lo, hi] = segment_range(seq.frames.size(), seq.fps, seconds);
  FrameSequence out;
  out.fps = seq.fps;
  out.source_id = seq.source_id;
  out.frames.assign(seq.frames.begin() + static_cast<long>(lo),
                    seq.frames.begin() + static_cast<long>(hi));
  return out;
}

std::vector<double> fourier_resample(const std::vector<double>& x, std::size_t m) {
  const std::size_t n = x.size();
  if (n < 2) throw TooShort("need >= 2 samples to resample");
  if (m < 1) throw Error("target length must be >= 1");
  if (m == n) return x;

  std::vector<std::complex<double>> cx(x.begin(), x.end());
  auto X = dft(cx, false);
  std::vector<std::complex<double>> Y(m, 0.0);
  const std::size_t mn = std::min(m, n);
  const std::size_t nyq = mn / 2 + 1;
  for (std::size_t k = 0; k < nyq; ++k) Y[k] = X[k];
  if (mn > 2) {
    const std::size_t tail = mn - nyq;
    for (std::size_t k = 0; k < tail; ++k) Y[m - tail + k] = X[n - tail + k];
  }
  if (mn % 2 == 0) {
    if (m < n) {
      Y[mn / 2] += X[n - mn / 2];  // fold the conjugate Nyquist half
    } else if (m > n) {
      Y[mn / 2] *= 0.5;  // split shared Nyquist weight
      Y[m - mn / 2] = Y[mn / 2];
    }
  }
  auto y = dft(Y, true);
  std::vector<double> out(m);
  const double scale = static_cast<double>(m) / static_cast<double>(n);
  for (std::size_t i = 0; i < m; ++i) out[i] = y[i].real() * scale;
  return out;
}

PulseSignal fourier_resample(const PulseSignal& sig, double target_rate) {
  if (target_rate <= 0) throw Error("target rate must be positive");
  const std::size_t m = static_cast<std::size_t>(
      std::llround(static_cast<double>(sig.samples.size()) * target_rate / sig.fps));
  PulseSignal out;
  out.samples = fourier_resample(sig.samples, m);
  out.fps = target_rate;
  out.flagged = sig.flagged;
  return out;
}

ReferenceSignal fourier_resample(const ReferenceSignal& sig, double target_rate) {
  if (target_rate <= 0) throw Error("target rate must be positive");
  const std::size_t m = static_cast<std::size_t>(std::llround(
      static_cast<double>(sig.samples.size()) * target_rate / sig.sample_rate));
  ReferenceSignal out;
  out.samples = fourier_resample(sig.samples, m);
  out.sample_rate = target_rate;
  out.kind = sig.kind;
  return out;
}

std::vector<double> standardize(const std::vector<double>& x, bool* flat) {
  if (x.size() < 2) throw TooShort("need >= 2 samples to standardize");
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / x.size();
  double var = 0;
  for (double v : x) var += (v - mean) * (v - mean);
  var /= x.size();
  if (flat) *flat = false;
  if (var == 0.0) {
    if (flat) *flat = true;
    return std::vector<double>(x.size(), 0.0);
  }
  const double inv = 1.0 / std::sqrt(var);
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = (x[i] - mean) * inv;
  return out;
}

std::vector<double> butterworth_bandpass(const std::vector<double>& x, double fs,
                                         double low, double high) {
  const Biquad5 f = design_bandpass(fs, low, high);
  const std::size_t pad = 3 * (f.a.size() - 1);
  if (x.size() < 2) throw TooShort("need >= 2 samples to filter");
  const std::size_t p = std::min(pad, x.size() - 1);

  std::vector<double> ext;
  ext.reserve(x.size() + 2 * p);
  for (std::size_t i = p; i >= 1; --i) ext.push_back(x[i]);
  ext.insert(ext.end(), x.begin(), x.end());
  for (std::size_t i = 2; i <= p + 1; ++i) ext.push_back(x[x.size() - i]);

  auto y = lfilter(f.b, f.a, ext);
  std::reverse(y.begin(), y.end());
  y = lfilter(f.b, f.a, y);
  std::reverse(y.begin(), y.end());
  return std::vector<double>(y.begin() + static_cast<long>(p),
                             y.begin() + static_cast<long>(p + x.size()));
}

PulseSignal butterworth_bandpass(const PulseSignal& sig, double low, double high) {
  PulseSignal out;
  out.samples = butterworth_bandpass(sig.samples, sig.fps, low, high);
  out.fps = sig.fps;
  out.flagged = sig.flagged;
  return out;
}

HrEstimate estimate_hr(const PulseSignal& sig, double band_low, double band_high) {
  const std::size_t n = sig.samples.size();
  if (n < 64) throw TooShort("need >= 64 samples for HR estimation");
  if (!(0 < band_low && band_low < band_high && band_high < sig.fps / 2.0))
    throw BandOutOfRange("HR band must lie below Nyquist");

  std::size_t nfft = 4096;
  while (nfft < n) nfft <<= 1;
  std::vector<std::complex<double>> buf(nfft, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double w = 0.5 * (1.0 - std::cos(2.0 * M_PI * i / (n - 1)));
    buf[i] = sig.samples[i] * w;
  }
  auto X = dft(buf, false);

  const double df = sig.fps / static_cast<double>(nfft);
  std::size_t k_lo = static_cast<std::size_t>(std::ceil(band_low / df));
  std::size_t k_hi = static_cast<std::size_t>(std::floor(band_high / df));
  k_hi = std::min(k_hi, nfft / 2);
  if (k_lo > k_hi) throw BandOutOfRange("band contains no spectral bins");

  double in_band = 0, peak = -1;
  std::size_t k_peak = k_lo;
  for (std::size_t k = k_lo; k <= k_hi; ++k) {
    double p = std::norm(X[k]);
    in_band += p;
    if (p > peak) {
      peak = p;
      k_peak = k;
    }
  }
  if (peak <= 0.0) throw FlatSpectrum("no in-band spectral power");

  double delta = 0.0;
  if (k_peak > 0 && k_peak + 1 < nfft) {
    const double pm = std::norm(X[k_peak - 1]);
    const double pc = peak;
    const double pp = std::norm(X[k_peak + 1]);
    const double denom = pm - 2.0 * pc + pp;
    if (denom < 0.0) delta = std::clamp(0.5 * (pm - pp) / denom, -0.5, 0.5);
  }
  HrEstimate est;
  est.peak_freq =
      std::clamp((static_cast<double>(k_peak) + delta) * df, band_low, band_high);
  est.bpm = 60.0 * est.peak_freq;
  const double rest = in_band - peak;
  est.spectrum_snr = rest > 0.0 ? 10.0 * std::log10(peak / rest)
                                : std::numeric_limits<double>::infinity();
  return est;
}

}  // namespace pulsebench
