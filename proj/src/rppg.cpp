#include "pulsebench/rppg.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>

#include "pulsebench/rng.hpp"
#include "pulsebench/signal.hpp"

namespace pulsebench {

namespace {

constexpr double kTransformBandLow = 0.75;
constexpr double kTransformBandHigh = 4.0;

Eigen::MatrixXd to_matrix(const RgbTrace& trace) {
  Eigen::MatrixXd m(3, static_cast<long>(trace.samples.size()));
  for (long t = 0; t < m.cols(); ++t)
    for (int c = 0; c < 3; ++c) m(c, t) = trace.samples[t][c];
  return m;
}

double population_std(const std::vector<double>& x) {
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / x.size();
  double var = 0;
  for (double v : x) var += (v - mean) * (v - mean);
  return std::sqrt(var / x.size());
}

PulseSignal make_signal(std::vector<double> samples, double fps, bool flagged = false) {
  PulseSignal s;
  s.samples = std::move(samples);
  s.fps = fps;
  s.flagged = flagged;
  return s;
}

PulseSignal unit_variance_or_flag(Eigen::VectorXd v, double fps) {
  const double mean = v.mean();
  v.array() -= mean;
  const double sd = std::sqrt(v.squaredNorm() / v.size());
  if (sd < 1e-12)
    return make_signal(std::vector<double>(v.size(), 0.0), fps, true);
  v /= sd;
  return make_signal(std::vector<double>(v.data(), v.data() + v.size()), fps);
}

// Fraction of spectral power inside [lo, hi]; used by the Periodic selector.
double inband_fraction(const std::vector<double>& x, double fps, double lo, double hi) {
  std::size_t nfft = 1024;
  while (nfft < x.size()) nfft <<= 1;
  std::vector<std::complex<double>> buf(nfft, 0.0);
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / x.size();
  for (std::size_t i = 0; i < x.size(); ++i) buf[i] = x[i] - mean;
  auto X = dft(buf, false);
  const double df = fps / static_cast<double>(nfft);
  double total = 0, band = 0;
  for (std::size_t k = 1; k <= nfft / 2; ++k) {
    const double p = std::norm(X[k]);
    total += p;
    const double f = k * df;
    if (f >= lo && f <= hi) band += p;
  }
  return total > 0 ? band / total : 0.0;
}

}  // namespace

PbvVector::PbvVector(const std::array<double, 3>& p) : p_(p) {
  const double norm = std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
  if (std::abs(norm - 1.0) > 1e-9)
    throw Error("PBV signature must have unit Euclidean norm");
  if (p[0] <= 0 || p[1] <= 0 || p[2] <= 0)
    throw Error("PBV signature components must be positive");
}

PbvVector PbvVector::normalized(double r, double g, double b) {
  const double norm = std::sqrt(r * r + g * g + b * b);
  if (norm == 0) throw Error("PBV signature must be nonzero");
  return PbvVector({r / norm, g / norm, b / norm});
}

const PbvVector& PbvVector::standard() {
  static const PbvVector v = PbvVector::normalized(0.33, 0.77, 0.53);
  return v;
}

RgbTrace extract_trace(const FrameSequence& seq, const std::vector<MaskImage>* masks) {
  if (seq.frames.empty()) throw TooShort("empty frame sequence");
  if (masks && masks->size() != seq.frames.size())
    throw DimensionMismatch("mask count differs from frame count");
  RgbTrace trace;
  trace.fps = seq.fps;
  trace.samples.reserve(seq.frames.size());
  for (std::size_t f = 0; f < seq.frames.size(); ++f) {
    const Frame& fr = seq.frames[f];
    const MaskImage* m = masks ? &(*masks)[f] : nullptr;
    if (m && (m->width != fr.width || m->height != fr.height))
      throw DimensionMismatch("mask size differs from frame size");
    double sum[3] = {0, 0, 0};
    std::size_t n = 0;
    for (int y = 0; y < fr.height; ++y)
      for (int x = 0; x < fr.width; ++x) {
        if (m && m->at(x, y)) continue;
        for (int c = 0; c < 3; ++c) sum[c] += fr.at(x, y, c);
        ++n;
      }
    if (n == 0) {
      if (f == 0) throw AllMaskedFirstFrame("first frame is fully masked");
      trace.samples.push_back(trace.samples.back());
    } else {
      trace.samples.push_back({sum[0] / n, sum[1] / n, sum[2] / n});
    }
  }
  return trace;
}

PulseSignal green(const RgbTrace& trace) {
  if (trace.samples.size() < 2) throw TooShort("green: need >= 2 samples");
  std::vector<double> g(trace.samples.size());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = trace.samples[i][1];
  const double mean = std::accumulate(g.begin(), g.end(), 0.0) / g.size();
  for (double& v : g) v -= mean;
  return make_signal(
      butterworth_bandpass(g, trace.fps, kTransformBandLow, kTransformBandHigh),
      trace.fps);
}

PulseSignal ica(const RgbTrace& trace, std::uint64_t seed, IcaSelect select) {
  const long T = static_cast<long>(trace.samples.size());
  if (T < 32) throw TooShort("ica: need >= 32 samples");
  Eigen::MatrixXd X = to_matrix(trace);

  // Standardize each channel.
  for (int c = 0; c < 3; ++c) {
    const double mean = X.row(c).mean();
    X.row(c).array() -= mean;
    const double sd = std::sqrt(X.row(c).squaredNorm() / T);
    if (sd < 1e-12) throw ConstantChannel("ica: constant color channel");
    X.row(c) /= sd;
  }

  // Whiten via eigendecomposition of the 3x3 covariance.
  const Eigen::Matrix3d cov = X * X.transpose() / static_cast<double>(T);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);
  Eigen::Vector3d d = eig.eigenvalues().cwiseMax(1e-12);
  const Eigen::Matrix3d E = eig.eigenvectors();
  const Eigen::Matrix3d white = d.cwiseSqrt().cwiseInverse().asDiagonal() * E.transpose();
  const Eigen::MatrixXd Z = white * X;

  // FastICA, cubic nonlinearity, deflation order, seeded init.
  GaussianSampler rng(seed);
  Eigen::Matrix3d W = Eigen::Matrix3d::Zero();
  bool converged_all = true;
  for (int i = 0; i < 3; ++i) {
    Eigen::Vector3d w(rng.next(), rng.next(), rng.next());
    for (int j = 0; j < i; ++j) w -= W.col(j).dot(w) * W.col(j);
    w.normalize();
    bool converged = false;
    for (int it = 0; it < 200; ++it) {
      Eigen::VectorXd proj = Z.transpose() * w;           // T
      Eigen::VectorXd cubed = proj.array().cube();        // (w^T z)^3
      Eigen::Vector3d wn = (Z * cubed) / static_cast<double>(T) - 3.0 * w;
      for (int j = 0; j < i; ++j) wn -= W.col(j).dot(wn) * W.col(j);
      const double n = wn.norm();
      if (n < 1e-12) break;
      wn /= n;
      const double agreement = std::abs(wn.dot(w));
      w = wn;
      if (std::abs(1.0 - agreement) < 1e-6) {
        converged = true;
        break;
      }
    }
    converged_all = converged_all && converged;
    W.col(i) = w;
  }

  // Order components by descending back-projected channel energy.
  const Eigen::Matrix3d mixing =
      E * d.cwiseSqrt().asDiagonal() * W;  // X ~ mixing * S
  std::array<int, 3> order{0, 1, 2};
  std::array<double, 3> energy;
  for (int i = 0; i < 3; ++i) energy[i] = mixing.col(i).squaredNorm();
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return energy[a] > energy[b]; });

  const Eigen::MatrixXd S = W.transpose() * Z;  // 3 x T components
  int chosen = order[1];
  if (select == IcaSelect::Periodic) {
    double best = -1;
    for (int i = 0; i < 3; ++i) {
      std::vector<double> comp(static_cast<std::size_t>(T));
      for (long t = 0; t < T; ++t) comp[static_cast<std::size_t>(t)] = S(i, t);
      const double frac =
          inband_fraction(comp, trace.fps, kTransformBandLow, kTransformBandHigh);
      if (frac > best) {
        best = frac;
        chosen = i;
      }
    }
  }

  std::vector<double> out(static_cast<std::size_t>(T));
  for (long t = 0; t < T; ++t) out[static_cast<std::size_t>(t)] = S(chosen, t);
  // Fix sign against the green channel.
  double corr = 0;
  for (long t = 0; t < T; ++t) corr += out[static_cast<std::size_t>(t)] * X(1, t);
  if (corr < 0)
    for (double& v : out) v = -v;
  return make_signal(std::move(out), trace.fps, !converged_all);
}

PulseSignal chrom(const RgbTrace& trace) {
  const std::size_t T = trace.samples.size();
  if (T < 32) throw TooShort("chrom: need >= 32 samples");
  double mean[3] = {0, 0, 0};
  for (const auto& s : trace.samples)
    for (int c = 0; c < 3; ++c) mean[c] += s[c];
  for (int c = 0; c < 3; ++c) {
    mean[c] /= static_cast<double>(T);
    if (mean[c] == 0.0) throw ZeroMeanChannel("chrom: zero-mean color channel");
  }
  std::vector<double> xs(T), ys(T);
  for (std::size_t t = 0; t < T; ++t) {
    const double rn = trace.samples[t][0] / mean[0];
    const double gn = trace.samples[t][1] / mean[1];
    const double bn = trace.samples[t][2] / mean[2];
    xs[t] = 3.0 * rn - 2.0 * gn;
    ys[t] = 1.5 * rn + gn - 1.5 * bn;
  }
  auto xf = butterworth_bandpass(xs, trace.fps, kTransformBandLow, kTransformBandHigh);
  auto yf = butterworth_bandpass(ys, trace.fps, kTransformBandLow, kTransformBandHigh);
  const double sy = population_std(yf);
  const double alpha = sy == 0.0 ? 1.0 : population_std(xf) / sy;
  std::vector<double> s(T);
  for (std::size_t t = 0; t < T; ++t) s[t] = xf[t] - alpha * yf[t];
  return make_signal(std::move(s), trace.fps);
}

PulseSignal pbv(const RgbTrace& trace, const PbvVector& signature) {
  const long T = static_cast<long>(trace.samples.size());
  if (T < 32) throw TooShort("pbv: need >= 32 samples");
  Eigen::MatrixXd C = to_matrix(trace);
  for (int c = 0; c < 3; ++c) {
    const double mean = C.row(c).mean();
    if (mean == 0.0) throw ZeroMeanChannel("pbv: zero-mean color channel");
    C.row(c) = C.row(c) / mean;
    C.row(c).array() -= 1.0;
  }
  const Eigen::Matrix3d Q = C * C.transpose();
  Eigen::FullPivLU<Eigen::Matrix3d> lu(Q);
  if (!lu.isInvertible()) throw SingularGram("pbv: singular Gram matrix");
  const Eigen::Vector3d p(signature.get()[0], signature.get()[1], signature.get()[2]);
  const Eigen::Vector3d w = lu.solve(p);
  Eigen::VectorXd s = C.transpose() * w;
  return unit_variance_or_flag(std::move(s), trace.fps);
}

PulseSignal pos(const RgbTrace& trace) {
  const std::size_t T = trace.samples.size();
  const std::size_t l = static_cast<std::size_t>(std::llround(1.6 * trace.fps));
  if (T < l) throw TooShort("pos: trace shorter than the 1.6 s window");
  std::vector<double> out(T, 0.0);
  std::vector<double> s1(l), s2(l);
  for (std::size_t n = 0; n + l <= T; ++n) {
    double mean[3] = {0, 0, 0};
    for (std::size_t k = 0; k < l; ++k)
      for (int c = 0; c < 3; ++c) mean[c] += trace.samples[n + k][c];
    for (double& m : mean) m /= static_cast<double>(l);
    for (std::size_t k = 0; k < l; ++k) {
      double cn[3];
      for (int c = 0; c < 3; ++c)
        cn[c] = mean[c] == 0.0 ? 1.0 : trace.samples[n + k][c] / mean[c];
      s1[k] = cn[1] - cn[2];
      s2[k] = -2.0 * cn[0] + cn[1] + cn[2];
    }
    const double sd2 = population_std(s2);
    const double ratio = sd2 == 0.0 ? 1.0 : population_std(s1) / sd2;
    double hmean = 0;
    for (std::size_t k = 0; k < l; ++k) hmean += s1[k] + ratio * s2[k];
    hmean /= static_cast<double>(l);
    for (std::size_t k = 0; k < l; ++k)
      out[n + k] += s1[k] + ratio * s2[k] - hmean;
  }
  return make_signal(std::move(out), trace.fps);
}

PulseSignal lgi(const RgbTrace& trace) {
  const long T = static_cast<long>(trace.samples.size());
  if (T < 32) throw TooShort("lgi: need >= 32 samples");
  Eigen::MatrixXd X = to_matrix(trace);
  for (int c = 0; c < 3; ++c) X.row(c).array() -= X.row(c).mean();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(X, Eigen::ComputeFullU);
  const Eigen::Vector3d u = svd.matrixU().col(0);
  const Eigen::MatrixXd proj = X - u * (u.transpose() * X);
  return unit_variance_or_flag(proj.row(1).transpose(), trace.fps);
}

PulseSignal apply_method(const std::string& name, const RgbTrace& trace,
                         std::uint64_t ica_seed, IcaSelect ica_select) {
  if (name == "green") return green(trace);
  if (name == "ica") return ica(trace, ica_seed, ica_select);
  if (name == "chrom") return chrom(trace);
  if (name == "pbv") return pbv(trace);
  if (name == "pos") return pos(trace);
  if (name == "lgi") return lgi(trace);
  throw Error("unknown rPPG method: " + name);
}

}  // namespace pulsebench
