#pragma once

#include <complex>
#include <vector>

#include "pulsebench/types.hpp"

namespace pulsebench {

struct TooShort : Error { using Error::Error; };
struct BandOutOfRange : Error { using Error::Error; };
struct FlatSpectrum : Error { using Error::Error; };

struct HrEstimate {
  double bpm = 0;
  double peak_freq = 0;
  double spectrum_snr = 0;  // dB, peak bin power vs remaining in-band power
};

// DFT; radix-2 when n is a power of two, direct evaluation otherwise.
// Inverse includes the 1/n factor.
std::vector<std::complex<double>> dft(const std::vector<std::complex<double>>& x,
                                      bool inverse = false);

// Contiguous run of round(seconds*fps) frames centered on the midpoint
// (left-biased when off by one).
FrameSequence select_segment(const FrameSequence& seq, double seconds = 16.0);
// Same centering rule on a raw sample count.
std::pair<std::size_t, std::size_t> segment_range(std::size_t n, double rate,
                                                  double seconds);

// Fourier resampling to m samples (scipy-style Nyquist split when even).
std::vector<double> fourier_resample(const std::vector<double>& x, std::size_t m);
PulseSignal fourier_resample(const PulseSignal& sig, double target_rate);
ReferenceSignal fourier_resample(const ReferenceSignal& sig, double target_rate);

// Zero mean, unit population variance; constant input yields zeros + flag.
std::vector<double> standardize(const std::vector<double>& x, bool* flat = nullptr);

// 2nd-order Butterworth band-pass (bilinear transform with pre-warping),
// applied forward-backward with reflect-101 padding of 3x filter order.
std::vector<double> butterworth_bandpass(const std::vector<double>& x, double fs,
                                         double low = 0.75, double high = 2.5);
PulseSignal butterworth_bandpass(const PulseSignal& sig, double low = 0.75,
                                 double high = 2.5);

// Hann window, zero-pad to >= 4096, periodogram peak in [band_low, band_high]
// with 3-point parabolic refinement.
HrEstimate estimate_hr(const PulseSignal& sig, double band_low = 0.75,
                       double band_high = 2.5);

}  // namespace pulsebench
