#pragma once

#include <array>
#include <cstdint>

#include "pulsebench/types.hpp"

namespace pulsebench {

struct SynthSpec {
  double duration_s = 16.0;
  double fps = 20.0;
  int side = 72;
  std::array<double, 3> base_color{150.0, 100.0, 80.0};
  double pulse_bpm = 72.0;
  // Per-channel peak amplitudes, 8-bit units. The default keeps the
  // normalized color variation aligned with the standard blood-volume
  // signature (amplitude proportional to signature * base color).
  std::array<double, 3> modulation{0.4950, 0.7700, 0.4240};
  // Slow common-mode intensity drift (below the HR band) so dimensionality-
  // reduction transforms see a dominant non-pulse direction, as real
  // illumination provides.
  double drift_amplitude = 2.0;
  double drift_freq_hz = 0.25;
  double texture_sigma = 4.0;
  double sensor_noise_sigma = 0.0;
  std::uint64_t seed = 1;
};

struct SynthOutput {
  FrameSequence frames;
  ReferenceSignal reference;  // exact pulse sinusoid, kind BVP
  LandmarkSet landmarks;      // canonical frontal template scaled to the frame
};

// Fixed canonical 68-point frontal layout scaled to a side x side frame.
LandmarkSet canonical_landmarks(int side);

SynthOutput generate(const SynthSpec& spec);

}  // namespace pulsebench
