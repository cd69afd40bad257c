#include "pulsebench/synth.hpp"

#include <cmath>

#include "pulsebench/rng.hpp"

namespace pulsebench {

LandmarkSet canonical_landmarks(int side) {
  if (side < 2) throw Error("landmark template needs side >= 2");
  LandmarkSet lm;
  auto set = [&](int i, double x, double y) {
    lm.points[i] = {x * side, y * side};
  };
  // Jaw 0-16: elliptic arc, image-left temple to image-right temple.
  for (int i = 0; i <= 16; ++i) {
    const double phi = M_PI * i / 16.0;
    set(i, 0.5 - 0.38 * std::cos(phi), 0.45 + 0.45 * std::sin(phi));
  }
  // Brows 17-26.
  const double brow_x[5] = {0.20, 0.25, 0.31, 0.37, 0.42};
  const double brow_y[5] = {0.340, 0.315, 0.305, 0.315, 0.340};
  for (int i = 0; i < 5; ++i) {
    set(17 + i, brow_x[i], brow_y[i]);
    set(22 + i, 1.0 - brow_x[4 - i], brow_y[4 - i]);
  }
  // Nose bridge 27-30 and base 31-35.
  const double bridge_y[4] = {0.38, 0.45, 0.52, 0.58};
  for (int i = 0; i < 4; ++i) set(27 + i, 0.5, bridge_y[i]);
  const double base_x[5] = {0.42, 0.46, 0.50, 0.54, 0.58};
  for (int i = 0; i < 5; ++i) set(31 + i, base_x[i], 0.64);
  // Eyes 36-47 (right eye = image left).
  const double eye_dx[6] = {-0.07, -0.03, 0.02, 0.06, 0.02, -0.03};
  const double eye_dy[6] = {0.0, -0.03, -0.03, 0.0, 0.03, 0.03};
  for (int i = 0; i < 6; ++i) {
    set(36 + i, 0.31 + eye_dx[i], 0.40 + eye_dy[i]);
    set(42 + i, 0.69 - eye_dx[(9 - i) % 6], 0.40 + eye_dy[(9 - i) % 6]);
  }
  // Mouth: outer 48-59, inner 60-67.
  for (int i = 0; i < 12; ++i) {
    const double a = 2.0 * M_PI * i / 12.0;
    set(48 + i, 0.5 - 0.13 * std::cos(a), 0.75 + 0.05 * std::sin(a));
  }
  for (int i = 0; i < 8; ++i) {
    const double a = 2.0 * M_PI * i / 8.0;
    set(60 + i, 0.5 - 0.08 * std::cos(a), 0.75 + 0.025 * std::sin(a));
  }
  return lm;
}

SynthOutput generate(const SynthSpec& spec) {
  if (spec.pulse_bpm < 45 || spec.pulse_bpm > 150)
    throw Error("pulse_bpm must lie in [45, 150]");
  if (spec.fps <= 2.0 * spec.pulse_bpm / 60.0)
    throw Error("fps must exceed twice the pulse frequency");
  if (spec.modulation[0] < 0 || spec.modulation[1] < 0 || spec.modulation[2] < 0)
    throw Error("modulation amplitudes must be >= 0");
  if (spec.side < 11) throw Error("side must be >= 11");

  const std::size_t n_frames =
      static_cast<std::size_t>(std::llround(spec.duration_s * spec.fps));
  if (n_frames < 2) throw Error("duration too short");
  const int side = spec.side;
  const std::size_t n_values = static_cast<std::size_t>(side) * side * 3;

  // Static texture, frozen across frames.
  std::vector<double> texture(n_values);
  {
    GaussianSampler rng(mix_seed(spec.seed, 0xFFFFFFFFFFFFFFFFULL));
    for (std::size_t i = 0; i < n_values; ++i)
      texture[i] = spec.base_color[i % 3] + spec.texture_sigma * rng.next();
  }

  const double pulse_freq = spec.pulse_bpm / 60.0;
  SynthOutput out;
  out.frames.fps = spec.fps;
  out.frames.source_id = "synth";
  out.frames.frames.reserve(n_frames);
  out.reference.kind = SignalKind::BvpWaveform;
  out.reference.sample_rate = spec.fps;
  out.reference.samples.reserve(n_frames);
  out.landmarks = canonical_landmarks(side);

  for (std::size_t t = 0; t < n_frames; ++t) {
    const double phase = 2.0 * M_PI * pulse_freq * static_cast<double>(t) / spec.fps;
    const double pulse = std::sin(phase);
    const double drift =
        spec.drift_amplitude *
        std::sin(2.0 * M_PI * spec.drift_freq_hz * static_cast<double>(t) / spec.fps);
    out.reference.samples.push_back(pulse);

    Frame frame(side, side);
    if (spec.sensor_noise_sigma > 0) {
      GaussianSampler rng(mix_seed(spec.seed, t + 1));
      for (std::size_t i = 0; i < n_values; ++i)
        frame.pixels[i] = round_u8(texture[i] + spec.modulation[i % 3] * pulse +
                                   drift + spec.sensor_noise_sigma * rng.next());
    } else {
      for (std::size_t i = 0; i < n_values; ++i)
        frame.pixels[i] =
            round_u8(texture[i] + spec.modulation[i % 3] * pulse + drift);
    }
    out.frames.frames.push_back(std::move(frame));
  }
  return out;
}

}  // namespace pulsebench
