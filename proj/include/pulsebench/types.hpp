#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace pulsebench {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionMismatch : Error { using Error::Error; };

// 8-bit RGB image, row-major, channel-interleaved (R,G,B).
struct Frame {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  Frame() = default;
  Frame(int w, int h, std::uint8_t fill = 0)
      : width(w), height(h), pixels(static_cast<std::size_t>(w) * h * 3, fill) {
    if (w < 1 || h < 1) throw Error("Frame: dimensions must be >= 1");
  }

  std::uint8_t& at(int x, int y, int c) {
    return pixels[(static_cast<std::size_t>(y) * width + x) * 3 + c];
  }
  std::uint8_t at(int x, int y, int c) const {
    return pixels[(static_cast<std::size_t>(y) * width + x) * 3 + c];
  }
  bool same_size(const Frame& o) const {
    return width == o.width && height == o.height;
  }
};

struct FrameSequence {
  std::vector<Frame> frames;
  double fps = 0.0;
  std::string source_id;
};

// Binary occlusion mask; true = occluded.
struct MaskImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> bits;

  MaskImage() = default;
  MaskImage(int w, int h, bool fill = false)
      : width(w), height(h), bits(static_cast<std::size_t>(w) * h, fill ? 1 : 0) {}

  bool at(int x, int y) const {
    return bits[static_cast<std::size_t>(y) * width + x] != 0;
  }
  void set(int x, int y, bool v) {
    bits[static_cast<std::size_t>(y) * width + x] = v ? 1 : 0;
  }
  std::size_t count() const {
    std::size_t n = 0;
    for (auto b : bits) n += b;
    return n;
  }
};

struct Point2d {
  double x = 0.0;
  double y = 0.0;
};

// 68-point Multi-PIE landmark layout: jaw 0-16, brows 17-26, nose bridge
// 27-30, nose base 31-35, right eye 36-41, left eye 42-47, mouth 48-67.
struct LandmarkSet {
  std::array<Point2d, 68> points{};
};

enum class SignalKind { BvpWaveform, HrSeriesBpm };

struct ReferenceSignal {
  std::vector<double> samples;
  double sample_rate = 0.0;
  SignalKind kind = SignalKind::BvpWaveform;
};

// Per-frame spatial mean of R,G,B over the ROI.
struct RgbTrace {
  std::vector<std::array<double, 3>> samples;
  double fps = 0.0;
};

struct PulseSignal {
  std::vector<double> samples;
  double fps = 0.0;
  // Set when the transform had to fall back to a zero/degenerate output
  // (rank-deficient projection, unconverged ICA, zero variance).
  bool flagged = false;
};

// Round half-to-even, then clamp to [0,255].
inline std::uint8_t round_u8(double v) {
  double r = std::nearbyint(v);
  if (r < 0.0) return 0;
  if (r > 255.0) return 255;
  return static_cast<std::uint8_t>(r);
}

}  // namespace pulsebench
