#pragma once

#include "pulsebench/types.hpp"

namespace pulsebench {

struct DegenerateLandmarks : Error { using Error::Error; };
struct BoxOutOfBounds : Error { using Error::Error; };

struct RectD {
  double x0 = 0, y0 = 0, w = 0, h = 0;
};

// Square face box in frame coordinates (sub-pixel).
struct FaceBox {
  double x0 = 0, y0 = 0, side = 0;
};

// Square box centered on the landmark centroid, sized by twice the largest
// Chebyshev distance from the centroid, expanded by `margin`. Clamped to the
// frame by translation; shrunk only when the side exceeds the frame. The raw
// detector box is ignored when landmarks are valid.
FaceBox adjust_box(const RectD& raw_box, const LandmarkSet& landmarks,
                   int frame_width, int frame_height, double margin = 1.10);

// Fallback when landmarks are flagged missing: centered square from the raw
// detector rectangle, clamped the same way.
FaceBox square_from_rect(const RectD& raw_box, int frame_width, int frame_height);

// Bilinear crop+resize with half-pixel-center sampling; channels independent;
// values rounded half-to-even to 8 bits.
Frame crop_resize(const Frame& frame, const FaceBox& box, int out_side = 72);

}  // namespace pulsebench
