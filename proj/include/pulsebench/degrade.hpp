#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "pulsebench/types.hpp"

namespace pulsebench {

struct DegenerateGeometry : Error { using Error::Error; };
struct SelfIntersectingPolygon : Error { using Error::Error; };

struct BlurParams {
  double sigma = 2.5;  // k/6 convention for the default k=15
  int kernel_size = 15;
};

struct NoiseParams {
  double sigma_n = 10.0;  // 8-bit units
  std::uint64_t seed = 0;
};

struct EllipseShape {
  Point2d center;
  double semi_major = 0;
  double semi_minor = 0;
  double angle = 0;  // radians, major axis vs +x
};

using Polygon = std::vector<Point2d>;

// k x k Gaussian sampled at integer offsets, normalized to sum 1. Row-major.
std::vector<double> gaussian_kernel(const BlurParams& params);

// Per-channel 2D convolution, reflect-101 borders, rounded half-to-even.
Frame blur(const Frame& frame, const BlurParams& params);

// Seeded iid Gaussian per pixel per channel, rounded then clamped.
Frame add_noise(const Frame& frame, const NoiseParams& params);

// Sunglasses-band ellipse from the eye landmarks.
EllipseShape eyemask_geometry(const LandmarkSet& landmarks);

// Lower-face polygon: jaw points 1..15 followed by nose-bridge point 28.
Polygon facemask_geometry(const LandmarkSet& landmarks);

// Rasterizes the shape (pixel-center test), ORs white into masked pixels.
std::pair<Frame, MaskImage> apply_mask(const Frame& frame, const EllipseShape& shape);
std::pair<Frame, MaskImage> apply_mask(const Frame& frame, const Polygon& shape);

bool point_in_ellipse(const EllipseShape& e, double x, double y);
bool point_in_polygon(const Polygon& poly, double x, double y);

}  // namespace pulsebench
