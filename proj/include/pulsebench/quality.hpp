#pragma once

#include <vector>

#include "pulsebench/types.hpp"

namespace pulsebench {

struct TooSmall : Error { using Error::Error; };
struct LengthMismatch : Error { using Error::Error; };
struct NonPositiveReference : Error { using Error::Error; };

struct QualityScore {
  double psnr_db = 0;  // +inf for identical images
  double ssim = 0;
};

struct ErrorReport {
  double mae = 0;   // BPM
  double rmse = 0;  // BPM
  double mape = 0;  // percent
  std::size_t n = 0;
};

// 10*log10(255^2 / MSE) over all channels; +inf when identical.
double psnr(const Frame& reference, const Frame& test);

// Single-scale SSIM on luminance (0.299R + 0.587G + 0.114B): 11x11 Gaussian
// window sigma=1.5, K1=0.01, K2=0.03, L=255, mean over valid positions.
double ssim(const Frame& reference, const Frame& test);

ErrorReport hr_errors(const std::vector<double>& predicted,
                      const std::vector<double>& reference);

}  // namespace pulsebench
