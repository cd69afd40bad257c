#pragma once

#include <utility>
#include <vector>

#include "pulsebench/types.hpp"

namespace pulsebench {

struct AllMasked : Error { using Error::Error; };

struct NlmParams {
  double h = 10.0;        // filtering strength
  int patch_radius = 3;   // 7x7 patches
  int search_radius = 10; // 21x21 search window
  double sigma_hat = 0.0; // noise std estimate for the 2*sigma^2 offset
};

struct FmmParams {
  double epsilon = 5.0;  // B_eps neighborhood radius, pixels
};

// Windowed non-local means on joint-RGB patch vectors with
// w(i,j) = exp(-max(d2 - 2*sigma_hat^2, 0) / h^2), d2 the per-element mean
// squared patch difference. Borders use reflect-101 padding.
Frame nlm_denoise(const Frame& frame, const NlmParams& params);

// Mask true exactly where a pixel is pure white (255,255,255).
MaskImage infer_mask_from_white(const Frame& frame);

// Fast-marching inpainting: pixels filled in ascending arrival-time order
// from the mask boundary inward, each as a weighted first-order extrapolation
// of known neighbors within B_eps. Heap ties break on row-major index.
// When `march_trace` is given, (T, row-major index) is recorded per inpainted
// pixel in processing order.
Frame fmm_inpaint(const Frame& frame, const MaskImage& mask, const FmmParams& params,
                  std::vector<std::pair<double, int>>* march_trace = nullptr);

}  // namespace pulsebench
