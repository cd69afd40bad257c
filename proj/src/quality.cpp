#include "pulsebench/quality.hpp"

#include <cmath>
#include <limits>

namespace pulsebench {

double psnr(const Frame& reference, const Frame& test) {
  if (!reference.same_size(test))
    throw DimensionMismatch("psnr: frame sizes differ");
  double mse = 0;
  for (std::size_t i = 0; i < reference.pixels.size(); ++i) {
    double d = static_cast<double>(reference.pixels[i]) - test.pixels[i];
    mse += d * d;
  }
  mse /= static_cast<double>(reference.pixels.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(255.0 * 255.0 / mse);
}

double ssim(const Frame& reference, const Frame& test) {
  if (!reference.same_size(test))
    throw DimensionMismatch("ssim: frame sizes differ");
  const int W = reference.width, H = reference.height;
  constexpr int R = 5;  // 11x11 window
  if (W < 11 || H < 11) throw TooSmall("ssim needs side >= 11");

  // Gaussian window, sigma 1.5, normalized.
  double win[11][11];
  double wsum = 0;
  for (int y = -R; y <= R; ++y)
    for (int x = -R; x <= R; ++x) {
      win[y + R][x + R] = std::exp(-(x * x + y * y) / (2.0 * 1.5 * 1.5));
      wsum += win[y + R][x + R];
    }
  for (auto& row : win)
    for (auto& v : row) v /= wsum;

  auto luma = [](const Frame& f, int x, int y) {
    return 0.299 * f.at(x, y, 0) + 0.587 * f.at(x, y, 1) + 0.114 * f.at(x, y, 2);
  };
  std::vector<double> lx(static_cast<std::size_t>(W) * H), ly(lx.size());
  for (int y = 0; y < H; ++y)
    for (int x = 0; x < W; ++x) {
      lx[static_cast<std::size_t>(y) * W + x] = luma(reference, x, y);
      ly[static_cast<std::size_t>(y) * W + x] = luma(test, x, y);
    }

  constexpr double c1 = (0.01 * 255) * (0.01 * 255);
  constexpr double c2 = (0.03 * 255) * (0.03 * 255);
  double acc = 0;
  std::size_t count = 0;
  for (int cy = R; cy < H - R; ++cy)
    for (int cx = R; cx < W - R; ++cx) {
      double mx = 0, my = 0, sxx = 0, syy = 0, sxy = 0;
      for (int dy = -R; dy <= R; ++dy)
        for (int dx = -R; dx <= R; ++dx) {
          const double w = win[dy + R][dx + R];
          const double a = lx[static_cast<std::size_t>(cy + dy) * W + cx + dx];
          const double b = ly[static_cast<std::size_t>(cy + dy) * W + cx + dx];
          mx += w * a;
          my += w * b;
          sxx += w * a * a;
          syy += w * b * b;
          sxy += w * a * b;
        }
      sxx -= mx * mx;
      syy -= my * my;
      sxy -= mx * my;
      acc += ((2 * mx * my + c1) * (2 * sxy + c2)) /
             ((mx * mx + my * my + c1) * (sxx + syy + c2));
      ++count;
    }
  return acc / static_cast<double>(count);
}

ErrorReport hr_errors(const std::vector<double>& predicted,
                      const std::vector<double>& reference) {
  if (predicted.size() != reference.size())
    throw LengthMismatch("hr_errors: length mismatch");
  if (predicted.empty()) throw LengthMismatch("hr_errors: empty input");
  ErrorReport rep;
  rep.n = predicted.size();
  double se = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    if (reference[i] <= 0)
      throw NonPositiveReference("hr_errors: reference must be positive");
    const double d = predicted[i] - reference[i];
    rep.mae += std::abs(d);
    se += d * d;
    rep.mape += std::abs(d) / reference[i];
  }
  rep.mae /= rep.n;
  rep.rmse = std::sqrt(se / rep.n);
  rep.mape = 100.0 * rep.mape / rep.n;
  return rep;
}

}  // namespace pulsebench
