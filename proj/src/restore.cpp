#include "pulsebench/restore.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

namespace pulsebench {

namespace {

int reflect101(int i, int n) {
  if (n == 1) return 0;
  while (i < 0 || i >= n) {
    if (i < 0) i = -i;
    if (i >= n) i = 2 * (n - 1) - i;
  }
  return i;
}

constexpr double kInf = 1e6;
enum : std::uint8_t { kKnown = 0, kBand = 1, kInside = 2 };

}  // namespace

Frame nlm_denoise(const Frame& frame, const NlmParams& params) {
  if (params.h <= 0) throw Error("nlm h must be positive");
  if (params.patch_radius < 1) throw Error("patch_radius must be >= 1");
  if (params.search_radius < params.patch_radius)
    throw Error("search_radius must be >= patch_radius");

  const int W = frame.width, H = frame.height;
  const int P = params.patch_radius, S = params.search_radius;
  const int R = S + P;
  const int PW = W + 2 * R, PH = H + 2 * R;

  // reflect-101 padded image, channel-summed diff working array.
  std::vector<double> pad(static_cast<std::size_t>(PW) * PH * 3);
  for (int y = 0; y < PH; ++y) {
    const int sy = reflect101(y - R, H);
    for (int x = 0; x < PW; ++x) {
      const int sx = reflect101(x - R, W);
      for (int c = 0; c < 3; ++c)
        pad[(static_cast<std::size_t>(y) * PW + x) * 3 + c] = frame.at(sx, sy, c);
    }
  }

  const std::size_t npix = static_cast<std::size_t>(W) * H;
  std::vector<double> wsum(npix, 1.0);  // self weight
  std::vector<double> acc(npix * 3);
  for (int y = 0; y < H; ++y)
    for (int x = 0; x < W; ++x)
      for (int c = 0; c < 3; ++c)
        acc[(static_cast<std::size_t>(y) * W + x) * 3 + c] = frame.at(x, y, c);

  std::vector<double> diff(static_cast<std::size_t>(PW) * PH);
  std::vector<double> integral(static_cast<std::size_t>(PW + 1) * (PH + 1));
  const double patch_elems = 3.0 * (2 * P + 1) * (2 * P + 1);
  const double offset2 = 2.0 * params.sigma_hat * params.sigma_hat;
  const double inv_h2 = 1.0 / (params.h * params.h);

  auto rect_sum = [&](int cy, int cx) {
    const int y0 = cy - P, y1 = cy + P + 1, x0 = cx - P, x1 = cx + P + 1;
    return integral[static_cast<std::size_t>(y1) * (PW + 1) + x1] -
           integral[static_cast<std::size_t>(y0) * (PW + 1) + x1] -
           integral[static_cast<std::size_t>(y1) * (PW + 1) + x0] +
           integral[static_cast<std::size_t>(y0) * (PW + 1) + x0];
  };

  // Half-space of offsets; each center accumulates both +offset and -offset.
  for (int dy = 0; dy <= S; ++dy) {
    const int dx_begin = (dy == 0) ? 1 : -S;
    for (int dx = dx_begin; dx <= S; ++dx) {
      std::fill(diff.begin(), diff.end(), 0.0);
      const int px0 = std::max(0, -dx), px1 = PW - std::max(0, dx);
      for (int py = 0; py < PH - dy; ++py)
        for (int px = px0; px < px1; ++px) {
          const double* a = &pad[(static_cast<std::size_t>(py) * PW + px) * 3];
          const double* b =
              &pad[(static_cast<std::size_t>(py + dy) * PW + px + dx) * 3];
          const double d0 = a[0] - b[0], d1 = a[1] - b[1], d2 = a[2] - b[2];
          diff[static_cast<std::size_t>(py) * PW + px] = d0 * d0 + d1 * d1 + d2 * d2;
        }
      for (int py = 0; py < PH; ++py) {
        double row = 0;
        for (int px = 0; px < PW; ++px) {
          row += diff[static_cast<std::size_t>(py) * PW + px];
          integral[static_cast<std::size_t>(py + 1) * (PW + 1) + px + 1] =
              integral[static_cast<std::size_t>(py) * (PW + 1) + px + 1] + row;
        }
      }
      for (int y = 0; y < H; ++y)
        for (int x = 0; x < W; ++x) {
          const std::size_t i = static_cast<std::size_t>(y) * W + x;
          const int cy = y + R, cx = x + R;
          // pair (center, center + offset)
          double d2m = rect_sum(cy, cx) / patch_elems;
          double w = std::exp(-std::max(d2m - offset2, 0.0) * inv_h2);
          const double* vj =
              &pad[(static_cast<std::size_t>(cy + dy) * PW + cx + dx) * 3];
          wsum[i] += w;
          acc[i * 3 + 0] += w * vj[0];
          acc[i * 3 + 1] += w * vj[1];
          acc[i * 3 + 2] += w * vj[2];
          // pair (center - offset, center)
          d2m = rect_sum(cy - dy, cx - dx) / patch_elems;
          w = std::exp(-std::max(d2m - offset2, 0.0) * inv_h2);
          const double* vq =
              &pad[(static_cast<std::size_t>(cy - dy) * PW + cx - dx) * 3];
          wsum[i] += w;
          acc[i * 3 + 0] += w * vq[0];
          acc[i * 3 + 1] += w * vq[1];
          acc[i * 3 + 2] += w * vq[2];
        }
    }
  }

  Frame out(W, H);
  for (std::size_t i = 0; i < npix; ++i)
    for (int c = 0; c < 3; ++c)
      out.pixels[i * 3 + c] = round_u8(acc[i * 3 + c] / wsum[i]);
  return out;
}

MaskImage infer_mask_from_white(const Frame& frame) {
  MaskImage mask(frame.width, frame.height);
  for (int y = 0; y < frame.height; ++y)
    for (int x = 0; x < frame.width; ++x)
      mask.set(x, y, frame.at(x, y, 0) == 255 && frame.at(x, y, 1) == 255 &&
                         frame.at(x, y, 2) == 255);
  return mask;
}

Frame fmm_inpaint(const Frame& frame, const MaskImage& mask, const FmmParams& params,
                  std::vector<std::pair<double, int>>* march_trace) {
  if (mask.width != frame.width || mask.height != frame.height)
    throw DimensionMismatch("fmm_inpaint: mask size differs from frame");
  if (params.epsilon < 1) throw Error("epsilon must be >= 1");
  const int W = frame.width, H = frame.height;
  const std::size_t npix = static_cast<std::size_t>(W) * H;

  std::vector<std::uint8_t> flags(npix, kKnown);
  std::vector<std::uint8_t> usable(npix, 1);
  std::vector<double> T(npix, 0.0);
  std::size_t masked = 0;
  for (std::size_t i = 0; i < npix; ++i)
    if (mask.bits[i]) {
      flags[i] = kInside;
      usable[i] = 0;
      T[i] = kInf;
      ++masked;
    }
  if (masked == npix) throw AllMasked("no unmasked boundary data");
  if (masked == 0) return frame;

  std::vector<double> work(npix * 3);
  for (std::size_t i = 0; i < npix * 3; ++i) work[i] = frame.pixels[i];

  const int dx4[4] = {1, -1, 0, 0};
  const int dy4[4] = {0, 0, 1, -1};
  using Entry = std::pair<double, int>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> heap;

  // Initial band: unmasked pixels touching the mask.
  for (int y = 0; y < H; ++y)
    for (int x = 0; x < W; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * W + x;
      if (flags[i] != kKnown) continue;
      bool boundary = false;
      for (int k = 0; k < 4 && !boundary; ++k) {
        int nx = x + dx4[k], ny = y + dy4[k];
        if (nx >= 0 && nx < W && ny >= 0 && ny < H &&
            flags[static_cast<std::size_t>(ny) * W + nx] == kInside)
          boundary = true;
      }
      if (boundary) {
        flags[i] = kBand;
        heap.emplace(0.0, static_cast<int>(i));
      }
    }

  auto solve_t = [&](int x, int y) {
    auto axis_min = [&](int ax, int ay, int bx, int by) {
      double m = kInf;
      if (ax >= 0 && ax < W && ay >= 0 && ay < H) {
        std::size_t j = static_cast<std::size_t>(ay) * W + ax;
        if (flags[j] == kKnown) m = T[j];
      }
      if (bx >= 0 && bx < W && by >= 0 && by < H) {
        std::size_t j = static_cast<std::size_t>(by) * W + bx;
        if (flags[j] == kKnown) m = std::min(m, T[j]);
      }
      return m;
    };
    const double a = axis_min(x - 1, y, x + 1, y);
    const double b = axis_min(x, y - 1, x, y + 1);
    if (a >= kInf && b >= kInf) return kInf;
    if (a >= kInf) return b + 1.0;
    if (b >= kInf) return a + 1.0;
    if (std::abs(a - b) >= 1.0) return std::min(a, b) + 1.0;
    return (a + b + std::sqrt(2.0 - (a - b) * (a - b))) / 2.0;
  };

  auto t_at = [&](int x, int y) {
    if (x < 0 || x >= W || y < 0 || y >= H) return kInf;
    const std::size_t j = static_cast<std::size_t>(y) * W + x;
    return (flags[j] == kInside) ? kInf : T[j];
  };

  const int eps_i = static_cast<int>(std::floor(params.epsilon));
  const double eps2 = params.epsilon * params.epsilon;

  auto inpaint_pixel = [&](int x, int y) {
    const std::size_t p = static_cast<std::size_t>(y) * W + x;
    // March direction from the arrival-time gradient.
    double gtx = 0, gty = 0;
    {
      const double l = t_at(x - 1, y), r = t_at(x + 1, y);
      if (l < kInf && r < kInf) gtx = (r - l) / 2.0;
      else if (r < kInf) gtx = r - T[p];
      else if (l < kInf) gtx = T[p] - l;
      const double u = t_at(x, y - 1), d = t_at(x, y + 1);
      if (u < kInf && d < kInf) gty = (d - u) / 2.0;
      else if (d < kInf) gty = d - T[p];
      else if (u < kInf) gty = T[p] - u;
    }
    double num[3] = {0, 0, 0};
    double den = 0;
    for (int qy = y - eps_i; qy <= y + eps_i; ++qy) {
      if (qy < 0 || qy >= H) continue;
      for (int qx = x - eps_i; qx <= x + eps_i; ++qx) {
        if (qx < 0 || qx >= W) continue;
        const double rx = x - qx, ry = y - qy;
        const double r2 = rx * rx + ry * ry;
        if (r2 == 0.0 || r2 > eps2) continue;
        const std::size_t q = static_cast<std::size_t>(qy) * W + qx;
        if (!usable[q]) continue;
        const double rlen = std::sqrt(r2);
        double dir = std::abs(rx * gtx + ry * gty) / rlen;
        if (dir == 0.0) dir = 1e-6;
        const double dst = 1.0 / r2;
        const double lev = 1.0 / (1.0 + std::abs(T[q] - T[p]));
        const double w = dir * dst * lev;
        for (int c = 0; c < 3; ++c) {
          // central-difference gradient over usable pixels, zero otherwise
          double gx = 0, gy = 0;
          if (qx > 0 && qx < W - 1 && usable[q - 1] && usable[q + 1])
            gx = (work[(q + 1) * 3 + c] - work[(q - 1) * 3 + c]) / 2.0;
          if (qy > 0 && qy < H - 1 && usable[q - W] && usable[q + W])
            gy = (work[(q + W) * 3 + c] - work[(q - W) * 3 + c]) / 2.0;
          num[c] += w * (work[q * 3 + c] + gx * rx + gy * ry);
        }
        den += w;
      }
    }
    if (den > 0)
      for (int c = 0; c < 3; ++c)
        work[p * 3 + c] = std::clamp(num[c] / den, 0.0, 255.0);
    usable[p] = 1;
  };

  while (!heap.empty()) {
    auto [t, idx] = heap.top();
    heap.pop();
    const std::size_t p = static_cast<std::size_t>(idx);
    if (flags[p] == kKnown) continue;
    const int x = idx % W, y = idx / W;
    flags[p] = kKnown;
    if (mask.bits[p]) {
      inpaint_pixel(x, y);
      if (march_trace) march_trace->emplace_back(T[p], idx);
    }
    for (int k = 0; k < 4; ++k) {
      const int nx = x + dx4[k], ny = y + dy4[k];
      if (nx < 0 || nx >= W || ny < 0 || ny >= H) continue;
      const std::size_t nb = static_cast<std::size_t>(ny) * W + nx;
      if (flags[nb] == kKnown) continue;
      const double d = solve_t(nx, ny);
      if (d < T[nb]) {
        T[nb] = d;
        heap.emplace(d, static_cast<int>(nb));
      }
      if (flags[nb] == kInside) flags[nb] = kBand;
    }
  }

  Frame out(W, H);
  for (std::size_t i = 0; i < npix; ++i) {
    if (mask.bits[i])
      for (int c = 0; c < 3; ++c) out.pixels[i * 3 + c] = round_u8(work[i * 3 + c]);
    else
      for (int c = 0; c < 3; ++c) out.pixels[i * 3 + c] = frame.pixels[i * 3 + c];
  }
  return out;
}

}  // namespace pulsebench
