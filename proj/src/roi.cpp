#include "pulsebench/roi.hpp"

#include <algorithm>
#include <cmath>

namespace pulsebench {

namespace {

FaceBox clamp_to_frame(double cx, double cy, double side, int fw, int fh) {
  side = std::min({side, static_cast<double>(fw), static_cast<double>(fh)});
  FaceBox box;
  box.side = side;
  box.x0 = std::clamp(cx - side / 2.0, 0.0, fw - side);
  box.y0 = std::clamp(cy - side / 2.0, 0.0, fh - side);
  return box;
}

}  // namespace

FaceBox adjust_box(const RectD& /*raw_box*/, const LandmarkSet& landmarks,
                   int frame_width, int frame_height, double margin) {
  double cx = 0, cy = 0;
  for (const auto& p : landmarks.points) {
    cx += p.x;
    cy += p.y;
  }
  cx /= 68.0;
  cy /= 68.0;
  double ext = 0.0;
  for (const auto& p : landmarks.points)
    ext = std::max(ext, std::max(std::abs(p.x - cx), std::abs(p.y - cy)));
  if (ext == 0.0)
    throw DegenerateLandmarks("all landmark points coincide");
  return clamp_to_frame(cx, cy, 2.0 * ext * margin, frame_width, frame_height);
}

FaceBox square_from_rect(const RectD& raw_box, int frame_width, int frame_height) {
  if (raw_box.w < 1 || raw_box.h < 1) throw Error("degenerate detector box");
  return clamp_to_frame(raw_box.x0 + raw_box.w / 2.0, raw_box.y0 + raw_box.h / 2.0,
                        std::max(raw_box.w, raw_box.h), frame_width, frame_height);
}

Frame crop_resize(const Frame& frame, const FaceBox& box, int out_side) {
  if (out_side < 1) throw Error("out_side must be >= 1");
  const double eps = 1e-9;
  if (box.side < 1.0 || box.x0 < -eps || box.y0 < -eps ||
      box.x0 + box.side > frame.width + eps || box.y0 + box.side > frame.height + eps)
    throw BoxOutOfBounds("face box does not lie inside the frame");

  Frame out(out_side, out_side);
  const double scale = box.side / out_side;
  for (int oy = 0; oy < out_side; ++oy) {
    double sy = box.y0 + (oy + 0.5) * scale - 0.5;
    sy = std::clamp(sy, 0.0, frame.height - 1.0);
    int y0 = static_cast<int>(std::floor(sy));
    int y1 = std::min(y0 + 1, frame.height - 1);
    double fy = sy - y0;
    for (int ox = 0; ox < out_side; ++ox) {
      double sx = box.x0 + (ox + 0.5) * scale - 0.5;
      sx = std::clamp(sx, 0.0, frame.width - 1.0);
      int x0 = static_cast<int>(std::floor(sx));
      int x1 = std::min(x0 + 1, frame.width - 1);
      double fx = sx - x0;
      for (int c = 0; c < 3; ++c) {
        double v = (1 - fy) * ((1 - fx) * frame.at(x0, y0, c) + fx * frame.at(x1, y0, c)) +
                   fy * ((1 - fx) * frame.at(x0, y1, c) + fx * frame.at(x1, y1, c));
        out.at(ox, oy, c) = round_u8(v);
      }
    }
  }
  return out;
}

}  // namespace pulsebench
