#include "pulsebench/degrade.hpp"

#include <algorithm>
#include <cmath>

#include "pulsebench/rng.hpp"

namespace pulsebench {

namespace {

// reflect-101 index: ... 2 1 | 0 1 2 ... n-1 | n-2 n-3 ...
int reflect101(int i, int n) {
  if (n == 1) return 0;
  while (i < 0 || i >= n) {
    if (i < 0) i = -i;
    if (i >= n) i = 2 * (n - 1) - i;
  }
  return i;
}

double polygon_area2(const Polygon& poly) {
  double a = 0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const auto& p = poly[i];
    const auto& q = poly[(i + 1) % poly.size()];
    a += p.x * q.y - q.x * p.y;
  }
  return a;
}

int orient(const Point2d& a, const Point2d& b, const Point2d& c) {
  double v = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
  return (v > 0) - (v < 0);
}

bool on_segment(const Point2d& a, const Point2d& b, const Point2d& p) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) &&
         std::min(a.y, b.y) <= p.y && p.y <= std::max(a.y, b.y);
}

bool segments_intersect(const Point2d& a, const Point2d& b, const Point2d& c,
                        const Point2d& d) {
  int o1 = orient(a, b, c), o2 = orient(a, b, d);
  int o3 = orient(c, d, a), o4 = orient(c, d, b);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(a, b, c)) return true;
  if (o2 == 0 && on_segment(a, b, d)) return true;
  if (o3 == 0 && on_segment(c, d, a)) return true;
  if (o4 == 0 && on_segment(c, d, b)) return true;
  return false;
}

Point2d mean_of(const LandmarkSet& lm, int first, int last) {
  Point2d m{0, 0};
  for (int i = first; i <= last; ++i) {
    m.x += lm.points[i].x;
    m.y += lm.points[i].y;
  }
  m.x /= (last - first + 1);
  m.y /= (last - first + 1);
  return m;
}

template <typename InsideFn>
std::pair<Frame, MaskImage> rasterize_mask(const Frame& frame, InsideFn inside) {
  Frame out = frame;
  MaskImage mask(frame.width, frame.height);
  for (int y = 0; y < frame.height; ++y)
    for (int x = 0; x < frame.width; ++x)
      if (inside(static_cast<double>(x), static_cast<double>(y))) {
        mask.set(x, y, true);
        for (int c = 0; c < 3; ++c) out.at(x, y, c) |= 0xFF;
      }
  return {std::move(out), std::move(mask)};
}

}  // namespace

std::vector<double> gaussian_kernel(const BlurParams& params) {
  if (params.sigma <= 0) throw Error("blur sigma must be positive");
  if (params.kernel_size < 1 || params.kernel_size % 2 == 0)
    throw Error("kernel_size must be odd and >= 1");
  const int k = params.kernel_size;
  const int r = k / 2;
  std::vector<double> kern(static_cast<std::size_t>(k) * k);
  double sum = 0;
  for (int y = -r; y <= r; ++y)
    for (int x = -r; x <= r; ++x) {
      double v = std::exp(-(x * x + y * y) / (2.0 * params.sigma * params.sigma));
      kern[(y + r) * k + (x + r)] = v;
      sum += v;
    }
  for (double& v : kern) v /= sum;
  return kern;
}

Frame blur(const Frame& frame, const BlurParams& params) {
  const std::vector<double> kern = gaussian_kernel(params);
  const int k = params.kernel_size;
  const int r = k / 2;
  Frame out(frame.width, frame.height);
  for (int y = 0; y < frame.height; ++y)
    for (int x = 0; x < frame.width; ++x)
      for (int c = 0; c < 3; ++c) {
        double acc = 0;
        for (int dy = -r; dy <= r; ++dy) {
          int sy = reflect101(y + dy, frame.height);
          for (int dx = -r; dx <= r; ++dx) {
            int sx = reflect101(x + dx, frame.width);
            acc += kern[(dy + r) * k + (dx + r)] * frame.at(sx, sy, c);
          }
        }
        out.at(x, y, c) = round_u8(acc);
      }
  return out;
}

Frame add_noise(const Frame& frame, const NoiseParams& params) {
  if (params.sigma_n < 0) throw Error("noise sigma must be >= 0");
  if (params.sigma_n == 0) return frame;
  GaussianSampler rng(params.seed);
  Frame out(frame.width, frame.height);
  for (std::size_t i = 0; i < frame.pixels.size(); ++i)
    out.pixels[i] = round_u8(frame.pixels[i] + params.sigma_n * rng.next());
  return out;
}

EllipseShape eyemask_geometry(const LandmarkSet& lm) {
  const Point2d right = mean_of(lm, 36, 41);
  const Point2d left = mean_of(lm, 42, 47);
  const double dx = left.x - right.x, dy = left.y - right.y;
  if (dx == 0 && dy == 0) throw DegenerateGeometry("eye centers coincide");
  EllipseShape e;
  e.center = {(right.x + left.x) / 2.0, (right.y + left.y) / 2.0};
  e.angle = std::atan2(dy, dx);
  const auto& outer_r = lm.points[36];
  const auto& outer_l = lm.points[45];
  e.semi_major = 0.5 * std::hypot(outer_l.x - outer_r.x, outer_l.y - outer_r.y) * 1.25;
  Point2d brow_mid{(lm.points[19].x + lm.points[24].x) / 2.0,
                   (lm.points[19].y + lm.points[24].y) / 2.0};
  const auto& bridge = lm.points[28];
  e.semi_minor = std::hypot(brow_mid.x - bridge.x, brow_mid.y - bridge.y) * 0.5;
  if (e.semi_major <= 0 || e.semi_minor <= 0)
    throw DegenerateGeometry("degenerate eyemask axes");
  return e;
}

Polygon facemask_geometry(const LandmarkSet& lm) {
  Polygon poly;
  poly.reserve(16);
  for (int i = 1; i <= 15; ++i) poly.push_back(lm.points[i]);
  poly.push_back(lm.points[28]);

  if (std::abs(polygon_area2(poly)) < 1e-9)
    throw SelfIntersectingPolygon("facemask polygon has zero area");
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      // skip edges sharing a vertex
      if (j == i || (j + 1) % n == i || (i + 1) % n == j) continue;
      if (segments_intersect(poly[i], poly[(i + 1) % n], poly[j], poly[(j + 1) % n]))
        throw SelfIntersectingPolygon("facemask polygon self-intersects");
    }
  return poly;
}

bool point_in_ellipse(const EllipseShape& e, double x, double y) {
  const double c = std::cos(e.angle), s = std::sin(e.angle);
  const double rx = (x - e.center.x) * c + (y - e.center.y) * s;
  const double ry = -(x - e.center.x) * s + (y - e.center.y) * c;
  const double u = rx / e.semi_major, v = ry / e.semi_minor;
  return u * u + v * v <= 1.0;
}

bool point_in_polygon(const Polygon& poly, double x, double y) {
  bool inside = false;
  const std::size_t n = poly.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    if ((poly[i].y > y) != (poly[j].y > y)) {
      double xi = poly[j].x + (y - poly[j].y) / (poly[i].y - poly[j].y) *
                                  (poly[i].x - poly[j].x);
      if (x < xi) inside = !inside;
    }
  }
  return inside;
}

std::pair<Frame, MaskImage> apply_mask(const Frame& frame, const EllipseShape& shape) {
  return rasterize_mask(frame, [&](double x, double y) {
    return point_in_ellipse(shape, x, y);
  });
}

std::pair<Frame, MaskImage> apply_mask(const Frame& frame, const Polygon& shape) {
  return rasterize_mask(frame, [&](double x, double y) {
    return point_in_polygon(shape, x, y);
  });
}

}  // namespace pulsebench
