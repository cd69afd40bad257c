#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "approx.hpp"
#include "doctest.h"
#include "pulsebench/degrade.hpp"
#include "pulsebench/synth.hpp"

using namespace pulsebench;

namespace {

// Independent high-precision evaluation of the sampled-and-normalized kernel.
std::vector<double> kernel_oracle(int k, double sigma) {
  const int r = k / 2;
  std::vector<double> w(static_cast<std::size_t>(k) * k);
  long double sum = 0;
  for (int y = -r; y <= r; ++y)
    for (int x = -r; x <= r; ++x) {
      const long double v = std::exp(-(static_cast<long double>(x) * x + y * y) /
                                     (2.0L * sigma * sigma));
      w[(y + r) * k + (x + r)] = static_cast<double>(v);
      sum += v;
    }
  for (auto& v : w) v = static_cast<double>(v / sum);
  return w;
}

}  // namespace

TEST_CASE("gaussian kernel basics") {
  CHECK(gaussian_kernel({1.0, 1}) == std::vector<double>{1.0});

  auto flat = gaussian_kernel({1000.0, 3});
  for (double v : flat) CHECK(v == Near{1.0 / 9, 1e-6});

  auto k31 = gaussian_kernel({1.0, 3});
  auto oracle = kernel_oracle(3, 1.0);
  for (int i = 0; i < 9; ++i)
    CHECK(k31[i] == doctest::Approx(oracle[i]).epsilon(1e-12));
  CHECK(k31[4] == doctest::Approx(0.204179955572).epsilon(1e-9));
  CHECK(k31[1] == doctest::Approx(0.123841403153).epsilon(1e-9));
  CHECK(k31[0] == doctest::Approx(0.075113607954).epsilon(1e-9));
}

TEST_CASE("gaussian kernel sums to one and is symmetric") {
  for (auto [sigma, k] : {std::pair{2.5, 15}, {1.0, 7}, {0.8, 5}}) {
    auto w = gaussian_kernel({sigma, k});
    double sum = 0;
    for (double v : w) sum += v;
    CHECK(sum == Near{1.0, 1e-12});
    for (int y = 0; y < k; ++y)
      for (int x = 0; x < k; ++x) {
        CHECK(w[y * k + x] == w[y * k + (k - 1 - x)]);
        CHECK(w[y * k + x] == w[(k - 1 - y) * k + x]);
      }
  }
}

TEST_CASE("blur leaves a constant frame unchanged") {
  Frame f(40, 40, 131);
  Frame out = blur(f, {2.5, 15});
  CHECK(out.pixels == f.pixels);
}

TEST_CASE("blur impulse response reproduces the kernel") {
  Frame f(41, 41, 0);
  for (int c = 0; c < 3; ++c) f.at(20, 20, c) = 255;
  BlurParams params{3.0, 15};
  Frame out = blur(f, params);
  auto w = gaussian_kernel(params);
  for (int y = 0; y < 41; ++y)
    for (int x = 0; x < 41; ++x) {
      const int kx = x - 20 + 7, ky = y - 20 + 7;
      const double expect =
          (kx >= 0 && kx < 15 && ky >= 0 && ky < 15) ? 255.0 * w[ky * 15 + kx] : 0.0;
      CHECK(static_cast<double>(out.at(x, y, 1)) ==
            Near{expect, 0.51});
    }
}

TEST_CASE("blur output stays within input range per channel") {
  Frame f(30, 30);
  std::mt19937_64 eng(77);
  for (auto& p : f.pixels) p = static_cast<std::uint8_t>(eng() % 200 + 20);
  Frame out = blur(f, {2.5, 15});
  for (int c = 0; c < 3; ++c) {
    int lo = 255, hi = 0, olo = 255, ohi = 0;
    for (int y = 0; y < 30; ++y)
      for (int x = 0; x < 30; ++x) {
        lo = std::min(lo, static_cast<int>(f.at(x, y, c)));
        hi = std::max(hi, static_cast<int>(f.at(x, y, c)));
        olo = std::min(olo, static_cast<int>(out.at(x, y, c)));
        ohi = std::max(ohi, static_cast<int>(out.at(x, y, c)));
      }
    CHECK(olo >= lo);
    CHECK(ohi <= hi);
  }
}

TEST_CASE("add_noise: sigma zero is identity, seeding is deterministic") {
  Frame f(16, 16, 90);
  CHECK(add_noise(f, {0.0, 42}).pixels == f.pixels);
  Frame a = add_noise(f, {10.0, 42});
  Frame b = add_noise(f, {10.0, 42});
  Frame c = add_noise(f, {10.0, 43});
  CHECK(a.pixels == b.pixels);
  CHECK(a.pixels != c.pixels);
}

TEST_CASE("add_noise statistics over 15552 draws") {
  Frame f(72, 72, 128);
  Frame out = add_noise(f, {10.0, 9});
  double sum = 0, sq = 0;
  const std::size_t n = out.pixels.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double d = static_cast<double>(out.pixels[i]) - 128.0;
    sum += d;
    sq += d * d;
  }
  const double mean = sum / n;
  const double stddev = std::sqrt(sq / n - mean * mean);
  CHECK(std::abs(mean) < 0.5);
  CHECK(std::abs(stddev - 10.0) < 0.5);
}

TEST_CASE("eyemask geometry on a symmetric synthetic face") {
  LandmarkSet lm = canonical_landmarks(72);
  // Overwrite the eye rings with hexagons centered at (25,30) and (47,30).
  for (int i = 0; i < 6; ++i) {
    const double a = i * M_PI / 3;
    lm.points[36 + i] = {25 + 3 * std::cos(a), 30 + 1.5 * std::sin(a)};
    lm.points[42 + i] = {47 + 3 * std::cos(a), 30 + 1.5 * std::sin(a)};
  }
  EllipseShape e = eyemask_geometry(lm);
  CHECK(e.center.x == doctest::Approx(36.0).epsilon(1e-9));
  CHECK(e.center.y == doctest::Approx(30.0).epsilon(1e-9));
  CHECK(std::abs(std::remainder(e.angle, M_PI)) < 1e-9);
}

TEST_CASE("eyemask geometry is rotation equivariant") {
  LandmarkSet lm = canonical_landmarks(72);
  EllipseShape base = eyemask_geometry(lm);
  const double th = M_PI / 6, cx = 36, cy = 36;
  LandmarkSet rot = lm;
  for (auto& p : rot.points) {
    const double dx = p.x - cx, dy = p.y - cy;
    p = {cx + dx * std::cos(th) - dy * std::sin(th),
         cy + dx * std::sin(th) + dy * std::cos(th)};
  }
  EllipseShape r = eyemask_geometry(rot);
  CHECK(r.semi_major == Near{base.semi_major, 1e-9});
  CHECK(r.semi_minor == Near{base.semi_minor, 1e-9});
  const double dx = base.center.x - cx, dy = base.center.y - cy;
  CHECK(r.center.x ==
        Near{cx + dx * std::cos(th) - dy * std::sin(th), 1e-9});
  CHECK(r.center.y ==
        Near{cy + dx * std::sin(th) + dy * std::cos(th), 1e-9});
  CHECK(std::abs(std::remainder(r.angle - base.angle - th, M_PI)) < 1e-9);
}

TEST_CASE("coincident eye centers rejected") {
  LandmarkSet lm = canonical_landmarks(72);
  for (int i = 42; i < 48; ++i) lm.points[i] = lm.points[i - 6];
  CHECK_THROWS_AS(eyemask_geometry(lm), DegenerateGeometry);
}

TEST_CASE("facemask polygon: shape, translation equivariance, degeneracy") {
  LandmarkSet lm = canonical_landmarks(72);
  Polygon poly = facemask_geometry(lm);
  REQUIRE(poly.size() == 16);
  for (int i = 0; i < 15; ++i) {
    CHECK(poly[i].x == lm.points[1 + i].x);
    CHECK(poly[i].y == lm.points[1 + i].y);
  }
  CHECK(poly[15].x == lm.points[28].x);

  LandmarkSet moved = lm;
  for (auto& p : moved.points) { p.x += 5; p.y -= 3; }
  Polygon poly2 = facemask_geometry(moved);
  for (int i = 0; i < 16; ++i) {
    CHECK(poly2[i].x == doctest::Approx(poly[i].x + 5).epsilon(1e-12));
    CHECK(poly2[i].y == doctest::Approx(poly[i].y - 3).epsilon(1e-12));
  }

  LandmarkSet flat = lm;
  for (int i = 1; i <= 15; ++i) flat.points[i] = {10.0 + i, 40.0};
  flat.points[28] = {17.5, 40.0};  // apex on the jaw line: zero area
  CHECK_THROWS_AS(facemask_geometry(flat), Error);
}

TEST_CASE("apply_mask sets exactly the in-shape pixels to white") {
  Frame f(20, 20);
  for (int y = 0; y < 20; ++y)
    for (int x = 0; x < 20; ++x)
      for (int c = 0; c < 3; ++c)
        f.at(x, y, c) = static_cast<std::uint8_t>(x * 10 + c);
  Polygon half{{-1, -1}, {9.5, -1}, {9.5, 21}, {-1, 21}};
  auto [masked, mask] = apply_mask(f, half);
  for (int y = 0; y < 20; ++y)
    for (int x = 0; x < 20; ++x) {
      const bool inside = point_in_polygon(half, x, y);
      CHECK(mask.at(x, y) == inside);
      for (int c = 0; c < 3; ++c)
        CHECK(masked.at(x, y, c) == (inside ? 255 : f.at(x, y, c)));
    }
  CHECK(mask.count() == 200);  // x = 0..9 inclusive
}

TEST_CASE("apply_mask edge cases and idempotence") {
  Frame f(12, 12, 40);
  EllipseShape outside{{100, 100}, 3, 2, 0};
  auto [m1, mask1] = apply_mask(f, outside);
  CHECK(m1.pixels == f.pixels);
  CHECK(mask1.count() == 0);

  EllipseShape full{{5.5, 5.5}, 50, 50, 0};
  auto [m2, mask2] = apply_mask(f, full);
  CHECK(mask2.count() == 144);
  for (auto p : m2.pixels) CHECK(p == 255);

  EllipseShape e{{6, 6}, 4, 2, 0.7};
  auto [once, maskA] = apply_mask(f, e);
  auto [twice, maskB] = apply_mask(once, e);
  CHECK(once.pixels == twice.pixels);
  CHECK(maskA.bits == maskB.bits);
}

TEST_CASE("point_in_ellipse and point_in_polygon basics") {
  EllipseShape e{{10, 10}, 4, 2, 0};
  CHECK(point_in_ellipse(e, 13.9, 10));
  CHECK_FALSE(point_in_ellipse(e, 14.1, 10));
  CHECK(point_in_ellipse(e, 10, 11.9));
  CHECK_FALSE(point_in_ellipse(e, 10, 12.1));

  Polygon square{{0, 0}, {4, 0}, {4, 4}, {0, 4}};
  CHECK(point_in_polygon(square, 2, 2));
  CHECK_FALSE(point_in_polygon(square, 5, 2));
  CHECK_FALSE(point_in_polygon(square, -1, 2));
}
