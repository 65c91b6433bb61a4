#ifndef PERMLEARN_DATASETS_HPP
#define PERMLEARN_DATASETS_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "permlearn/errors.hpp"
#include "permlearn/image.hpp"
#include "permlearn/image_set.hpp"
#include "permlearn/rng.hpp"

namespace permlearn {

struct Point {
  std::int64_t x = 0;
  std::int64_t y = 0;
};

/// Triangle with integer vertices in [0, L).
struct TriangleSpec {
  std::array<Point, 3> vertices;

  bool in_range(std::size_t side) const noexcept {
    for (const auto& p : vertices) {
      if (p.x < 0 || p.y < 0 || p.x >= std::int64_t(side) || p.y >= std::int64_t(side)) return false;
    }
    return true;
  }

  /// Twice the signed shoelace area.
  std::int64_t doubled_area() const noexcept {
    const auto& [a, b, c] = vertices;
    return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
  }

  double area() const noexcept { return std::abs(double(doubled_area())) / 2.0; }

  double perimeter() const noexcept {
    double p = 0.0;
    for (int k = 0; k < 3; ++k) {
      const auto& a = vertices[k];
      const auto& b = vertices[(k + 1) % 3];
      p += std::hypot(double(b.x - a.x), double(b.y - a.y));
    }
    return p;
  }
};

inline TriangleSpec random_triangle(std::size_t side, Rng& rng) {
  TriangleSpec t;
  for (auto& p : t.vertices) {
    p.x = std::int64_t(rng.below(side));
    p.y = std::int64_t(rng.below(side));
  }
  return t;
}

/// White triangle on black. A pixel is white iff its center lies inside or
/// on the boundary; centers are compared at doubled scale so every predicate
/// is exact integer arithmetic. Collinear vertices give an empty image.
inline BitImage rasterize(const TriangleSpec& tri, std::size_t side) {
  detail::require(tri.in_range(side), "rasterize: vertex out of range");
  BitImage img(side);
  const std::int64_t area2 = tri.doubled_area();
  if (area2 == 0) return img;
  std::array<Point, 3> v = tri.vertices;
  if (area2 < 0) std::swap(v[1], v[2]);
  for (auto& p : v) {
    p.x *= 2;
    p.y *= 2;
  }
  auto edge = [](const Point& a, const Point& b, std::int64_t px, std::int64_t py) {
    return (b.x - a.x) * (py - a.y) - (b.y - a.y) * (px - a.x);
  };
  std::int64_t lo_x = std::min({v[0].x, v[1].x, v[2].x}) / 2, hi_x = std::max({v[0].x, v[1].x, v[2].x}) / 2;
  std::int64_t lo_y = std::min({v[0].y, v[1].y, v[2].y}) / 2, hi_y = std::max({v[0].y, v[1].y, v[2].y}) / 2;
  for (std::int64_t y = lo_y; y <= hi_y && y < std::int64_t(side); ++y) {
    for (std::int64_t x = lo_x; x <= hi_x && x < std::int64_t(side); ++x) {
      const std::int64_t cx = 2 * x + 1, cy = 2 * y + 1;
      if (edge(v[0], v[1], cx, cy) >= 0 && edge(v[1], v[2], cx, cy) >= 0 && edge(v[2], v[0], cx, cy) >= 0) {
        img.set(std::size_t(x), std::size_t(y));
      }
    }
  }
  return img;
}

struct TriangleStats {
  std::size_t accepted = 0;
  std::size_t attempts = 0;
  double acceptance_rate() const noexcept { return attempts ? double(accepted) / double(attempts) : 0.0; }
};

/// Rejection-samples uniformly random triangles until `count` pass the
/// minority filter. Throws data_error once attempts exceed
/// `max_attempts_per_image * count` plus a fixed allowance.
inline ImageSet generate_triangles(std::size_t side, std::size_t count, double min_minority, Rng& rng,
                                   TriangleStats* stats = nullptr, std::size_t max_attempts_per_image = 1000) {
  detail::require(count >= 1, "generate_triangles: count must be at least 1");
  detail::require(side >= 1, "generate_triangles: side must be at least 1");
  detail::require(min_minority >= 0.0 && min_minority < 0.5, "generate_triangles: min_minority must lie in [0, 0.5)");
  ImageSet set(side, min_minority);
  const std::size_t budget = max_attempts_per_image * count + 10000;
  TriangleStats local;
  while (set.size() < count) {
    if (local.attempts >= budget) {
      throw data_error("generate_triangles: acceptance rate too low for the minority filter");
    }
    ++local.attempts;
    BitImage img = rasterize(random_triangle(side, rng), side);
    if (img.minority_fraction() >= min_minority) set.add(std::move(img));
  }
  local.accepted = set.size();
  if (stats) *stats = local;
  return set;
}

struct Binarization {
  BinaryRaster raster;
  double dark_mean = 0.0;
  double bright_mean = 0.0;
  double threshold = 0.0;  // pixels strictly above are white
  std::size_t iterations = 0;
};

/// Two-cluster Lloyd iteration on the intensity histogram, seeded at the
/// minimum and maximum intensity. Pixels in the brighter cluster are white.
/// A constant image maps to all black.
inline Binarization binarize(const GrayImage& img) {
  detail::require(!img.values.empty(), "binarize: empty image");
  std::array<std::size_t, 256> hist{};
  for (auto v : img.values) ++hist[v];
  int lo_v = 0, hi_v = 255;
  while (hist[std::size_t(lo_v)] == 0) ++lo_v;
  while (hist[std::size_t(hi_v)] == 0) --hi_v;

  Binarization out;
  out.raster = BinaryRaster(img.width, img.height);
  if (lo_v == hi_v) {
    out.dark_mean = out.bright_mean = out.threshold = lo_v;
    return out;
  }
  double dark = lo_v, bright = hi_v;
  // Last intensity assigned to the dark cluster; values > split are bright.
  int split = -1;
  for (;;) {
    ++out.iterations;
    const double mid = (dark + bright) / 2.0;
    // Ties at the midpoint go dark.
    int new_split = int(std::floor(mid));
    new_split = std::clamp(new_split, lo_v, hi_v - 1);
    if (new_split == split) break;
    split = new_split;
    double sum_d = 0, sum_b = 0;
    std::size_t n_d = 0, n_b = 0;
    for (int v = lo_v; v <= hi_v; ++v) {
      const auto c = hist[std::size_t(v)];
      if (v <= split) {
        sum_d += double(v) * double(c);
        n_d += c;
      } else {
        sum_b += double(v) * double(c);
        n_b += c;
      }
    }
    dark = sum_d / double(n_d);
    bright = sum_b / double(n_b);
  }
  out.dark_mean = dark;
  out.bright_mean = bright;
  out.threshold = (dark + bright) / 2.0;
  for (std::size_t i = 0; i < img.values.size(); ++i) {
    if (img.values[i] > split) out.raster.bits.set(i);
  }
  return out;
}

struct Patch {
  BitImage image;
  std::size_t u = 0;  // left column in the source
  std::size_t v = 0;  // top row in the source
  double minority_fraction = 0.0;
};

/// Non-overlapping side×side tiles on a grid anchored at (0, 0); partial
/// tiles are discarded and survivors must pass the minority filter.
inline std::vector<Patch> extract_patches(const BinaryRaster& img, std::size_t side, double min_minority) {
  detail::require(side >= 1, "extract_patches: side must be at least 1");
  std::vector<Patch> out;
  for (std::size_t v0 = 0; v0 + side <= img.height; v0 += side) {
    for (std::size_t u0 = 0; u0 + side <= img.width; u0 += side) {
      BitImage patch(side);
      for (std::size_t v = 0; v < side; ++v)
        for (std::size_t u = 0; u < side; ++u)
          if (img.at(u0 + u, v0 + v)) patch.set(u, v);
      const double f = patch.minority_fraction();
      if (f >= min_minority) out.push_back(Patch{std::move(patch), u0, v0, f});
    }
  }
  return out;
}

}  // namespace permlearn

#endif  // PERMLEARN_DATASETS_HPP
