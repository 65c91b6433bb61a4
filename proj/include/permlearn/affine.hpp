#ifndef PERMLEARN_AFFINE_HPP
#define PERMLEARN_AFFINE_HPP

// Affine summary of a pixel permutation.
//
// Each destination pixel i receives the source pixel t(i); with pixel
// centers xi = source, xi' = destination, fit xi' = A xi + b by Gaussian
// weighted moments: A = C_{xi' xi} C_{xi xi}^{-1}, b = mu_{xi'} - A mu_xi.
// A factors as R(theta) Lambda(lambda) S(s_x, s_y), applied right to left,
// where Lambda is a transvection (shear).

#include <array>
#include <cmath>
#include <cstddef>

#include "permlearn/errors.hpp"
#include "permlearn/permutation.hpp"

namespace permlearn {

using Mat2 = std::array<std::array<double, 2>, 2>;  // [row][col]
using Vec2 = std::array<double, 2>;

/// Which end of each correspondence the Gaussian weight is evaluated on.
enum class Weighting { source, destination, both };

struct AffineFit {
  Mat2 A{{{1, 0}, {0, 1}}};
  Vec2 b{0, 0};
  double s_x = 1, s_y = 1, lambda = 0, theta = 0, det = 1;
  double residual_rms = 0;
};

struct Decomposition {
  double s_x, s_y, lambda, theta;
};

inline double determinant(const Mat2& A) noexcept { return A[0][0] * A[1][1] - A[1][0] * A[0][1]; }

inline Mat2 multiply(const Mat2& X, const Mat2& Y) noexcept {
  Mat2 Z{};
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) Z[r][c] = X[r][0] * Y[0][c] + X[r][1] * Y[1][c];
  return Z;
}

inline Mat2 rotation(double theta) noexcept {
  return Mat2{{{std::cos(theta), -std::sin(theta)}, {std::sin(theta), std::cos(theta)}}};
}

inline Mat2 reassemble(const Decomposition& d) noexcept {
  const Mat2 shear{{{1, d.lambda}, {0, 1}}};
  const Mat2 scale{{{d.s_x, 0}, {0, d.s_y}}};
  return multiply(rotation(d.theta), multiply(shear, scale));
}

/// Throws contract_error when the first column of A is zero.
inline Decomposition decompose(const Mat2& A) {
  const double s_x = std::hypot(A[0][0], A[1][0]);
  if (s_x == 0.0) throw contract_error("decompose: degenerate map, first column is zero");
  const double det = determinant(A);
  const double s_y = det / s_x;
  // s_y == 0 means a singular map; lambda is then undefined and reported as NaN.
  const double lambda = (A[0][0] * A[0][1] + A[1][0] * A[1][1]) / (s_x * s_y);
  return Decomposition{s_x, s_y, lambda, std::atan2(A[1][0], A[0][0])};
}

namespace detail {

inline Vec2 pixel_center(std::size_t index, std::size_t side) noexcept {
  return Vec2{double(index % side) + 0.5, double(index / side) + 0.5};
}

inline double gaussian_weight(const Vec2& p, double center, double sigma) noexcept {
  const double dx = p[0] - center, dy = p[1] - center;
  return std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
}

inline double correspondence_weight(const Vec2& src, const Vec2& dst, double center, double sigma, Weighting w) {
  switch (w) {
    case Weighting::source:
      return gaussian_weight(src, center, sigma);
    case Weighting::destination:
      return gaussian_weight(dst, center, sigma);
    case Weighting::both:
      return gaussian_weight(src, center, sigma) * gaussian_weight(dst, center, sigma);
  }
  return 0.0;
}

}  // namespace detail

/// Gaussian weighted RMS of |A xi + b - xi'| over all correspondences.
inline double residual_rms(const Permutation& t, const AffineFit& fit, std::size_t side, double sigma,
                           Weighting weighting = Weighting::source) {
  detail::require(t.size() == side * side, "residual_rms: permutation size must be side^2");
  detail::require(sigma > 0, "residual_rms: sigma must be positive");
  const double center = double(side) / 2.0;
  double wsum = 0, acc = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const Vec2 src = detail::pixel_center(t[i], side);
    const Vec2 dst = detail::pixel_center(i, side);
    const double w = detail::correspondence_weight(src, dst, center, sigma, weighting);
    const double ex = fit.A[0][0] * src[0] + fit.A[0][1] * src[1] + fit.b[0] - dst[0];
    const double ey = fit.A[1][0] * src[0] + fit.A[1][1] * src[1] + fit.b[1] - dst[1];
    wsum += w;
    acc += w * (ex * ex + ey * ey);
  }
  return wsum > 0 ? std::sqrt(acc / wsum) : 0.0;
}

/// Weighted moment fit of A and b plus the derived parameters and residual.
/// Throws contract_error on size mismatch or sigma <= 0, and
/// std::domain_error if the weighted source covariance is singular.
inline AffineFit fit_affine(const Permutation& t, std::size_t side, double sigma,
                            Weighting weighting = Weighting::source) {
  detail::require(t.size() == side * side, "fit_affine: permutation size must be side^2");
  detail::require(sigma > 0, "fit_affine: sigma must be positive");
  const double center = double(side) / 2.0;

  double W = 0;
  Vec2 mu_s{0, 0}, mu_d{0, 0};
  for (std::size_t i = 0; i < t.size(); ++i) {
    const Vec2 src = detail::pixel_center(t[i], side);
    const Vec2 dst = detail::pixel_center(i, side);
    const double w = detail::correspondence_weight(src, dst, center, sigma, weighting);
    W += w;
    for (int k = 0; k < 2; ++k) {
      mu_s[k] += w * src[k];
      mu_d[k] += w * dst[k];
    }
  }
  if (!(W > 0)) throw std::domain_error("fit_affine: all weights vanish");
  for (int k = 0; k < 2; ++k) {
    mu_s[k] /= W;
    mu_d[k] /= W;
  }

  // Centered accumulation keeps the covariances well conditioned.
  Mat2 C_ss{}, C_ds{};
  for (std::size_t i = 0; i < t.size(); ++i) {
    const Vec2 src = detail::pixel_center(t[i], side);
    const Vec2 dst = detail::pixel_center(i, side);
    const double w = detail::correspondence_weight(src, dst, center, sigma, weighting);
    const Vec2 s{src[0] - mu_s[0], src[1] - mu_s[1]};
    const Vec2 d{dst[0] - mu_d[0], dst[1] - mu_d[1]};
    for (int r = 0; r < 2; ++r) {
      for (int c = 0; c < 2; ++c) {
        C_ss[r][c] += w * s[r] * s[c];
        C_ds[r][c] += w * d[r] * s[c];
      }
    }
  }
  for (auto* C : {&C_ss, &C_ds})
    for (auto& row : *C)
      for (auto& x : row) x /= W;

  const double det_ss = determinant(C_ss);
  if (!(std::abs(det_ss) > 1e-300)) throw std::domain_error("fit_affine: singular source covariance");
  const Mat2 inv{{{C_ss[1][1] / det_ss, -C_ss[0][1] / det_ss}, {-C_ss[1][0] / det_ss, C_ss[0][0] / det_ss}}};

  AffineFit fit;
  fit.A = multiply(C_ds, inv);
  fit.b = {mu_d[0] - (fit.A[0][0] * mu_s[0] + fit.A[0][1] * mu_s[1]),
           mu_d[1] - (fit.A[1][0] * mu_s[0] + fit.A[1][1] * mu_s[1])};
  fit.det = determinant(fit.A);
  const Decomposition d = decompose(fit.A);
  fit.s_x = d.s_x;
  fit.s_y = d.s_y;
  fit.lambda = d.lambda;
  fit.theta = d.theta;
  fit.residual_rms = residual_rms(t, fit, side, sigma, weighting);
  return fit;
}

/// Quality flag used when filtering restarts.
inline bool is_poor(const AffineFit& fit, double max_residual = 3.0, double det_lo = 0.8, double det_hi = 1.2) {
  const double adet = std::abs(fit.det);
  return !(fit.residual_rms <= max_residual) || adet < det_lo || adet > det_hi;
}

}  // namespace permlearn

#endif  // PERMLEARN_AFFINE_HPP
