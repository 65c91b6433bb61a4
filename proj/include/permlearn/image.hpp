#ifndef PERMLEARN_IMAGE_HPP
#define PERMLEARN_IMAGE_HPP

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "permlearn/bit_vector.hpp"
#include "permlearn/errors.hpp"

namespace permlearn {

/// Square binary image; pixel (u, v) (column u, row v) is bit v * side + u.
/// A set bit is a white pixel.
class BitImage {
 public:
  BitImage() = default;
  explicit BitImage(std::size_t side) : side_(side), bits_(side * side) {}
  BitImage(std::size_t side, BitVector bits) : side_(side), bits_(std::move(bits)) {
    detail::require(bits_.size() == side_ * side_, "BitImage: bits.size() must equal side^2");
  }

  std::size_t side() const noexcept { return side_; }
  std::size_t pixel_count() const noexcept { return bits_.size(); }
  const BitVector& bits() const noexcept { return bits_; }
  BitVector& bits() noexcept { return bits_; }

  std::size_t index(std::size_t u, std::size_t v) const noexcept { return v * side_ + u; }

  bool at(std::size_t u, std::size_t v) const {
    detail::require(u < side_ && v < side_, "BitImage::at: pixel out of range");
    return bits_[index(u, v)];
  }

  void set(std::size_t u, std::size_t v, bool white = true) {
    detail::require(u < side_ && v < side_, "BitImage::set: pixel out of range");
    bits_.set(index(u, v), white);
  }

  std::size_t white_count() const noexcept { return bits_.count(); }

  /// Fraction of pixels of the less frequent color.
  double minority_fraction() const noexcept {
    if (bits_.empty()) return 0.0;
    const std::size_t w = bits_.count();
    return double(std::min(w, bits_.size() - w)) / double(bits_.size());
  }

  friend bool operator==(const BitImage&, const BitImage&) = default;

 private:
  std::size_t side_ = 0;
  BitVector bits_;
};

/// Rectangular binary raster, row-major like BitImage.
struct BinaryRaster {
  std::size_t width = 0;
  std::size_t height = 0;
  BitVector bits;

  BinaryRaster() = default;
  BinaryRaster(std::size_t w, std::size_t h) : width(w), height(h), bits(w * h) {}

  bool at(std::size_t u, std::size_t v) const noexcept { return bits[v * width + u]; }
  void set(std::size_t u, std::size_t v, bool white = true) { bits.set(v * width + u, white); }

  friend bool operator==(const BinaryRaster&, const BinaryRaster&) = default;
};

/// 8-bit grayscale raster, row-major, 0 = black.
struct GrayImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> values;

  GrayImage() = default;
  GrayImage(std::size_t w, std::size_t h, std::uint8_t fill = 0)
      : width(w), height(h), values(w * h, fill) {
    detail::require(w > 0 && h > 0, "GrayImage: dimensions must be positive");
  }

  std::uint8_t at(std::size_t u, std::size_t v) const noexcept { return values[v * width + u]; }
  std::uint8_t& at(std::size_t u, std::size_t v) noexcept { return values[v * width + u]; }

  friend bool operator==(const GrayImage&, const GrayImage&) = default;
};

inline BinaryRaster to_raster(const BitImage& img) {
  BinaryRaster r;
  r.width = r.height = img.side();
  r.bits = img.bits();
  return r;
}

/// 0 for black, 255 for white.
inline GrayImage to_gray(const BinaryRaster& r) {
  GrayImage g(r.width, r.height);
  for (std::size_t i = 0; i < r.bits.size(); ++i) g.values[i] = r.bits[i] ? 255 : 0;
  return g;
}

/// Standard luma weighting of an RGB triple, rounded to nearest.
inline std::uint8_t luma(std::uint8_t r, std::uint8_t g, std::uint8_t b) noexcept {
  const double y = 0.299 * r + 0.587 * g + 0.114 * b;
  return static_cast<std::uint8_t>(std::min(255.0, y + 0.5));
}

}  // namespace permlearn

#endif  // PERMLEARN_IMAGE_HPP
