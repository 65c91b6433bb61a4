#ifndef PERMLEARN_IMAGE_SET_HPP
#define PERMLEARN_IMAGE_SET_HPP

#include <cstddef>
#include <cstdint>
#include <vector>

#include "permlearn/errors.hpp"
#include "permlearn/image.hpp"

namespace permlearn {

using ImageId = std::uint32_t;

/// Indexed collection of equal-side binary images. An image's id is its
/// position in insertion order.
class ImageSet {
 public:
  ImageSet() = default;
  explicit ImageSet(std::size_t side, double min_minority = 0.0)
      : side_(side), min_minority_(min_minority) {}

  /// Throws contract_error on side mismatch or when the image fails the
  /// admission filter this set was created with.
  ImageId add(BitImage img) {
    if (images_.empty() && side_ == 0) side_ = img.side();
    detail::require(img.side() == side_, "ImageSet::add: side mismatch");
    detail::require(img.minority_fraction() >= min_minority_, "ImageSet::add: image fails minority filter");
    images_.push_back(std::move(img));
    return static_cast<ImageId>(images_.size() - 1);
  }

  std::size_t size() const noexcept { return images_.size(); }
  bool empty() const noexcept { return images_.empty(); }
  std::size_t side() const noexcept { return side_; }
  std::size_t pixel_count() const noexcept { return side_ * side_; }
  double min_minority() const noexcept { return min_minority_; }

  const BitImage& operator[](ImageId id) const noexcept { return images_[id]; }
  const BitImage& at(ImageId id) const {
    detail::require(id < images_.size(), "ImageSet::at: id out of range");
    return images_[id];
  }

  auto begin() const noexcept { return images_.begin(); }
  auto end() const noexcept { return images_.end(); }

  /// FNV-1a over side and packed image words; stable across platforms.
  std::uint64_t fingerprint() const noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](std::uint64_t w) {
      for (int b = 0; b < 8; ++b) {
        h ^= (w >> (8 * b)) & 0xffu;
        h *= 0x100000001b3ULL;
      }
    };
    mix(side_);
    mix(images_.size());
    for (const auto& img : images_) {
      for (auto w : img.bits().words()) mix(w);
    }
    return h;
  }

 private:
  std::size_t side_ = 0;
  double min_minority_ = 0.0;
  std::vector<BitImage> images_;
};

}  // namespace permlearn

#endif  // PERMLEARN_IMAGE_SET_HPP
