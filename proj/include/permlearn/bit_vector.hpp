#ifndef PERMLEARN_BIT_VECTOR_HPP
#define PERMLEARN_BIT_VECTOR_HPP

#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "permlearn/errors.hpp"

namespace permlearn {

/// Packed binary string.
///
/// Logical bit i lives in word i / 64 at bit position i % 64. Bits past
/// size() in the last word are kept zero by every mutating member, so
/// word-level popcounts never see garbage.
class BitVector {
 public:
  using word_type = std::uint64_t;
  static constexpr std::size_t word_bits = 64;

  BitVector() = default;
  explicit BitVector(std::size_t size, bool value = false)
      : size_(size), words_(word_count(size), value ? ~word_type{0} : word_type{0}) {
    clear_padding();
  }

  /// Builds from a string of '0'/'1'; character k becomes bit k.
  static BitVector from_string(std::string_view bits) {
    BitVector v(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i) {
      if (bits[i] == '1') {
        v.set(i);
      } else if (bits[i] != '0') {
        throw contract_error("BitVector::from_string: expected only '0' and '1'");
      }
    }
    return v;
  }

  static constexpr std::size_t word_count(std::size_t bits) noexcept {
    return (bits + word_bits - 1) / word_bits;
  }

  std::size_t size() const noexcept { return size_; }
  bool empty() const noexcept { return size_ == 0; }

  bool operator[](std::size_t i) const noexcept {
    return (words_[i / word_bits] >> (i % word_bits)) & 1u;
  }

  bool test(std::size_t i) const {
    detail::require(i < size_, "BitVector::test: index out of range");
    return (*this)[i];
  }

  void set(std::size_t i, bool value = true) {
    detail::require(i < size_, "BitVector::set: index out of range");
    const word_type mask = word_type{1} << (i % word_bits);
    if (value) {
      words_[i / word_bits] |= mask;
    } else {
      words_[i / word_bits] &= ~mask;
    }
  }

  void reset(std::size_t i) { set(i, false); }

  void flip(std::size_t i) {
    detail::require(i < size_, "BitVector::flip: index out of range");
    words_[i / word_bits] ^= word_type{1} << (i % word_bits);
  }

  /// Bitwise complement of every logical bit.
  void flip_all() noexcept {
    for (auto& w : words_) w = ~w;
    clear_padding();
  }

  void resize(std::size_t size) {
    size_ = size;
    words_.resize(word_count(size), 0);
    clear_padding();
  }

  void push_back(bool value) {
    if (size_ % word_bits == 0) words_.push_back(0);
    ++size_;
    if (value) words_.back() |= word_type{1} << ((size_ - 1) % word_bits);
  }

  std::size_t count() const noexcept {
    std::size_t n = 0;
    for (auto w : words_) n += std::popcount(w);
    return n;
  }

  std::span<const word_type> words() const noexcept { return words_; }

  /// Mutable word access; callers writing past size() must call clear_padding().
  std::span<word_type> mutable_words() noexcept { return words_; }

  void clear_padding() noexcept {
    const std::size_t tail = size_ % word_bits;
    if (tail != 0 && !words_.empty()) words_.back() &= (word_type{1} << tail) - 1;
  }

  bool padding_clear() const noexcept {
    const std::size_t tail = size_ % word_bits;
    return tail == 0 || words_.empty() || (words_.back() >> tail) == 0;
  }

  std::string to_string() const {
    std::string s(size_, '0');
    for (std::size_t i = 0; i < size_; ++i) {
      if ((*this)[i]) s[i] = '1';
    }
    return s;
  }

  friend bool operator==(const BitVector&, const BitVector&) = default;

 private:
  std::size_t size_ = 0;
  std::vector<word_type> words_;
};

// Hamming and dot kernels over packed words.

inline std::size_t hamming(const BitVector& a, const BitVector& b) {
  detail::require(a.size() == b.size(), "hamming: length mismatch");
  const auto wa = a.words();
  const auto wb = b.words();
  std::size_t n = 0;
  for (std::size_t k = 0; k < wa.size(); ++k) n += std::popcount(wa[k] ^ wb[k]);
  return n;
}

inline std::size_t dot(const BitVector& a, const BitVector& b) {
  detail::require(a.size() == b.size(), "dot: length mismatch");
  const auto wa = a.words();
  const auto wb = b.words();
  std::size_t n = 0;
  for (std::size_t k = 0; k < wa.size(); ++k) n += std::popcount(wa[k] & wb[k]);
  return n;
}

namespace detail {

// Unchecked inner-loop variant used by the swap-delta evaluation.
inline std::size_t dot_words(std::span<const BitVector::word_type> a,
                             std::span<const BitVector::word_type> b) noexcept {
  std::size_t n = 0;
  for (std::size_t k = 0; k < a.size(); ++k) n += std::popcount(a[k] & b[k]);
  return n;
}

}  // namespace detail
}  // namespace permlearn

#endif  // PERMLEARN_BIT_VECTOR_HPP
