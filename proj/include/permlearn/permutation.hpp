#ifndef PERMLEARN_PERMUTATION_HPP
#define PERMLEARN_PERMUTATION_HPP

#include <cstddef>
#include <cstdint>
#include <numeric>
#include <utility>
#include <vector>

#include "permlearn/bit_vector.hpp"
#include "permlearn/errors.hpp"
#include "permlearn/rng.hpp"

namespace permlearn {

/// Bijection on {0, ..., n-1}; map()[i] is the image of i.
///
/// Applied to a bit string, output position i takes the input bit at
/// position map()[i] (see permute()).
class Permutation {
 public:
  using index_type = std::uint32_t;

  Permutation() = default;

  static Permutation identity(std::size_t n) {
    Permutation p;
    p.map_.resize(n);
    std::iota(p.map_.begin(), p.map_.end(), index_type{0});
    return p;
  }

  /// Throws contract_error unless `map` is a bijection on [0, map.size()).
  static Permutation from_map(std::vector<index_type> map) {
    Permutation p;
    p.map_ = std::move(map);
    detail::require(p.is_bijection(), "Permutation::from_map: not a bijection");
    return p;
  }

  std::size_t size() const noexcept { return map_.size(); }
  index_type operator[](std::size_t i) const noexcept { return map_[i]; }
  index_type at(std::size_t i) const {
    detail::require(i < map_.size(), "Permutation::at: index out of range");
    return map_[i];
  }
  const std::vector<index_type>& map() const noexcept { return map_; }

  void swap_in_place(std::size_t i, std::size_t j) {
    detail::require(i < map_.size() && j < map_.size(), "swap_in_place: index out of range");
    std::swap(map_[i], map_[j]);
  }

  bool is_bijection() const {
    std::vector<bool> seen(map_.size(), false);
    for (auto v : map_) {
      if (v >= map_.size() || seen[v]) return false;
      seen[v] = true;
    }
    return true;
  }

  friend bool operator==(const Permutation&, const Permutation&) = default;

 private:
  std::vector<index_type> map_;
};

/// compose(a, b)[i] == a[b[i]], so permute(permute(x, a), b) == permute(x, compose(a, b)).
inline Permutation compose(const Permutation& a, const Permutation& b) {
  detail::require(a.size() == b.size(), "compose: size mismatch");
  std::vector<Permutation::index_type> m(a.size());
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = a[b[i]];
  return Permutation::from_map(std::move(m));
}

inline Permutation inverse(const Permutation& p) {
  std::vector<Permutation::index_type> m(p.size());
  for (std::size_t i = 0; i < m.size(); ++i) m[p[i]] = static_cast<Permutation::index_type>(i);
  return Permutation::from_map(std::move(m));
}

/// Fisher-Yates shuffle of the identity.
inline Permutation random_permutation(std::size_t n, Rng& rng) {
  detail::require(n >= 1, "random_permutation: n must be at least 1");
  auto map = Permutation::identity(n).map();
  for (std::size_t i = n - 1; i > 0; --i) {
    std::swap(map[i], map[rng.below(i + 1)]);
  }
  return Permutation::from_map(std::move(map));
}

/// Output bit i is x[t[i]].
inline BitVector permute(const BitVector& x, const Permutation& t) {
  detail::require(x.size() == t.size(), "permute: size mismatch");
  BitVector out(x.size());
  auto words = out.mutable_words();
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[t[i]]) words[i / BitVector::word_bits] |= BitVector::word_type{1} << (i % BitVector::word_bits);
  }
  return out;
}

/// Number of positions where a and b differ.
inline std::size_t disagreement(const Permutation& a, const Permutation& b) {
  detail::require(a.size() == b.size(), "disagreement: size mismatch");
  std::size_t n = 0;
  for (std::size_t i = 0; i < a.size(); ++i) n += a[i] != b[i];
  return n;
}

}  // namespace permlearn

#endif  // PERMLEARN_PERMUTATION_HPP
