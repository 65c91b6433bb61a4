#ifndef PERMLEARN_TEST_SUPPORT_HPP
#define PERMLEARN_TEST_SUPPORT_HPP

// Independent oracles and fixtures shared by the test binaries. Nothing here
// calls the packed-word kernels it is used to check.

#include <cstddef>
#include <vector>

#include "permlearn/permlearn.hpp"

namespace permlearn::oracle {

inline BitVector random_bits(std::size_t n, Rng& rng, double p = 0.5) {
  BitVector v(n);
  for (std::size_t i = 0; i < n; ++i)
    if (rng.uniform() < p) v.set(i);
  return v;
}

inline std::size_t naive_hamming(const BitVector& a, const BitVector& b) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < a.size(); ++i) n += a.test(i) != b.test(i);
  return n;
}

inline std::size_t naive_dot(const BitVector& a, const BitVector& b) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < a.size(); ++i) n += a.test(i) && b.test(i);
  return n;
}

inline std::size_t naive_popcount(const BitVector& a) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < a.size(); ++i) n += a.test(i);
  return n;
}

/// Pixel map sending (u, v) to (v, L-1-u); as a transformation it rotates
/// image content by +90 degrees in pixel-center coordinates.
inline Permutation rotation90(std::size_t side) {
  std::vector<Permutation::index_type> m(side * side);
  for (std::size_t v = 0; v < side; ++v)
    for (std::size_t u = 0; u < side; ++u)
      m[v * side + u] = Permutation::index_type((side - 1 - u) * side + v);
  return Permutation::from_map(std::move(m));
}

/// Cyclic translation: destination (u, v) takes source ((u - du) mod L, (v - dv) mod L).
inline Permutation cyclic_shift(std::size_t side, std::size_t du, std::size_t dv) {
  std::vector<Permutation::index_type> m(side * side);
  for (std::size_t v = 0; v < side; ++v)
    for (std::size_t u = 0; u < side; ++u)
      m[v * side + u] = Permutation::index_type(((v + side - dv) % side) * side + (u + side - du) % side);
  return Permutation::from_map(std::move(m));
}

/// Naive images of a small random problem for objective checks.
struct RandomProblem {
  ImageSet set;
  Permutation t;
  PairSet ps;

  RandomProblem(std::size_t side, std::size_t pairs, Rng& rng)
      : set(make_set(side, pairs, rng)), t(random_permutation(side * side, rng)), ps(set) {
    for (std::size_t k = 0; k < pairs; ++k)
      ps.append(ImageId(rng.below(set.size())), ImageId(rng.below(set.size())), Columns::defer);
    ps.rebuild_columns();
  }

  RandomProblem(const RandomProblem&) = delete;

 private:
  static ImageSet make_set(std::size_t side, std::size_t pairs, Rng& rng) {
    ImageSet s(side);
    for (std::size_t k = 0; k < 2 * pairs; ++k) s.add(BitImage(side, random_bits(side * side, rng, 0.3 + 0.4 * rng.uniform())));
    return s;
  }
};

/// D_T from first principles: per pair, per pixel, compare the source
/// pixel of the first image with the destination pixel of the second.
inline std::size_t naive_objective(const Permutation& t, const PairSet& ps) {
  std::size_t total = 0;
  for (const auto& p : ps.pairs()) {
    const auto& a = ps.images()[p.first].bits();
    const auto& b = ps.images()[p.second].bits();
    for (std::size_t i = 0; i < t.size(); ++i) total += a.test(t[i]) != b.test(i);
  }
  return total;
}

}  // namespace permlearn::oracle

#endif  // PERMLEARN_TEST_SUPPORT_HPP
