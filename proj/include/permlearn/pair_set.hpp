#ifndef PERMLEARN_PAIR_SET_HPP
#define PERMLEARN_PAIR_SET_HPP

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <vector>

#include "permlearn/bit_vector.hpp"
#include "permlearn/errors.hpp"
#include "permlearn/image_set.hpp"
#include "permlearn/match_index.hpp"
#include "permlearn/permutation.hpp"
#include "permlearn/rng.hpp"

namespace permlearn {

struct ImagePair {
  ImageId first = 0;
  ImageId second = 0;
  std::uint64_t serial = 0;  // insertion counter, larger is newer

  friend bool operator==(const ImagePair&, const ImagePair&) = default;
};

/// d_T(I, I'): Hamming distance between the transformed first image and the second.
inline std::size_t pair_objective(const Permutation& t, const BitImage& first, const BitImage& second) {
  detail::require(first.pixel_count() == second.pixel_count() && t.size() == first.pixel_count(),
                  "pair_objective: size mismatch");
  return hamming(permute(first.bits(), t), second.bits());
}

enum class Columns { rebuild, defer };

/// Working set of image pairs plus its transposed bit representation.
///
/// first_column(i) has bit p set iff pixel i of pair p's first image is
/// white; second_column(i) likewise for the second images. Columns are
/// regenerated from the pair list, never patched.
class PairSet {
 public:
  explicit PairSet(const ImageSet& set) : set_(&set) { rebuild_columns(); }

  const ImageSet& images() const noexcept { return *set_; }
  std::size_t size() const noexcept { return pairs_.size(); }
  bool empty() const noexcept { return pairs_.empty(); }
  const std::vector<ImagePair>& pairs() const noexcept { return pairs_; }
  std::uint64_t next_serial() const noexcept { return next_serial_; }

  const BitVector& first_column(std::size_t pixel) const noexcept { return first_cols_[pixel]; }
  const BitVector& second_column(std::size_t pixel) const noexcept { return second_cols_[pixel]; }
  std::size_t column_count() const noexcept { return first_cols_.size(); }

  void append(ImageId first, ImageId second, Columns cols = Columns::rebuild) {
    detail::require(first < set_->size() && second < set_->size(), "PairSet::append: id out of range");
    pairs_.push_back(ImagePair{first, second, next_serial_++});
    if (cols == Columns::rebuild) rebuild_columns();
  }

  /// Replaces the whole pair list (checkpoint restore).
  void assign(std::vector<ImagePair> pairs, std::uint64_t next_serial) {
    for (const auto& p : pairs) {
      detail::require(p.first < set_->size() && p.second < set_->size(), "PairSet::assign: id out of range");
      detail::require(p.serial < next_serial, "PairSet::assign: serial not below next_serial");
    }
    pairs_ = std::move(pairs);
    next_serial_ = next_serial;
    rebuild_columns();
  }

  /// Keeps pairs whose position is not flagged, preserving order.
  void erase_positions(const std::vector<bool>& doomed, Columns cols = Columns::rebuild) {
    std::size_t out = 0;
    for (std::size_t k = 0; k < pairs_.size(); ++k) {
      if (!doomed[k]) pairs_[out++] = pairs_[k];
    }
    pairs_.resize(out);
    if (cols == Columns::rebuild) rebuild_columns();
  }

  void rebuild_columns() {
    const std::size_t n = set_->pixel_count();
    const std::size_t p = pairs_.size();
    first_cols_.assign(n, BitVector(p));
    second_cols_.assign(n, BitVector(p));
    for (std::size_t k = 0; k < p; ++k) {
      scatter((*set_)[pairs_[k].first].bits(), k, first_cols_);
      scatter((*set_)[pairs_[k].second].bits(), k, second_cols_);
    }
  }

  /// True iff the columns match a fresh rebuild from the pair list.
  bool columns_consistent() const {
    PairSet fresh(*set_);
    fresh.pairs_ = pairs_;
    fresh.rebuild_columns();
    return fresh.first_cols_ == first_cols_ && fresh.second_cols_ == second_cols_;
  }

 private:
  static void scatter(const BitVector& img, std::size_t row, std::vector<BitVector>& cols) {
    const auto words = img.words();
    const std::size_t row_word = row / BitVector::word_bits;
    const BitVector::word_type row_mask = BitVector::word_type{1} << (row % BitVector::word_bits);
    for (std::size_t w = 0; w < words.size(); ++w) {
      auto bits = words[w];
      while (bits) {
        const std::size_t px = w * BitVector::word_bits + std::size_t(std::countr_zero(bits));
        cols[px].mutable_words()[row_word] |= row_mask;
        bits &= bits - 1;
      }
    }
  }

  const ImageSet* set_;
  std::vector<ImagePair> pairs_;
  std::uint64_t next_serial_ = 0;
  std::vector<BitVector> first_cols_;
  std::vector<BitVector> second_cols_;
};

/// D_T as a sum of per-pair distances.
inline std::size_t total_objective_rows(const Permutation& t, const PairSet& ps) {
  std::size_t total = 0;
  for (const auto& p : ps.pairs()) total += pair_objective(t, ps.images()[p.first], ps.images()[p.second]);
  return total;
}

/// D_T through the column vectors: sum over pixels of |x_{t(i)} - x'_i|^2.
inline std::size_t total_objective_columns(const Permutation& t, const PairSet& ps) {
  detail::require(t.size() == ps.column_count(), "total_objective: permutation size mismatch");
  std::size_t total = 0;
  for (std::size_t i = 0; i < t.size(); ++i) total += hamming(ps.first_column(t[i]), ps.second_column(i));
  return total;
}

inline std::size_t total_objective(const Permutation& t, const PairSet& ps) {
  return total_objective_columns(t, ps);
}

/// Appends n pairs (I, close match of T x_I) with I drawn uniformly from the set.
inline void add_pairs(PairSet& ps, std::size_t n, const Permutation& t, const MatchIndex& index, Rng& rng,
                      Columns cols = Columns::rebuild) {
  detail::require(&index.images() == &ps.images(), "add_pairs: index built over a different image set");
  detail::require(t.size() == ps.images().pixel_count(), "add_pairs: permutation size mismatch");
  const ImageSet& set = ps.images();
  std::vector<ImageId> firsts(n);
  for (auto& id : firsts) id = static_cast<ImageId>(rng.below(set.size()));
  for (const ImageId id : firsts) {
    const BitImage query(set.side(), permute(set[id].bits(), t));
    ps.append(id, index.query(query).id, Columns::defer);
  }
  if (cols == Columns::rebuild) ps.rebuild_columns();
}

/// Removes n distinct pairs chosen uniformly at random.
inline void drop_random(PairSet& ps, std::size_t n, Rng& rng, Columns cols = Columns::rebuild) {
  if (n > ps.size()) throw contract_error("drop_random: n exceeds pair count");
  std::vector<std::size_t> order(ps.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<bool> doomed(ps.size(), false);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t pick = k + std::size_t(rng.below(order.size() - k));
    std::swap(order[k], order[pick]);
    doomed[order[k]] = true;
  }
  ps.erase_positions(doomed, cols);
}

/// Removes the n pairs with the largest d_T; among equal d_T the newest go first.
inline void remove_worst(PairSet& ps, std::size_t n, const Permutation& t, Columns cols = Columns::rebuild) {
  if (n > ps.size()) throw contract_error("remove_worst: n exceeds pair count");
  const auto& pairs = ps.pairs();
  std::vector<std::size_t> cost(pairs.size());
  for (std::size_t k = 0; k < pairs.size(); ++k)
    cost[k] = pair_objective(t, ps.images()[pairs[k].first], ps.images()[pairs[k].second]);
  std::vector<std::size_t> order(pairs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (cost[a] != cost[b]) return cost[a] > cost[b];
    return pairs[a].serial > pairs[b].serial;
  });
  std::vector<bool> doomed(pairs.size(), false);
  for (std::size_t k = 0; k < n; ++k) doomed[order[k]] = true;
  ps.erase_positions(doomed, cols);
}

}  // namespace permlearn

#endif  // PERMLEARN_PAIR_SET_HPP
