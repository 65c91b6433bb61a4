#ifndef PERMLEARN_MATCH_INDEX_HPP
#define PERMLEARN_MATCH_INDEX_HPP

// Approximate close-match search in Hamming space.
//
// Each of l replicas stores the image set in a binary trie keyed by the
// image's bits read in a replica-specific random pixel order. Subtrees with
// at most m images collapse into leaves. A query descends every trie by its
// own bits in that trie's order and stops at a leaf or where the matching
// branch is missing; the union of images below the stopping nodes is scanned
// for the Hamming-closest one.
//
// Runs of single-child nodes are path-compressed: a node records the depth
// at which its images first disagree, plus a representative whose bits stand
// in for the skipped levels. A query that mismatches the representative on a
// skipped level stops at that node, whose image range is the same set the
// uncompressed chain node would have held.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "permlearn/errors.hpp"
#include "permlearn/image_set.hpp"
#include "permlearn/permutation.hpp"
#include "permlearn/rng.hpp"

namespace permlearn {

struct MatchResult {
  ImageId id = 0;
  std::size_t distance = 0;
  std::size_t examined = 0;  // distinct candidates scanned
};

/// Linear-scan exact nearest neighbor, lowest id on ties.
inline MatchResult exact_nearest(const ImageSet& set, const BitImage& q) {
  if (set.empty()) throw data_error("exact_nearest: empty image set");
  detail::require(q.side() == set.side(), "exact_nearest: query side mismatch");
  MatchResult best{0, std::numeric_limits<std::size_t>::max(), set.size()};
  for (ImageId id = 0; id < set.size(); ++id) {
    const std::size_t d = hamming(set[id].bits(), q.bits());
    if (d < best.distance) {
      best.distance = d;
      best.id = id;
    }
  }
  return best;
}

class MatchIndex {
 public:
  static constexpr std::int32_t no_child = -1;

  struct Node {
    std::uint32_t begin = 0;        // range into Tree::ids
    std::uint32_t end = 0;
    std::uint32_t first_depth = 0;  // first ordering depth not yet fixed by ancestors
    std::uint32_t split_depth = 0;  // first depth at which the range disagrees
    std::int32_t child[2] = {no_child, no_child};

    bool leaf() const noexcept { return child[0] == no_child && child[1] == no_child; }
    std::size_t size() const noexcept { return end - begin; }
  };

  struct Tree {
    Permutation ordering;
    std::vector<ImageId> ids;
    std::vector<Node> nodes;  // nodes[0] is the root
  };

  /// Builds `tree_count` tries with leaf capacity `leaf_capacity`.
  /// The set must outlive the index.
  MatchIndex(const ImageSet& set, std::size_t tree_count, std::size_t leaf_capacity, Rng& rng)
      : set_(&set), leaf_capacity_(leaf_capacity) {
    if (set.empty()) throw data_error("MatchIndex: empty image set");
    detail::require(tree_count >= 1, "MatchIndex: need at least one tree");
    detail::require(leaf_capacity >= 1, "MatchIndex: leaf capacity must be at least 1");
    trees_.reserve(tree_count);
    for (std::size_t k = 0; k < tree_count; ++k) {
      trees_.push_back(build_tree(random_permutation(set.pixel_count(), rng)));
    }
  }

  MatchIndex(const MatchIndex&) = delete;
  MatchIndex& operator=(const MatchIndex&) = delete;
  MatchIndex(MatchIndex&&) noexcept = default;
  MatchIndex& operator=(MatchIndex&&) noexcept = default;

  std::size_t tree_count() const noexcept { return trees_.size(); }
  std::size_t leaf_capacity() const noexcept { return leaf_capacity_; }
  const ImageSet& images() const noexcept { return *set_; }
  const Tree& tree(std::size_t k) const { return trees_.at(k); }

  /// Ids under the node where the query's descent stops in tree k.
  std::pair<std::uint32_t, std::uint32_t> stop_range(std::size_t k, const BitImage& q) const {
    const Tree& tree = trees_[k];
    const BitVector& qbits = q.bits();
    const Node* node = &tree.nodes[0];
    for (;;) {
      if (node->leaf()) break;
      const BitVector& rep = (*set_)[tree.ids[node->begin]].bits();
      bool diverged = false;
      for (std::uint32_t d = node->first_depth; d < node->split_depth; ++d) {
        const auto px = tree.ordering[d];
        if (qbits[px] != rep[px]) {
          diverged = true;
          break;
        }
      }
      if (diverged) break;
      const bool bit = qbits[tree.ordering[node->split_depth]];
      node = &tree.nodes[std::size_t(node->child[bit])];
    }
    return {node->begin, node->end};
  }

  /// Closest candidate over all trees' stopping subtrees; lowest id on ties.
  MatchResult query(const BitImage& q) const {
    detail::require(q.side() == set_->side(), "MatchIndex::query: query side mismatch");
    std::vector<ImageId> candidates;
    candidates.reserve(trees_.size() * leaf_capacity_);
    for (std::size_t k = 0; k < trees_.size(); ++k) {
      const auto [b, e] = stop_range(k, q);
      candidates.insert(candidates.end(), trees_[k].ids.begin() + b, trees_[k].ids.begin() + e);
    }
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

    MatchResult best{0, std::numeric_limits<std::size_t>::max(), candidates.size()};
    for (const ImageId id : candidates) {
      const std::size_t d = hamming((*set_)[id].bits(), q.bits());
      if (d < best.distance) {
        best.distance = d;
        best.id = id;
      }
    }
    return best;
  }

  /// Exhaustive structural check of every tree: each id exactly once, leaf
  /// sizes in [1, m] unless the leaf holds identical images, internal nodes
  /// above m, and each node's range agreeing on its fixed prefix.
  bool validate() const {
    for (const Tree& tree : trees_) {
      if (tree.ids.size() != set_->size()) return false;
      std::vector<bool> seen(set_->size(), false);
      for (auto id : tree.ids) {
        if (id >= set_->size() || seen[id]) return false;
        seen[id] = true;
      }
      for (const Node& n : tree.nodes) {
        if (n.size() == 0) return false;
        if (n.leaf()) {
          if (n.size() > leaf_capacity_ && !all_identical(tree, n)) return false;
          continue;
        }
        if (n.size() <= leaf_capacity_) return false;
        if (n.child[0] == no_child || n.child[1] == no_child) return false;
        const Node& c0 = tree.nodes[std::size_t(n.child[0])];
        const Node& c1 = tree.nodes[std::size_t(n.child[1])];
        if (c0.begin != n.begin || c0.end != c1.begin || c1.end != n.end) return false;
        const auto px = tree.ordering[n.split_depth];
        for (auto i = c0.begin; i < c0.end; ++i)
          if ((*set_)[tree.ids[i]].bits()[px]) return false;
        for (auto i = c1.begin; i < c1.end; ++i)
          if (!(*set_)[tree.ids[i]].bits()[px]) return false;
      }
    }
    return true;
  }

 private:
  bool all_identical(const Tree& tree, const Node& n) const {
    const BitVector& first = (*set_)[tree.ids[n.begin]].bits();
    for (auto i = n.begin + 1; i < n.end; ++i)
      if (!((*set_)[tree.ids[i]].bits() == first)) return false;
    return true;
  }

  Tree build_tree(Permutation ordering) const {
    Tree tree;
    tree.ordering = std::move(ordering);
    tree.ids.resize(set_->size());
    for (std::size_t i = 0; i < tree.ids.size(); ++i) tree.ids[i] = static_cast<ImageId>(i);

    const auto depth_limit = static_cast<std::uint32_t>(set_->pixel_count());
    tree.nodes.push_back(Node{0, static_cast<std::uint32_t>(tree.ids.size()), 0, depth_limit});
    std::vector<std::size_t> pending{0};
    while (!pending.empty()) {
      const std::size_t at = pending.back();
      pending.pop_back();
      Node node = tree.nodes[at];
      if (node.size() <= leaf_capacity_) {
        node.split_depth = node.first_depth;
        tree.nodes[at] = node;
        continue;
      }
      node.split_depth = first_disagreement(tree, node, depth_limit);
      if (node.split_depth == depth_limit) {
        tree.nodes[at] = node;  // identical images beyond capacity
        continue;
      }
      const auto px = tree.ordering[node.split_depth];
      auto first = tree.ids.begin() + node.begin;
      auto last = tree.ids.begin() + node.end;
      auto mid = std::stable_partition(first, last, [&](ImageId id) { return !(*set_)[id].bits()[px]; });
      const auto mid_pos = static_cast<std::uint32_t>(mid - tree.ids.begin());
      for (int bit = 0; bit < 2; ++bit) {
        Node child;
        child.begin = bit == 0 ? node.begin : mid_pos;
        child.end = bit == 0 ? mid_pos : node.end;
        child.first_depth = node.split_depth + 1;
        child.split_depth = depth_limit;
        node.child[bit] = static_cast<std::int32_t>(tree.nodes.size());
        tree.nodes.push_back(child);
        pending.push_back(tree.nodes.size() - 1);
      }
      tree.nodes[at] = node;
    }
    return tree;
  }

  std::uint32_t first_disagreement(const Tree& tree, const Node& node, std::uint32_t limit) const {
    const BitVector& rep = (*set_)[tree.ids[node.begin]].bits();
    for (std::uint32_t d = node.first_depth; d < limit; ++d) {
      const auto px = tree.ordering[d];
      const bool want = rep[px];
      for (auto i = node.begin + 1; i < node.end; ++i) {
        if ((*set_)[tree.ids[i]].bits()[px] != want) return d;
      }
    }
    return limit;
  }

  const ImageSet* set_;
  std::size_t leaf_capacity_;
  std::vector<Tree> trees_;
};

}  // namespace permlearn

#endif  // PERMLEARN_MATCH_INDEX_HPP
