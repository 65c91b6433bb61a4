#ifndef PERMLEARN_OPTIMIZER_HPP
#define PERMLEARN_OPTIMIZER_HPP

// Alternating minimization of D_T: random-swap hill climbing on the
// permutation with the pair set held fixed, then one pair-set update.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "permlearn/config.hpp"
#include "permlearn/errors.hpp"
#include "permlearn/image_set.hpp"
#include "permlearn/match_index.hpp"
#include "permlearn/pair_set.hpp"
#include "permlearn/permutation.hpp"
#include "permlearn/rng.hpp"

namespace permlearn {

/// Change in D_T if t(i) and t(j) were exchanged (new minus old):
/// 2 (x_{t(i)} - x_{t(j)})^T (x'_i - x'_j), expanded into four dot products.
inline std::int64_t delta_swap(const PairSet& ps, const Permutation& t, std::size_t i, std::size_t j) {
  detail::require(i < t.size() && j < t.size(), "delta_swap: index out of range");
  detail::require(t.size() == ps.column_count(), "delta_swap: permutation size mismatch");
  if (i == j) return 0;
  const auto fi = ps.first_column(t[i]).words();
  const auto fj = ps.first_column(t[j]).words();
  const auto si = ps.second_column(i).words();
  const auto sj = ps.second_column(j).words();
  const auto keep = std::int64_t(detail::dot_words(fi, si) + detail::dot_words(fj, sj));
  const auto cross = std::int64_t(detail::dot_words(fi, sj) + detail::dot_words(fj, si));
  return 2 * (keep - cross);
}

struct IterationRecord {
  std::size_t before_sweep = 0;
  std::size_t after_sweep = 0;
  std::size_t after_update = 0;
  std::size_t accepted = 0;

  friend bool operator==(const IterationRecord&, const IterationRecord&) = default;
};

struct Provenance {
  std::string mode = "random";  // random | composition | external
  std::vector<std::string> parents;

  friend bool operator==(const Provenance&, const Provenance&) = default;
};

/// Complete mutable state of one run; serializable for checkpoint/resume.
struct LearnState {
  LearnConfig config;
  Permutation t;
  PairSet ps;
  std::size_t iteration = 0;
  std::size_t objective = 0;  // tracked incrementally through sweeps
  std::vector<IterationRecord> trace;
  Provenance provenance;
  Rng rng;

  explicit LearnState(const ImageSet& set) : ps(set) {}
};

struct LearnedTransformation {
  Permutation t;
  std::size_t final_objective = 0;
  LearnConfig config;
  Provenance provenance;
  std::vector<IterationRecord> trace;

  friend bool operator==(const LearnedTransformation&, const LearnedTransformation&) = default;
};

class consistency_error : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// n_t random swap proposals; a swap is kept iff it does not increase D_T.
/// Returns the number of accepted swaps.
inline std::size_t sweep(LearnState& s) {
  const std::size_t n = s.t.size();
  std::size_t accepted = 0;
  for (std::size_t k = 0; k < s.config.n_t; ++k) {
    const std::size_t i = std::size_t(s.rng.below(n));
    const std::size_t j = std::size_t(s.rng.below(n));
    const std::int64_t delta = delta_swap(s.ps, s.t, i, j);
    if (delta <= 0) {
      s.t.swap_in_place(i, j);
      s.objective = std::size_t(std::int64_t(s.objective) + delta);
      ++accepted;
    }
  }
  return accepted;
}

/// Adds n_n close matches, then drops n_r at random before removing the
/// n_n - n_r worst; |P| is unchanged.
inline void update_pairs(LearnState& s, const MatchIndex& index) {
  add_pairs(s.ps, s.config.n_n, s.t, index, s.rng, Columns::defer);
  drop_random(s.ps, s.config.n_r, s.rng, Columns::defer);
  remove_worst(s.ps, s.config.n_n - s.config.n_r, s.t, Columns::defer);
  s.ps.rebuild_columns();
}

/// Fresh state: t from `init` or random, P filled with pair_count close-match pairs under t.
inline LearnState init_state(const LearnConfig& config, const ImageSet& set, const MatchIndex& index,
                             std::optional<Permutation> init = std::nullopt, Provenance provenance = {}) {
  check_config(config);
  if (set.side() != config.L) throw data_error("init_state: image side does not match L");
  if (set.size() < config.pair_count) throw data_error("init_state: image set smaller than P_size");
  detail::require(&index.images() == &set, "init_state: index built over a different image set");
  LearnState s(set);
  s.config = config;
  s.rng = Rng(mix_seed(config.seed, 1));
  if (init) {
    detail::require(init->size() == config.pixel_count(), "init_state: init permutation size mismatch");
    s.t = std::move(*init);
  } else {
    s.t = random_permutation(config.pixel_count(), s.rng);
  }
  s.provenance = std::move(provenance);
  add_pairs(s.ps, config.pair_count, s.t, index, s.rng);
  s.objective = total_objective(s.t, s.ps);
  return s;
}

/// Recomputes D_T both ways and checks it against the tracked value.
inline void verify_state(const LearnState& s) {
  if (!s.t.is_bijection()) throw consistency_error("permutation lost bijectivity");
  const std::size_t cols = total_objective_columns(s.t, s.ps);
  const std::size_t rows = total_objective_rows(s.t, s.ps);
  if (cols != s.objective || rows != s.objective) throw consistency_error("tracked D_T diverged from recomputation");
}

using IterationObserver = std::function<void(const LearnState&)>;

/// Runs single iterations until `state.iteration == state.config.n_i`.
inline void run(LearnState& s, const MatchIndex& index, const IterationObserver& observer = {}) {
  while (s.iteration < s.config.n_i) {
    IterationRecord rec;
    rec.before_sweep = s.objective;
    rec.accepted = sweep(s);
    rec.after_sweep = s.objective;
    if (rec.after_sweep > rec.before_sweep) throw consistency_error("sweep increased D_T");
    update_pairs(s, index);
    s.objective = total_objective(s.t, s.ps);
    rec.after_update = s.objective;
    s.trace.push_back(rec);
    ++s.iteration;
    if (s.config.verify_every != 0 && s.iteration % s.config.verify_every == 0) verify_state(s);
    if (observer) observer(s);
  }
}

inline LearnedTransformation finish(const LearnState& s) {
  return LearnedTransformation{s.t, s.objective, s.config, s.provenance, s.trace};
}

/// The full loop over a prebuilt index.
inline LearnedTransformation minimize(const LearnConfig& config, const ImageSet& set, const MatchIndex& index,
                                      std::optional<Permutation> init = std::nullopt, Provenance provenance = {},
                                      const IterationObserver& observer = {}) {
  LearnState s = init_state(config, set, index, std::move(init), std::move(provenance));
  run(s, index, observer);
  return finish(s);
}

/// Index seed stream for a config; restarts that share an index use this.
inline MatchIndex build_index(const LearnConfig& config, const ImageSet& set) {
  Rng rng(mix_seed(config.seed, 0));
  return MatchIndex(set, config.l, config.m, rng);
}

inline LearnedTransformation minimize(const LearnConfig& config, const ImageSet& set,
                                      std::optional<Permutation> init = std::nullopt) {
  const MatchIndex index = build_index(config, set);
  return minimize(config, set, index, std::move(init));
}

/// Composition of `count` parents picked without replacement from the list,
/// in random order. With fewer parents than `count`, all of them are used.
inline Permutation compose_init(const std::vector<Permutation>& parents, Rng& rng, std::size_t count = 2,
                                std::vector<std::size_t>* picked = nullptr) {
  if (parents.empty()) throw contract_error("compose_init: no parents");
  for (const auto& p : parents) detail::require(p.size() == parents.front().size(), "compose_init: size mismatch");
  std::vector<std::size_t> order(parents.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  const std::size_t take = std::max<std::size_t>(1, std::min(count, parents.size()));
  for (std::size_t k = 0; k < take; ++k) std::swap(order[k], order[k + std::size_t(rng.below(order.size() - k))]);
  Permutation out = parents[order[0]];
  for (std::size_t k = 1; k < take; ++k) out = compose(out, parents[order[k]]);
  if (picked) picked->assign(order.begin(), order.begin() + std::ptrdiff_t(take));
  return out;
}

/// Mean Euclidean distance, in pixels, between where a and b send each pixel
/// on an L×L grid.
inline double mean_displacement(const Permutation& a, const Permutation& b, std::size_t side) {
  detail::require(a.size() == b.size() && a.size() == side * side, "mean_displacement: size mismatch");
  double total = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double du = double(a[i] % side) - double(b[i] % side);
    const double dv = double(a[i] / side) - double(b[i] / side);
    total += std::sqrt(du * du + dv * dv);
  }
  return total / double(a.size());
}

/// Among `tries` random compositions, the one farthest (by minimum mean
/// displacement) from every permutation in `learned`.
inline Permutation compose_init_far(const std::vector<Permutation>& parents, const std::vector<Permutation>& learned,
                                    std::size_t side, Rng& rng, std::size_t tries = 8, std::size_t count = 2) {
  Permutation best;
  double best_score = -1.0;
  for (std::size_t k = 0; k < std::max<std::size_t>(tries, 1); ++k) {
    Permutation cand = compose_init(parents, rng, count);
    double score = std::numeric_limits<double>::infinity();
    for (const auto& l : learned) score = std::min(score, mean_displacement(cand, l, side));
    if (score > best_score) {
      best_score = score;
      best = std::move(cand);
    }
  }
  return best;
}

}  // namespace permlearn

#endif  // PERMLEARN_OPTIMIZER_HPP
