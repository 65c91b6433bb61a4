#ifndef PERMLEARN_CONFIG_HPP
#define PERMLEARN_CONFIG_HPP

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "permlearn/errors.hpp"

namespace permlearn {

/// Learning parameters. Field names follow the usual symbols:
/// L side, m leaf capacity, l tree count, |S| set size, |P| pair count,
/// n_t swap attempts per iteration, n_n pairs added, n_r pairs dropped,
/// n_i iterations.
struct LearnConfig {
  std::size_t L = 16;
  std::size_t m = 5;
  std::size_t l = 10;
  std::size_t set_size = 2000;
  std::size_t pair_count = 64;
  std::size_t n_t = 2048;
  std::size_t n_n = 8;
  std::size_t n_r = 1;
  std::size_t n_i = 600;
  std::uint64_t seed = 1;

  double min_minority = 0.10;
  std::size_t checkpoint_every = 0;  // 0 disables
  std::size_t verify_every = 100;    // full D_T recomputation period, 0 disables

  std::size_t pixel_count() const noexcept { return L * L; }

  friend bool operator==(const LearnConfig&, const LearnConfig&) = default;
};

/// Throws config_error for structurally invalid values.
inline void check_config(const LearnConfig& c) {
  auto fail = [](const std::string& what) { throw config_error("invalid config: " + what); };
  if (c.L < 1) fail("L must be at least 1");
  if (c.L > 4096) fail("L must not exceed 4096");
  if (c.m < 1) fail("m must be at least 1");
  if (c.l < 1) fail("l must be at least 1");
  if (c.set_size < 1) fail("S_size must be at least 1");
  if (c.pair_count < 1) fail("P_size must be at least 1");
  if (c.n_t < 1) fail("n_t must be at least 1");
  if (c.n_n < 1) fail("n_n must be at least 1");
  if (c.n_r > c.n_n) fail("n_r must not exceed n_n");
  if (c.n_n > c.pair_count) fail("n_n must not exceed P_size");
  if (!(c.min_minority >= 0.0 && c.min_minority < 0.5)) fail("min_minority must lie in [0, 0.5)");
}

/// A ≪ B is read as 10·A ≤ B.
inline constexpr double much_less_factor = 10.0;

/// Sizing heuristics at target resolution `epsilon` pixels. Each violated
/// rule yields one warning quoting the rule. Never throws.
inline std::vector<std::string> validate_config(const LearnConfig& c, double epsilon = 2.0) {
  std::vector<std::string> warnings;
  auto warn = [&](std::string_view rule, double lhs, double rhs) {
    std::ostringstream os;
    os << "heuristic |" << rule << "| violated: " << lhs << " vs " << rhs;
    warnings.push_back(os.str());
  };
  const double L = double(c.L);
  const double per_res = L / epsilon;
  const double s_need = per_res * per_res * per_res;
  if (double(c.set_size) < s_need) warn("|S| >= (L/eps)^3", double(c.set_size), s_need);
  if (double(c.pair_count) < per_res) warn("|P| >= L/eps", double(c.pair_count), per_res);
  const double l4 = L * L * L * L;
  if (much_less_factor * double(c.n_t) > l4) warn("n_t << L^4", double(c.n_t), l4);
  if (much_less_factor * double(c.n_n) > double(c.pair_count))
    warn("n_n << |P|", double(c.n_n), double(c.pair_count));
  if (c.n_r == 0) {
    warn("n_i >> |P|/n_r", double(c.n_i), INFINITY);
  } else {
    const double renew = double(c.pair_count) / double(c.n_r);
    if (double(c.n_i) < much_less_factor * renew) warn("n_i >> |P|/n_r", double(c.n_i), renew);
  }
  if (much_less_factor * double(c.n_r) > double(c.n_n)) warn("n_r << n_n", double(c.n_r), double(c.n_n));
  return warnings;
}

namespace presets {

inline LearnConfig paper_triangles() {
  LearnConfig c;
  c.L = 64;
  c.m = 5;
  c.l = 10;
  c.set_size = 30000;
  c.pair_count = 200;
  c.n_t = 10000;
  c.n_n = 10;
  c.n_r = 1;
  c.n_i = 3000;
  return c;
}

inline LearnConfig paper_patches() {
  LearnConfig c;
  c.L = 64;
  c.m = 5;
  c.l = 10;
  c.set_size = 200000;
  c.pair_count = 1000;
  c.n_t = 10000;
  c.n_n = 20;
  c.n_r = 1;
  c.n_i = 5000;
  return c;
}

inline LearnConfig desk() {
  LearnConfig c;
  c.L = 16;
  c.m = 5;
  c.l = 10;
  c.set_size = 2000;
  c.pair_count = 64;
  c.n_t = 2048;
  c.n_n = 8;
  c.n_r = 1;
  c.n_i = 600;
  return c;
}

inline LearnConfig by_name(std::string_view name) {
  if (name == "paper-triangles") return paper_triangles();
  if (name == "paper-patches") return paper_patches();
  if (name == "desk") return desk();
  throw config_error("unknown preset: " + std::string(name));
}

}  // namespace presets
}  // namespace permlearn

#endif  // PERMLEARN_CONFIG_HPP
