#ifndef PERMLEARN_RENDER_HPP
#define PERMLEARN_RENDER_HPP

#include <cstddef>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "permlearn/errors.hpp"
#include "permlearn/image.hpp"
#include "permlearn/permutation.hpp"
#include "permlearn/pnm.hpp"

namespace permlearn {

/// Pixel (u, v) is white iff floor(u/check) + floor(v/check) is even.
inline BitImage checkerboard(std::size_t side, std::size_t check) {
  if (check < 1 || check > side) throw contract_error("checkerboard: check size must lie in [1, side]");
  BitImage img(side);
  for (std::size_t v = 0; v < side; ++v)
    for (std::size_t u = 0; u < side; ++u)
      if ((u / check + v / check) % 2 == 0) img.set(u, v);
  return img;
}

inline BitImage apply(const Permutation& t, const BitImage& img) {
  return BitImage(img.side(), permute(img.bits(), t));
}

/// Grayscale images are permuted the same way, value by value.
inline GrayImage apply(const Permutation& t, const GrayImage& img) {
  detail::require(img.values.size() == t.size(), "apply: size mismatch");
  GrayImage out(img.width, img.height);
  for (std::size_t i = 0; i < t.size(); ++i) out.values[i] = img.values[t[i]];
  return out;
}

inline constexpr std::size_t montage_gap = 2;
inline constexpr std::uint8_t montage_gap_value = 128;

/// before | gray gap | after, side by side.
inline GrayImage montage(const GrayImage& before, const GrayImage& after) {
  detail::require(before.height == after.height, "montage: height mismatch");
  GrayImage m(before.width + montage_gap + after.width, before.height, montage_gap_value);
  for (std::size_t v = 0; v < m.height; ++v) {
    for (std::size_t u = 0; u < before.width; ++u) m.at(u, v) = before.at(u, v);
    for (std::size_t u = 0; u < after.width; ++u) m.at(before.width + montage_gap + u, v) = after.at(u, v);
  }
  return m;
}

struct PatternSpec {
  enum class Kind { checkerboard, file };
  Kind kind = Kind::checkerboard;
  std::size_t check_size = 8;
  std::filesystem::path path;  // for Kind::file

  static PatternSpec checks(std::size_t size) { return PatternSpec{Kind::checkerboard, size, {}}; }
  static PatternSpec file(std::filesystem::path p) { return PatternSpec{Kind::file, 0, std::move(p)}; }

  std::string name() const {
    return kind == Kind::checkerboard ? "check" + std::to_string(check_size) : path.stem().string();
  }
};

/// Check sizes 32, 16, 8, 4, 2 (those not exceeding side).
inline std::vector<PatternSpec> standard_patterns(std::size_t side) {
  std::vector<PatternSpec> out;
  for (std::size_t c : {32u, 16u, 8u, 4u, 2u})
    if (c <= side) out.push_back(PatternSpec::checks(c));
  return out;
}

/// Writes <id>_<pattern>.pgm (the transformed pattern) and
/// <id>_<pattern>_montage.pgm for each pattern. Checkerboards and bitmap
/// files are written as P4; grayscale files as P5. Returns the paths written.
inline std::vector<std::filesystem::path> render_transform(const Permutation& t,
                                                           const std::vector<PatternSpec>& patterns,
                                                           const std::filesystem::path& out_dir,
                                                           const std::string& id) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw io_error("render_transform: cannot create " + out_dir.string());
  std::vector<std::filesystem::path> written;
  for (const auto& spec : patterns) {
    const std::string stem = id + "_" + spec.name();
    const auto out_path = out_dir / (stem + ".pgm");
    const auto montage_path = out_dir / (stem + "_montage.pgm");
    bool binary = spec.kind == PatternSpec::Kind::checkerboard;
    GrayImage before_gray;
    BitImage before_bits;
    if (binary) {
      before_bits = checkerboard(std::size_t(std::lround(std::sqrt(double(t.size())))), spec.check_size);
    } else {
      std::ifstream in(spec.path, std::ios::binary);
      if (!in) throw io_error("render_transform: cannot open " + spec.path.string());
      const std::string magic{char(in.get()), char(in.get())};
      in.seekg(0);
      binary = magic == "P1" || magic == "P4";
      if (binary) {
        before_bits = pnm::to_bit_image(pnm::read_pbm(in));
      } else {
        before_gray = pnm::read_gray(in);
      }
    }
    if (binary) {
      detail::require(before_bits.pixel_count() == t.size(), "render_transform: pattern size mismatch");
      const BitImage after = apply(t, before_bits);
      pnm::save_pbm(out_path, after);
      pnm::save_pgm(montage_path, montage(to_gray(to_raster(before_bits)), to_gray(to_raster(after))));
    } else {
      detail::require(before_gray.values.size() == t.size() && before_gray.width == before_gray.height,
                      "render_transform: pattern size mismatch");
      const GrayImage after = apply(t, before_gray);
      pnm::save_pgm(out_path, after);
      pnm::save_pgm(montage_path, montage(before_gray, after));
    }
    written.push_back(out_path);
    written.push_back(montage_path);
  }
  return written;
}

/// CSV rows "src_u,src_v,dst_u,dst_v" in pixel-center coordinates, one per pixel.
inline void write_displacement_csv(const std::filesystem::path& path, const Permutation& t, std::size_t side) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot open for writing: " + path.string());
  out << "src_u,src_v,dst_u,dst_v\n";
  for (std::size_t i = 0; i < t.size(); ++i) {
    out << double(t[i] % side) + 0.5 << ',' << double(t[i] / side) + 0.5 << ',' << double(i % side) + 0.5 << ','
        << double(i / side) + 0.5 << '\n';
  }
}

}  // namespace permlearn

#endif  // PERMLEARN_RENDER_HPP
