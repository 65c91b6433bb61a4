#ifndef PERMLEARN_PNM_HPP
#define PERMLEARN_PNM_HPP

// Netpbm readers and writers: P4 bitmaps for binary images, P5 graymaps for
// montages, and P1/P2/P3/P5/P6 input for grayscale ingestion.
//
// PBM stores 1 for black. BitImage stores 1 for white, so bits are inverted
// on the way in and out; a P4 file written here displays white-on-black the
// same way the in-memory image reads.

#include <cctype>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "permlearn/errors.hpp"
#include "permlearn/image.hpp"

namespace permlearn::pnm {

namespace detail {

inline void skip_space_and_comments(std::istream& in) {
  for (;;) {
    const int c = in.peek();
    if (c == '#') {
      std::string line;
      std::getline(in, line);
    } else if (c != EOF && std::isspace(c)) {
      in.get();
    } else {
      return;
    }
  }
}

inline std::size_t read_header_int(std::istream& in) {
  skip_space_and_comments(in);
  std::size_t v = 0;
  bool any = false;
  while (std::isdigit(in.peek())) {
    v = v * 10 + std::size_t(in.get() - '0');
    any = true;
  }
  if (!any) throw io_error("pnm: malformed header");
  return v;
}

// Exactly one whitespace byte separates the header from raster data.
inline void end_header(std::istream& in) {
  const int c = in.get();
  if (c == EOF || !std::isspace(c)) throw io_error("pnm: malformed header terminator");
}

inline std::string read_magic(std::istream& in) {
  skip_space_and_comments(in);
  char m[2];
  if (!in.read(m, 2) || m[0] != 'P') throw io_error("pnm: missing magic number");
  return std::string(m, 2);
}

inline std::uint8_t scale_sample(std::size_t value, std::size_t maxval) {
  if (maxval == 255) return static_cast<std::uint8_t>(value);
  return static_cast<std::uint8_t>((value * 255 + maxval / 2) / maxval);
}

inline std::size_t read_binary_sample(std::istream& in, std::size_t maxval) {
  if (maxval < 256) {
    const int c = in.get();
    if (c == EOF) throw io_error("pnm: truncated raster");
    return std::size_t(c);
  }
  const int hi = in.get();
  const int lo = in.get();
  if (lo == EOF) throw io_error("pnm: truncated raster");
  return std::size_t(hi) << 8 | std::size_t(lo);
}

}  // namespace detail

inline void write_pbm(std::ostream& out, const BinaryRaster& r) {
  out << "P4\n" << r.width << ' ' << r.height << '\n';
  const std::size_t row_bytes = (r.width + 7) / 8;
  std::string row(row_bytes, '\0');
  for (std::size_t v = 0; v < r.height; ++v) {
    std::fill(row.begin(), row.end(), '\0');
    for (std::size_t u = 0; u < r.width; ++u) {
      if (!r.at(u, v)) row[u / 8] = char(std::uint8_t(row[u / 8]) | (0x80u >> (u % 8)));
    }
    out.write(row.data(), std::streamsize(row_bytes));
  }
  if (!out) throw io_error("pnm: write failed");
}

inline void write_pbm(std::ostream& out, const BitImage& img) { write_pbm(out, to_raster(img)); }

/// Reads one P1 or P4 image from the stream; leaves the stream after it so
/// concatenated multi-image files can be read in a loop.
inline BinaryRaster read_pbm(std::istream& in) {
  const std::string magic = detail::read_magic(in);
  if (magic != "P4" && magic != "P1") throw io_error("pnm: expected P1 or P4 bitmap, got " + magic);
  const std::size_t width = detail::read_header_int(in);
  const std::size_t height = detail::read_header_int(in);
  BinaryRaster r(width, height);
  if (magic == "P4") {
    detail::end_header(in);
    const std::size_t row_bytes = (r.width + 7) / 8;
    std::string row(row_bytes, '\0');
    for (std::size_t v = 0; v < r.height; ++v) {
      if (!in.read(row.data(), std::streamsize(row_bytes))) throw io_error("pnm: truncated P4 raster");
      for (std::size_t u = 0; u < r.width; ++u) {
        const bool black = (std::uint8_t(row[u / 8]) >> (7 - u % 8)) & 1u;
        r.set(u, v, !black);
      }
    }
  } else {
    for (std::size_t i = 0; i < r.width * r.height; ++i) {
      detail::skip_space_and_comments(in);
      const int c = in.get();
      if (c != '0' && c != '1') throw io_error("pnm: malformed P1 raster");
      r.bits.set(i, c == '0');
    }
  }
  return r;
}

inline BitImage to_bit_image(BinaryRaster r) {
  if (r.width != r.height) throw io_error("pnm: binary image is not square");
  return BitImage(r.width, std::move(r.bits));
}

inline void write_pgm(std::ostream& out, const GrayImage& g) {
  out << "P5\n" << g.width << ' ' << g.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(g.values.data()), std::streamsize(g.values.size()));
  if (!out) throw io_error("pnm: write failed");
}

/// Reads any of P1-P6 as an 8-bit grayscale image. Color is reduced by luma.
inline GrayImage read_gray(std::istream& in) {
  const std::string magic = detail::read_magic(in);
  if (magic == "P1" || magic == "P4") {
    in.seekg(-2, std::ios::cur);
    return to_gray(read_pbm(in));
  }
  const bool ascii = magic == "P2" || magic == "P3";
  const bool color = magic == "P3" || magic == "P6";
  if (magic != "P2" && magic != "P3" && magic != "P5" && magic != "P6") {
    throw io_error("pnm: unsupported format " + magic);
  }
  const std::size_t w = detail::read_header_int(in);
  const std::size_t h = detail::read_header_int(in);
  const std::size_t maxval = detail::read_header_int(in);
  if (w == 0 || h == 0 || maxval == 0 || maxval > 65535) throw io_error("pnm: invalid header values");
  if (!ascii) detail::end_header(in);
  GrayImage g(w, h);
  auto sample = [&]() -> std::uint8_t {
    const std::size_t s = ascii ? detail::read_header_int(in) : detail::read_binary_sample(in, maxval);
    return detail::scale_sample(std::min(s, maxval), maxval);
  };
  for (auto& px : g.values) {
    if (color) {
      const auto r = sample();
      const auto gr = sample();
      const auto b = sample();
      px = luma(r, gr, b);
    } else {
      px = sample();
    }
  }
  return g;
}

inline void save_pbm(const std::filesystem::path& path, const BitImage& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot open for writing: " + path.string());
  write_pbm(out, img);
}

inline void save_pgm(const std::filesystem::path& path, const GrayImage& g) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot open for writing: " + path.string());
  write_pgm(out, g);
}

inline BitImage load_pbm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open: " + path.string());
  return to_bit_image(read_pbm(in));
}

inline GrayImage load_gray(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open: " + path.string());
  return read_gray(in);
}

}  // namespace permlearn::pnm

#endif  // PERMLEARN_PNM_HPP
