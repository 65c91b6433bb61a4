#include "png_input.hpp"

#include <png.h>

#include <cstring>
#include <string>
#include <vector>

#include "permlearn/errors.hpp"

namespace permlearn::tools {

GrayImage load_png_gray(const std::filesystem::path& path) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.c_str()))
    throw io_error("cannot decode PNG " + path.string() + ": " + image.message);
  image.format = PNG_FORMAT_RGB;
  if (image.width == 0 || image.height == 0) {
    png_image_free(&image);
    throw io_error("empty PNG " + path.string());
  }
  std::vector<std::uint8_t> rgb(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, rgb.data(), 0, nullptr)) {
    const std::string msg = image.message;
    png_image_free(&image);
    throw io_error("cannot decode PNG " + path.string() + ": " + msg);
  }
  GrayImage g(image.width, image.height);
  for (std::size_t i = 0; i < g.values.size(); ++i) g.values[i] = luma(rgb[3 * i], rgb[3 * i + 1], rgb[3 * i + 2]);
  return g;
}

}  // namespace permlearn::tools
