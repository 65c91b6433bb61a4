#ifndef PERMLEARN_TOOLS_PNG_INPUT_HPP
#define PERMLEARN_TOOLS_PNG_INPUT_HPP

#include <filesystem>

#include "permlearn/image.hpp"

namespace permlearn::tools {

/// Decodes any PNG to 8-bit luma (0.299 R + 0.587 G + 0.114 B). Throws io_error on failure.
GrayImage load_png_gray(const std::filesystem::path& path);

}  // namespace permlearn::tools

#endif
