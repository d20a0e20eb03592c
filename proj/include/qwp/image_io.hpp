#pragma once

#include "qwp/grid.hpp"

#include <cstdint>
#include <filesystem>
#include <vector>

namespace qwp {

/// Binary PGM (P5). 16-bit files are rescaled to the 0..255 range.
ImageGrid read_pgm(const std::filesystem::path& path);

/// Writes round(clamp(v, 0, 255)) as 8-bit P5.
void write_pgm(const std::filesystem::path& path, const ImageGrid& image);

/// PNG converted to 8-bit grayscale.
ImageGrid read_png(const std::filesystem::path& path);

/// Dispatches on the file signature (P5 or PNG).
ImageGrid read_image(const std::filesystem::path& path);

/// round(clamp(v, 0, 255)) per pixel, row-major.
std::vector<std::uint8_t> to_8bit(const ImageGrid& image);

/// True for .pgm and .png file names (case-insensitive).
bool is_supported_image(const std::filesystem::path& path);

}  // namespace qwp
