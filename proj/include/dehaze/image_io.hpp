#pragma once

#include <filesystem>

#include "dehaze/image.hpp"

namespace dehaze {

/// Loads an 8/16-bit PNG, binary PPM (P6), PGM (P5) or PFM file. Integer
/// samples are divided by the format's maximum value; PFM samples are
/// returned as stored. Alpha channels are dropped, palettes expanded.
///
/// Throws IoError when the file cannot be read and FormatError for
/// unsupported content.
Image load_image(const std::filesystem::path& path);

/// Writes an 8-bit PNG or binary PNM chosen by the extension (.png/.ppm/.pgm),
/// or a PFM when the extension is .pfm. Samples are clamped to [0, 1] and
/// rounded to the nearest code value.
void save_image(const Image& img, const std::filesystem::path& path);

/// 16-bit PNG writer, used for depth maps and lossless debugging output.
void save_png16(const Image& img, const std::filesystem::path& path);

}  // namespace dehaze
