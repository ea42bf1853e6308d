#pragma once

#include <filesystem>
#include <string>

#include "polarfog/core/image.hpp"

namespace polarfog::io {

/// Load a PNG (8/16-bit gray; color reduced by channel average) or binary PGM
/// (P5, 8/16-bit). With normalize set, samples are divided by the format's max
/// value so full scale maps to 1.0; otherwise raw counts are kept.
GrayImage load_image(const std::filesystem::path& path, bool normalize = true);

/// Write a 16-bit grayscale PNG, mapping [vmin,vmax] affinely onto [0,65535]
/// with clamping. Writes go to a temp name in the same directory, then rename.
void save_png16(const std::filesystem::path& path, const GrayImage& img,
                double vmin = 0.0, double vmax = 1.0);

/// Write a binary PGM (P5, maxval 65535) with the same affine mapping.
void save_pgm16(const std::filesystem::path& path, const GrayImage& img,
                double vmin = 0.0, double vmax = 1.0);

/// Dispatch on extension: .png / .pgm.
void save_image(const std::filesystem::path& path, const GrayImage& img,
                double vmin = 0.0, double vmax = 1.0);

/// Atomic text-file write (temp name + rename).
void write_text_atomic(const std::filesystem::path& path, const std::string& contents);

}  // namespace polarfog::io
