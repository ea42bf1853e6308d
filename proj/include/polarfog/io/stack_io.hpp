#pragma once

#include <filesystem>

#include "polarfog/core/image.hpp"

namespace polarfog::io {

/// Persist a volume for debugging: one 16-bit PGM per layer (layer_0000.pgm,
/// ...) plus meta.txt with layers=, rows=, cols=, dt= lines. Sample values are
/// mapped affinely from the volume's [min,max] (recorded as vmin=/vmax=).
void save_stack(const std::filesystem::path& dir, const ImageStack& stack);

/// Load a volume written by save_stack, undoing the affine mapping.
ImageStack load_stack(const std::filesystem::path& dir);

}  // namespace polarfog::io
