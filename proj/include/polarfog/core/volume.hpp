#pragma once

#include "polarfog/core/image.hpp"

namespace polarfog {

/// Grow the volume by pad_t/pad_r/pad_c on both ends of each axis, filling the
/// new voxels with the nearest edge voxel.
ImageStack pad_replicate_3d(const ImageStack& stack, int pad_t, int pad_r, int pad_c);

/// Inverse of pad_replicate_3d: strip pad_t/pad_r/pad_c voxels from both ends
/// of each axis.
ImageStack crop_3d(const ImageStack& stack, int pad_t, int pad_r, int pad_c);

/// Keep `count` layers starting at `begin`.
ImageStack slice_time(const ImageStack& stack, int begin, int count);

}  // namespace polarfog
