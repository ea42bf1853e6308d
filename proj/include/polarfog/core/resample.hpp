#pragma once

#include "polarfog/core/image.hpp"

namespace polarfog {

enum class ResampleMethod { kNearest, kBilinear };

/// Resize to (new_rows, new_cols). Coordinates map corner-to-corner
/// (src = dst * (S-1)/(D-1)), samples clamped at the edges. A target axis of
/// length 1 samples the source at index 0.
GrayImage resample(const GrayImage& img, int new_rows, int new_cols,
                   ResampleMethod method = ResampleMethod::kBilinear);

}  // namespace polarfog
