#pragma once

#include "polarfog/core/image.hpp"

namespace polarfog::histmatch {

/// Classic CDF-inversion histogram matching: each source bin maps to the
/// smallest reference bin whose CDF reaches the source CDF (ties toward the
/// smallest value). Bin representatives are the mean of the reference samples
/// falling in the bin. Samples are binned on [0,1] with clamping.
GrayImage match_histogram(const GrayImage& src, const GrayImage& ref, int bins = 256);

}  // namespace polarfog::histmatch
