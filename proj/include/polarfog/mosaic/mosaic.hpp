#pragma once

#include <array>
#include <string>

#include "polarfog/core/image.hpp"

namespace polarfog::mosaic {

/// Assignment of polarizer angles to the four positions of a 2x2 superpixel.
/// Positions are ordered top-left, top-right, bottom-left, bottom-right; the
/// angles must be a permutation of {0, 45, 90, 135}.
struct MosaicLayout {
    std::array<int, 4> angles{90, 45, 135, 0};  // Sony IMX250MZR convention

    void validate() const;
    /// Superpixel position (0..3) carrying the given angle.
    int position_of(int angle) const;
};

/// Parse "90,45,135,0" (TL,TR,BL,BR order).
MosaicLayout parse_layout(const std::string& text);

/// Angle components plus derived Stokes/DOLP/AOLP planes. demosaic fills the
/// angle planes; the other planes stay empty until computed.
struct PolarFrame {
    GrayImage i0, i45, i90, i135;
    GrayImage s0, s1, s2;
    GrayImage dolp;
    GrayImage aolp;
};

struct DolpReport {
    long degenerate = 0;  // pixels with s0 <= epsilon, emitted as 0
    long clamped = 0;     // pixels clamped into [0,1]
};

/// Split a raw division-of-focal-plane mosaic into its four angle planes, each
/// (rows/2, cols/2), by direct extraction (no interpolation). Both raw
/// dimensions must be even.
PolarFrame demosaic(const GrayImage& raw, const MosaicLayout& layout = {});

/// Reassemble the raw mosaic from the angle planes (exact inverse of demosaic).
GrayImage remosaic(const PolarFrame& frame, const MosaicLayout& layout = {});

/// Fill s0 = i0+i90, s1 = i0-i90, s2 = i45-i135 pointwise.
void compute_stokes(PolarFrame& frame);

/// sqrt(s1^2+s2^2)/s0 clamped to [0,1]; pixels with s0 <= epsilon yield 0 and
/// are counted as degenerate.
GrayImage compute_dolp(const PolarFrame& frame, DolpReport* report = nullptr,
                       double epsilon = 1e-6);

/// 0.5 * atan2(s2, s1), radians in (-pi/2, pi/2].
GrayImage compute_aolp(const PolarFrame& frame);

/// demosaic + stokes + dolp + aolp in one pass.
PolarFrame process_mosaic(const GrayImage& raw, const MosaicLayout& layout = {},
                          DolpReport* report = nullptr);

}  // namespace polarfog::mosaic
