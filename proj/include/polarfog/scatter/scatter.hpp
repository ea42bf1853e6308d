#pragma once

#include "polarfog/core/image.hpp"

namespace polarfog::scatter {

/// Single-scattering haze model parameters: per-pixel transmittance is
/// exp(-beta * z) with z taken from the depth map.
struct ScatterParams {
    double beta = 1.0;    // attenuation coefficient, > 0
    double a_inf = 1.0;   // atmospheric light at infinity, in (0,1]
    GrayImage depth;      // per-pixel distance, >= 0

    void validate() const;
};

struct HazyScene {
    GrayImage hazy;      // I = L*t + A
    GrayImage airlight;  // A = a_inf * (1 - t)
};

/// Forward synthesis: attenuate the scene by transmittance and add airlight.
HazyScene synth_haze(const GrayImage& scene, const ScatterParams& params);

struct InversionReport {
    long floored = 0;  // pixels with transmittance below the floor, passed through
};

/// Exact inversion L = (I - A) / (1 - A/a_inf). Pixels whose implied
/// transmittance falls below t_floor keep their hazy value and are counted.
GrayImage invert_haze(const GrayImage& hazy, const GrayImage& airlight, double a_inf,
                      InversionReport* report = nullptr, double t_floor = 1e-6);

/// Depth ramp from 0 to max_z, increasing along columns (axis 0) or rows (axis 1).
GrayImage make_ramp_depth(int rows, int cols, double max_z, int axis = 0);

/// Two-level depth map: near_z on the left/top half, far_z on the other half.
GrayImage make_step_depth(int rows, int cols, double near_z, double far_z, int axis = 0);

}  // namespace polarfog::scatter
