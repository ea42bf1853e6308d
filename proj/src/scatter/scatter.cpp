#include "polarfog/scatter/scatter.hpp"

#include <cmath>

namespace polarfog::scatter {

void ScatterParams::validate() const {
    if (!(beta > 0.0)) throw std::invalid_argument("ScatterParams: beta must be > 0");
    if (!(a_inf > 0.0) || a_inf > 1.0)
        throw std::invalid_argument("ScatterParams: a_inf must be in (0,1]");
    for (double z : depth.samples())
        if (!(z >= 0.0)) throw std::invalid_argument("ScatterParams: depth must be >= 0");
}

HazyScene synth_haze(const GrayImage& scene, const ScatterParams& params) {
    params.validate();
    if (!scene.same_dims(params.depth))
        throw std::invalid_argument("synth_haze: scene and depth dimension mismatch");

    HazyScene out{GrayImage(scene.rows(), scene.cols()), GrayImage(scene.rows(), scene.cols())};
    for (size_t i = 0; i < scene.size(); ++i) {
        const double t = std::exp(-params.beta * params.depth.samples()[i]);
        const double a = params.a_inf * (1.0 - t);
        out.airlight.samples()[i] = a;
        out.hazy.samples()[i] = scene.samples()[i] * t + a;
    }
    return out;
}

GrayImage invert_haze(const GrayImage& hazy, const GrayImage& airlight, double a_inf,
                      InversionReport* report, double t_floor) {
    if (!(a_inf > 0.0)) throw std::invalid_argument("invert_haze: a_inf must be > 0");
    if (!hazy.same_dims(airlight))
        throw std::invalid_argument("invert_haze: image and airlight dimension mismatch");

    GrayImage out(hazy.rows(), hazy.cols());
    InversionReport stats;
    for (size_t i = 0; i < hazy.size(); ++i) {
        const double a = airlight.samples()[i];
        const double t = 1.0 - a / a_inf;
        if (t <= t_floor) {
            out.samples()[i] = hazy.samples()[i];
            ++stats.floored;
            continue;
        }
        out.samples()[i] = (hazy.samples()[i] - a) / t;
    }
    if (report) *report = stats;
    return out;
}

GrayImage make_ramp_depth(int rows, int cols, double max_z, int axis) {
    GrayImage depth(rows, cols);
    const int span = axis == 0 ? cols : rows;
    const double step = span > 1 ? max_z / (span - 1) : 0.0;
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c)
            depth.at(r, c) = step * (axis == 0 ? c : r);
    return depth;
}

GrayImage make_step_depth(int rows, int cols, double near_z, double far_z, int axis) {
    GrayImage depth(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
            const bool far_half = (axis == 0 ? c >= cols / 2 : r >= rows / 2);
            depth.at(r, c) = far_half ? far_z : near_z;
        }
    return depth;
}

}  // namespace polarfog::scatter
