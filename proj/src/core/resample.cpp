#include "polarfog/core/resample.hpp"

#include <algorithm>
#include <cmath>

namespace polarfog {

namespace {

inline double axis_scale(int src, int dst) {
    return dst > 1 ? static_cast<double>(src - 1) / static_cast<double>(dst - 1) : 0.0;
}

inline int clampi(int v, int lo, int hi) { return std::max(lo, std::min(hi, v)); }

}  // namespace

GrayImage resample(const GrayImage& img, int new_rows, int new_cols, ResampleMethod method) {
    if (img.empty()) throw std::invalid_argument("resample: empty image");
    if (new_rows < 1 || new_cols < 1)
        throw std::invalid_argument("resample: target dimensions must be >= 1");

    if (new_rows == img.rows() && new_cols == img.cols() &&
        method == ResampleMethod::kBilinear) {
        return img;  // identity resample is bit-exact
    }

    GrayImage out(new_rows, new_cols);
    const double sr = axis_scale(img.rows(), new_rows);
    const double sc = axis_scale(img.cols(), new_cols);

    if (method == ResampleMethod::kNearest) {
        for (int r = 0; r < new_rows; ++r) {
            const int src_r = clampi(static_cast<int>(std::lround(r * sr)), 0, img.rows() - 1);
            for (int c = 0; c < new_cols; ++c) {
                const int src_c =
                    clampi(static_cast<int>(std::lround(c * sc)), 0, img.cols() - 1);
                out.at(r, c) = img.at(src_r, src_c);
            }
        }
        return out;
    }

    for (int r = 0; r < new_rows; ++r) {
        const double y = r * sr;
        const int y0 = clampi(static_cast<int>(std::floor(y)), 0, img.rows() - 1);
        const int y1 = clampi(y0 + 1, 0, img.rows() - 1);
        const double fy = y - std::floor(y);
        for (int c = 0; c < new_cols; ++c) {
            const double x = c * sc;
            const int x0 = clampi(static_cast<int>(std::floor(x)), 0, img.cols() - 1);
            const int x1 = clampi(x0 + 1, 0, img.cols() - 1);
            const double fx = x - std::floor(x);
            const double top = img.at(y0, x0) * (1.0 - fx) + img.at(y0, x1) * fx;
            const double bot = img.at(y1, x0) * (1.0 - fx) + img.at(y1, x1) * fx;
            out.at(r, c) = top * (1.0 - fy) + bot * fy;
        }
    }
    return out;
}

}  // namespace polarfog
