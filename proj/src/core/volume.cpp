#include "polarfog/core/volume.hpp"

#include <algorithm>

namespace polarfog {

ImageStack pad_replicate_3d(const ImageStack& stack, int pad_t, int pad_r, int pad_c) {
    if (pad_t < 0 || pad_r < 0 || pad_c < 0)
        throw std::invalid_argument("pad_replicate_3d: pads must be >= 0");
    if (pad_t == 0 && pad_r == 0 && pad_c == 0) return stack;

    ImageStack out(stack.layers() + 2 * pad_t, stack.rows() + 2 * pad_r,
                   stack.cols() + 2 * pad_c, 0.0, stack.dt());
    const int L = stack.layers(), R = stack.rows(), C = stack.cols();
    for (int l = 0; l < out.layers(); ++l) {
        const int sl = std::clamp(l - pad_t, 0, L - 1);
        for (int r = 0; r < out.rows(); ++r) {
            const int sr = std::clamp(r - pad_r, 0, R - 1);
            for (int c = 0; c < out.cols(); ++c) {
                const int sc = std::clamp(c - pad_c, 0, C - 1);
                out.at(l, r, c) = stack.at(sl, sr, sc);
            }
        }
    }
    return out;
}

ImageStack crop_3d(const ImageStack& stack, int pad_t, int pad_r, int pad_c) {
    if (pad_t < 0 || pad_r < 0 || pad_c < 0)
        throw std::invalid_argument("crop_3d: pads must be >= 0");
    const int L = stack.layers() - 2 * pad_t;
    const int R = stack.rows() - 2 * pad_r;
    const int C = stack.cols() - 2 * pad_c;
    if (L < 1 || R < 1 || C < 1)
        throw std::invalid_argument("crop_3d: crop exceeds volume dimensions");
    if (pad_t == 0 && pad_r == 0 && pad_c == 0) return stack;

    ImageStack out(L, R, C, 0.0, stack.dt());
    for (int l = 0; l < L; ++l)
        for (int r = 0; r < R; ++r)
            for (int c = 0; c < C; ++c)
                out.at(l, r, c) = stack.at(l + pad_t, r + pad_r, c + pad_c);
    return out;
}

ImageStack slice_time(const ImageStack& stack, int begin, int count) {
    if (begin < 0 || count < 1 || begin + count > stack.layers())
        throw std::invalid_argument("slice_time: range out of bounds");
    ImageStack out(count, stack.rows(), stack.cols(), 0.0, stack.dt());
    const size_t plane = static_cast<size_t>(stack.rows()) * stack.cols();
    std::copy(stack.layer_data(begin), stack.layer_data(begin) + plane * count, out.data());
    return out;
}

}  // namespace polarfog
