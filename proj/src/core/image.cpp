#include "polarfog/core/image.hpp"

#include <algorithm>

namespace polarfog {

double min_value(const GrayImage& img) {
    return *std::min_element(img.samples().begin(), img.samples().end());
}

double max_value(const GrayImage& img) {
    return *std::max_element(img.samples().begin(), img.samples().end());
}

double mean_value(const GrayImage& img) {
    double sum = 0.0;
    for (double v : img.samples()) sum += v;
    return sum / static_cast<double>(img.size());
}

GrayImage normalize_to_unit(const GrayImage& img) {
    const double lo = min_value(img);
    const double hi = max_value(img);
    GrayImage out(img.rows(), img.cols());
    if (hi <= lo) return out;  // constant image -> all zeros
    const double scale = 1.0 / (hi - lo);
    for (size_t i = 0; i < img.size(); ++i)
        out.samples()[i] = (img.samples()[i] - lo) * scale;
    return out;
}

}  // namespace polarfog
