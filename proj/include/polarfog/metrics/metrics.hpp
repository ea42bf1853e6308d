#pragma once

#include <cstdint>
#include <vector>

#include "polarfog/core/image.hpp"

namespace polarfog::metrics {

/// Raw 3x3 Sobel gradient magnitude, edge-replicated borders.
GrayImage sobel_magnitude(const GrayImage& img);

struct EdgeMask {
    std::vector<uint8_t> mask;  // 1 where the pixel is a visible edge
    long count = 0;
    int rows = 0, cols = 0;
};

/// Pixels whose Sobel magnitude is >= threshold * (max - min) of the image.
EdgeMask visible_edges(const GrayImage& img, double threshold);

/// Rate of new visible edges, (n_r - n_o) / n_o. Undefined when the original
/// has none (throws).
double metric_e(const GrayImage& original, const GrayImage& restored, double threshold);

/// Geometric mean of gradient ratios restored/original over the restored
/// image's visible edges; pixels with original gradient < 1e-9 are excluded
/// (count reported through `excluded` when given). Undefined on an empty edge
/// set (throws).
double metric_rbar(const GrayImage& original, const GrayImage& restored, double threshold,
                   long* excluded = nullptr);

/// Fraction of pixels saturated (black or full-scale) in the restored image
/// but strictly interior in the original.
double metric_sigma(const GrayImage& original, const GrayImage& restored);

/// Population standard deviation, reported on the 8-bit scale (x255).
double metric_sd(const GrayImage& img);

/// Mean of sqrt((dx^2 + dy^2)/2) with forward differences, on the 8-bit scale.
double metric_ag(const GrayImage& img);

struct MetricsReport {
    double e = 0.0;
    double r_bar = 0.0;
    double sigma = 0.0;
    double sd = 0.0;   // of the restored image
    double ag = 0.0;   // of the restored image
    long n_o = 0;
    long n_r = 0;
    long n_s = 0;
    long rbar_excluded = 0;
    double threshold = 0.0;
};

MetricsReport compute_metrics(const GrayImage& original, const GrayImage& restored,
                              double threshold = 0.05);

}  // namespace polarfog::metrics
