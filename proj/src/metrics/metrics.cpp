#include "polarfog/metrics/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace polarfog::metrics {

namespace {

constexpr double kSaturationEps = 1.0 / (2.0 * 65535.0);  // half a 16-bit step
constexpr double kGradientEps = 1e-9;

void require_same_dims(const GrayImage& a, const GrayImage& b, const char* op) {
    if (!a.same_dims(b))
        throw std::invalid_argument(std::string(op) + ": dimension mismatch");
}

}  // namespace

GrayImage sobel_magnitude(const GrayImage& img) {
    if (img.empty()) throw std::invalid_argument("sobel_magnitude: empty image");
    const int rows = img.rows(), cols = img.cols();
    GrayImage out(rows, cols);
    auto px = [&](int r, int c) {
        return img.at(std::clamp(r, 0, rows - 1), std::clamp(c, 0, cols - 1));
    };
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            const double gx = (px(r - 1, c + 1) + 2.0 * px(r, c + 1) + px(r + 1, c + 1)) -
                              (px(r - 1, c - 1) + 2.0 * px(r, c - 1) + px(r + 1, c - 1));
            const double gy = (px(r + 1, c - 1) + 2.0 * px(r + 1, c) + px(r + 1, c + 1)) -
                              (px(r - 1, c - 1) + 2.0 * px(r - 1, c) + px(r - 1, c + 1));
            out.at(r, c) = std::sqrt(gx * gx + gy * gy);
        }
    }
    return out;
}

EdgeMask visible_edges(const GrayImage& img, double threshold) {
    if (threshold < 0.0) throw std::invalid_argument("visible_edges: threshold must be >= 0");
    const GrayImage grad = sobel_magnitude(img);
    const double range = max_value(img) - min_value(img);
    const double cut = threshold * range;

    EdgeMask edges;
    edges.rows = img.rows();
    edges.cols = img.cols();
    edges.mask.assign(img.size(), 0);
    for (size_t i = 0; i < grad.size(); ++i) {
        const double g = grad.samples()[i];
        // threshold 0 keeps only strictly nonzero gradients
        const bool on = cut > 0.0 ? g >= cut : g > 0.0;
        if (on) {
            edges.mask[i] = 1;
            ++edges.count;
        }
    }
    return edges;
}

double metric_e(const GrayImage& original, const GrayImage& restored, double threshold) {
    require_same_dims(original, restored, "metric_e");
    const long n_o = visible_edges(original, threshold).count;
    const long n_r = visible_edges(restored, threshold).count;
    if (n_o == 0)
        throw std::domain_error("metric_e: undefined, original image has no visible edges");
    return static_cast<double>(n_r - n_o) / static_cast<double>(n_o);
}

double metric_rbar(const GrayImage& original, const GrayImage& restored, double threshold,
                   long* excluded) {
    require_same_dims(original, restored, "metric_rbar");
    const EdgeMask edges = visible_edges(restored, threshold);
    if (edges.count == 0)
        throw std::domain_error("metric_rbar: undefined, restored image has no visible edges");

    const GrayImage grad_o = sobel_magnitude(original);
    const GrayImage grad_r = sobel_magnitude(restored);
    double log_sum = 0.0;
    long used = 0, skipped = 0;
    for (size_t i = 0; i < edges.mask.size(); ++i) {
        if (!edges.mask[i]) continue;
        const double go = grad_o.samples()[i];
        if (go < kGradientEps) {
            ++skipped;
            continue;
        }
        log_sum += std::log(grad_r.samples()[i] / go);
        ++used;
    }
    if (excluded) *excluded = skipped;
    if (used == 0)
        throw std::domain_error("metric_rbar: undefined, all edge pixels were degenerate");
    return std::exp(log_sum / static_cast<double>(used));
}

double metric_sigma(const GrayImage& original, const GrayImage& restored) {
    require_same_dims(original, restored, "metric_sigma");
    auto saturated = [](double v) { return v <= kSaturationEps || v >= 1.0 - kSaturationEps; };
    long n_s = 0;
    for (size_t i = 0; i < original.size(); ++i)
        if (saturated(restored.samples()[i]) && !saturated(original.samples()[i])) ++n_s;
    return static_cast<double>(n_s) / static_cast<double>(original.size());
}

double metric_sd(const GrayImage& img) {
    if (img.empty()) throw std::invalid_argument("metric_sd: empty image");
    const double mean = mean_value(img);
    double acc = 0.0;
    for (double v : img.samples()) acc += (v - mean) * (v - mean);
    return std::sqrt(acc / static_cast<double>(img.size())) * 255.0;
}

double metric_ag(const GrayImage& img) {
    if (img.empty()) throw std::invalid_argument("metric_ag: empty image");
    const int rows = img.rows(), cols = img.cols();
    double acc = 0.0;
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            const double dx = c + 1 < cols ? img.at(r, c + 1) - img.at(r, c) : 0.0;
            const double dy = r + 1 < rows ? img.at(r + 1, c) - img.at(r, c) : 0.0;
            acc += std::sqrt(0.5 * (dx * dx + dy * dy));
        }
    }
    return acc / static_cast<double>(img.size()) * 255.0;
}

MetricsReport compute_metrics(const GrayImage& original, const GrayImage& restored,
                              double threshold) {
    require_same_dims(original, restored, "compute_metrics");
    MetricsReport report;
    report.threshold = threshold;
    report.n_o = visible_edges(original, threshold).count;
    report.n_r = visible_edges(restored, threshold).count;
    if (report.n_o == 0)
        throw std::domain_error("metrics: undefined, original image has no visible edges");
    report.e = static_cast<double>(report.n_r - report.n_o) / static_cast<double>(report.n_o);
    report.r_bar = metric_rbar(original, restored, threshold, &report.rbar_excluded);

    auto saturated = [](double v) { return v <= kSaturationEps || v >= 1.0 - kSaturationEps; };
    for (size_t i = 0; i < original.size(); ++i)
        if (saturated(restored.samples()[i]) && !saturated(original.samples()[i]))
            ++report.n_s;
    report.sigma = static_cast<double>(report.n_s) / static_cast<double>(original.size());
    report.sd = metric_sd(restored);
    report.ag = metric_ag(restored);
    return report;
}

}  // namespace polarfog::metrics
