#include "polarfog/mosaic/mosaic.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace polarfog::mosaic {

void MosaicLayout::validate() const {
    std::array<int, 4> sorted = angles;
    std::sort(sorted.begin(), sorted.end());
    if (sorted != std::array<int, 4>{0, 45, 90, 135})
        throw std::invalid_argument("MosaicLayout: angles must be a permutation of 0,45,90,135");
}

int MosaicLayout::position_of(int angle) const {
    for (int i = 0; i < 4; ++i)
        if (angles[i] == angle) return i;
    throw std::invalid_argument("MosaicLayout: angle not present");
}

MosaicLayout parse_layout(const std::string& text) {
    MosaicLayout layout;
    std::istringstream in(text);
    std::string tok;
    for (int i = 0; i < 4; ++i) {
        if (!std::getline(in, tok, ','))
            throw std::invalid_argument("layout: expected four comma-separated angles");
        layout.angles[i] = std::stoi(tok);
    }
    if (std::getline(in, tok, ','))
        throw std::invalid_argument("layout: expected exactly four angles");
    layout.validate();
    return layout;
}

PolarFrame demosaic(const GrayImage& raw, const MosaicLayout& layout) {
    layout.validate();
    if (raw.empty()) throw std::invalid_argument("demosaic: empty image");
    if (raw.rows() % 2 != 0 || raw.cols() % 2 != 0)
        throw std::invalid_argument("demosaic: mosaic dimensions must be even");

    const int rows = raw.rows() / 2;
    const int cols = raw.cols() / 2;
    PolarFrame frame;
    GrayImage* planes[4] = {&frame.i0, &frame.i45, &frame.i90, &frame.i135};
    const int plane_angle[4] = {0, 45, 90, 135};

    for (int p = 0; p < 4; ++p) {
        const int pos = layout.position_of(plane_angle[p]);
        const int dr = pos / 2;  // 0: top row of superpixel, 1: bottom
        const int dc = pos % 2;
        GrayImage plane(rows, cols);
        for (int r = 0; r < rows; ++r)
            for (int c = 0; c < cols; ++c)
                plane.at(r, c) = raw.at(2 * r + dr, 2 * c + dc);
        *planes[p] = std::move(plane);
    }
    return frame;
}

GrayImage remosaic(const PolarFrame& frame, const MosaicLayout& layout) {
    layout.validate();
    const GrayImage* planes[4] = {&frame.i0, &frame.i45, &frame.i90, &frame.i135};
    const int plane_angle[4] = {0, 45, 90, 135};
    const int rows = frame.i0.rows();
    const int cols = frame.i0.cols();
    for (const GrayImage* p : planes)
        if (p->rows() != rows || p->cols() != cols)
            throw std::invalid_argument("remosaic: angle plane dimension mismatch");

    GrayImage raw(rows * 2, cols * 2);
    for (int p = 0; p < 4; ++p) {
        const int pos = layout.position_of(plane_angle[p]);
        const int dr = pos / 2;
        const int dc = pos % 2;
        for (int r = 0; r < rows; ++r)
            for (int c = 0; c < cols; ++c)
                raw.at(2 * r + dr, 2 * c + dc) = planes[p]->at(r, c);
    }
    return raw;
}

void compute_stokes(PolarFrame& frame) {
    const int rows = frame.i0.rows();
    const int cols = frame.i0.cols();
    if (frame.i0.empty() || !frame.i45.same_dims(frame.i0) ||
        !frame.i90.same_dims(frame.i0) || !frame.i135.same_dims(frame.i0))
        throw std::invalid_argument("compute_stokes: angle planes missing or mismatched");

    frame.s0 = GrayImage(rows, cols);
    frame.s1 = GrayImage(rows, cols);
    frame.s2 = GrayImage(rows, cols);
    for (size_t i = 0; i < frame.i0.size(); ++i) {
        const double a0 = frame.i0.samples()[i];
        const double a45 = frame.i45.samples()[i];
        const double a90 = frame.i90.samples()[i];
        const double a135 = frame.i135.samples()[i];
        frame.s0.samples()[i] = a0 + a90;
        frame.s1.samples()[i] = a0 - a90;
        frame.s2.samples()[i] = a45 - a135;
    }
}

GrayImage compute_dolp(const PolarFrame& frame, DolpReport* report, double epsilon) {
    if (frame.s0.empty() || !frame.s1.same_dims(frame.s0) || !frame.s2.same_dims(frame.s0))
        throw std::invalid_argument("compute_dolp: Stokes planes missing or mismatched");

    GrayImage out(frame.s0.rows(), frame.s0.cols());
    DolpReport stats;
    for (size_t i = 0; i < out.size(); ++i) {
        const double s0 = frame.s0.samples()[i];
        if (s0 <= epsilon) {
            out.samples()[i] = 0.0;
            ++stats.degenerate;
            continue;
        }
        const double s1 = frame.s1.samples()[i];
        const double s2 = frame.s2.samples()[i];
        double p = std::sqrt(s1 * s1 + s2 * s2) / s0;
        if (p > 1.0) {
            p = 1.0;
            ++stats.clamped;
        }
        out.samples()[i] = p;
    }
    if (report) *report = stats;
    return out;
}

GrayImage compute_aolp(const PolarFrame& frame) {
    if (frame.s1.empty() || !frame.s2.same_dims(frame.s1))
        throw std::invalid_argument("compute_aolp: Stokes planes missing or mismatched");

    GrayImage out(frame.s1.rows(), frame.s1.cols());
    for (size_t i = 0; i < out.size(); ++i)
        out.samples()[i] = 0.5 * std::atan2(frame.s2.samples()[i], frame.s1.samples()[i]);
    return out;
}

PolarFrame process_mosaic(const GrayImage& raw, const MosaicLayout& layout,
                          DolpReport* report) {
    PolarFrame frame = demosaic(raw, layout);
    compute_stokes(frame);
    frame.dolp = compute_dolp(frame, report);
    frame.aolp = compute_aolp(frame);
    return frame;
}

}  // namespace polarfog::mosaic
