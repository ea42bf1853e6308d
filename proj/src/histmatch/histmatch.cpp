#include "polarfog/histmatch/histmatch.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

namespace polarfog::histmatch {

namespace {

inline int bin_of(double v, int bins) {
    const int b = static_cast<int>(std::floor(std::clamp(v, 0.0, 1.0) * bins));
    return std::min(b, bins - 1);
}

}  // namespace

GrayImage match_histogram(const GrayImage& src, const GrayImage& ref, int bins) {
    if (src.empty() || ref.empty())
        throw std::invalid_argument("match_histogram: empty image");
    if (bins < 2) throw std::invalid_argument("match_histogram: bins must be >= 2");

    std::vector<int64_t> hist_src(static_cast<size_t>(bins), 0);
    std::vector<int64_t> hist_ref(static_cast<size_t>(bins), 0);
    std::vector<double> rep(static_cast<size_t>(bins), 0.0);

    for (double v : src.samples()) ++hist_src[static_cast<size_t>(bin_of(v, bins))];
    for (double v : ref.samples()) {
        const auto b = static_cast<size_t>(bin_of(v, bins));
        ++hist_ref[b];
        rep[b] += v;
    }
    for (int b = 0; b < bins; ++b) {
        const auto i = static_cast<size_t>(b);
        rep[i] = hist_ref[i] > 0 ? rep[i] / static_cast<double>(hist_ref[i])
                                 : (b + 0.5) / bins;  // empty bins are never selected
    }

    std::vector<int64_t> cum_src(hist_src), cum_ref(hist_ref);
    for (int b = 1; b < bins; ++b) {
        cum_src[static_cast<size_t>(b)] += cum_src[static_cast<size_t>(b - 1)];
        cum_ref[static_cast<size_t>(b)] += cum_ref[static_cast<size_t>(b - 1)];
    }
    const int64_t n_src = static_cast<int64_t>(src.size());
    const int64_t n_ref = static_cast<int64_t>(ref.size());

    // integer cross-multiplication keeps the CDF comparison exact
    std::vector<double> lut(static_cast<size_t>(bins), 0.0);
    int j = 0;
    for (int b = 0; b < bins; ++b) {
        if (hist_src[static_cast<size_t>(b)] == 0) continue;
        while (j < bins - 1 &&
               cum_ref[static_cast<size_t>(j)] * n_src < cum_src[static_cast<size_t>(b)] * n_ref)
            ++j;
        lut[static_cast<size_t>(b)] = rep[static_cast<size_t>(j)];
    }

    GrayImage out(src.rows(), src.cols());
    for (size_t i = 0; i < src.size(); ++i)
        out.samples()[i] = lut[static_cast<size_t>(bin_of(src.samples()[i], bins))];
    return out;
}

}  // namespace polarfog::histmatch
