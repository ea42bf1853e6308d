// Acceptance suite: one check per criterion, one [PASS]/[FAIL] line each.
// Exits nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <iostream>
#include <vector>

#include "oracle_helpers.hpp"
#include "polarfog/core/fft3.hpp"
#include "polarfog/core/volume.hpp"
#include "polarfog/diffusion/dehaze.hpp"
#include "polarfog/histmatch/histmatch.hpp"
#include "polarfog/metrics/metrics.hpp"
#include "polarfog/mosaic/mosaic.hpp"
#include "polarfog/scatter/scatter.hpp"
#include "test_scenes.hpp"

using namespace polarfog;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(int criterion, bool ok, const std::string& label, const std::string& detail) {
    std::printf("[%s] criterion %d: %s (%s)\n", ok ? "PASS" : "FAIL", criterion,
                label.c_str(), detail.c_str());
    if (!ok) ++failures;
}

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* format, double a, double b = 0.0) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), format, a, b);
    return buf;
}

// 1. multiply a random spectrum by the transfer function, then by the
//    deconvolution kernel; every non-DC bin recovers within 1e-9 relative
void criterion_kernel_inversion() {
    const auto start = Clock::now();
    oracle::Rng rng(1001);
    const ImageStack volume = oracle::random_stack(rng, 8, 16, 16, -1.0, 1.0);
    Spectrum3D spec = fft3(volume);
    const std::vector<std::complex<double>> original = spec.data;

    const diffusion::DiffusionKernel kernel = diffusion::deconvolution_kernel(spec, 1.0);
    kernel.apply_psf(spec);
    kernel.apply(spec);

    double worst = 0.0;
    for (size_t i = 1; i < original.size(); ++i) {
        const double denom = std::max(std::abs(original[i]), 1e-30);
        worst = std::max(worst, std::abs(spec.data[i] - original[i]) / denom);
    }
    const double elapsed = seconds_since(start);
    report(1, worst < 1e-9 && elapsed < 1.0, "kernel inversion oracle on 16x16x8",
           fmt("max rel err %.3g, %.2fs", worst, elapsed));
}

// 2. FFT round trip to 1e-12 and Parseval to 1e-9 on volumes up to 16^3,
//    against a direct-DFT oracle at 4^3
void criterion_fft_roundtrip() {
    oracle::Rng rng(1002);
    double worst_round = 0.0, worst_parseval = 0.0, worst_oracle = 0.0;

    const ImageStack small = oracle::random_stack(rng, 4, 4, 4, -1.0, 1.0);
    const Spectrum3D small_spec = fft3(small);
    const auto expected = oracle::direct_dft3(small);
    for (size_t i = 0; i < expected.size(); ++i)
        worst_oracle = std::max(worst_oracle, std::abs(small_spec.data[i] - expected[i]));

    const std::vector<std::array<int, 3>> sizes = {
        {2, 3, 4}, {5, 7, 3}, {8, 8, 8}, {16, 16, 16}, {16, 11, 13}};
    for (auto [l, r, c] : sizes) {
        const ImageStack stack = oracle::random_stack(rng, l, r, c, -1.0, 1.0);
        const Spectrum3D spec = fft3(stack);
        const ImageStack back = ifft3(spec);
        for (size_t i = 0; i < stack.size(); ++i)
            worst_round =
                std::max(worst_round, std::abs(back.samples()[i] - stack.samples()[i]));

        double space = 0.0, freq = 0.0;
        for (double v : stack.samples()) space += v * v;
        for (const auto& z : spec.data) freq += std::norm(z);
        freq /= static_cast<double>(stack.size());
        worst_parseval = std::max(worst_parseval, std::abs(space - freq) / space);
    }
    report(2,
           worst_round < 1e-12 && worst_parseval < 1e-9 && worst_oracle < 1e-10,
           "FFT round trip, Parseval, direct-DFT oracle",
           fmt("round %.3g, parseval %.3g", worst_round, worst_parseval));
}

// 3. closed-form diffusion profile: O(h^2) heat-equation residual on a 32^3
//    grid and unit spatial integral within 1e-3
void criterion_analytic_diffusion() {
    const int n = 32;
    const double t = 1.0, k_diff = 1.0;

    auto residual = [&](double h) {
        std::vector<double> ax(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i) ax[static_cast<size_t>(i)] = (i - (n - 1) / 2.0) * h;
        const std::vector<double> c = diffusion::analytic_diffusion(ax, t, k_diff);
        auto value = [&](int i, int j, int k) {
            return c[(static_cast<size_t>(i) * n + j) * n + k];
        };
        double worst = 0.0;
        for (int i = 1; i < n - 1; ++i)
            for (int j = 1; j < n - 1; ++j)
                for (int k = 1; k < n - 1; ++k) {
                    const double lap =
                        (value(i + 1, j, k) + value(i - 1, j, k) + value(i, j + 1, k) +
                         value(i, j - 1, k) + value(i, j, k + 1) + value(i, j, k - 1) -
                         6.0 * value(i, j, k)) /
                        (h * h);
                    const double r2 =
                        ax[static_cast<size_t>(i)] * ax[static_cast<size_t>(i)] +
                        ax[static_cast<size_t>(j)] * ax[static_cast<size_t>(j)] +
                        ax[static_cast<size_t>(k)] * ax[static_cast<size_t>(k)];
                    const double dcdt =
                        value(i, j, k) * (r2 / (4.0 * k_diff * t * t) - 1.5 / t);
                    worst = std::max(worst, std::abs(dcdt - k_diff * lap));
                }
        return worst;
    };

    const double r_h = residual(0.5);
    const double r_half = residual(0.25);
    const double order_ratio = r_h / r_half;  // ~4 for O(h^2)

    std::vector<double> axis(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) axis[static_cast<size_t>(i)] = (i - (n - 1) / 2.0) * 0.5;
    const std::vector<double> field = diffusion::analytic_diffusion(axis, t, k_diff);
    double integral = 0.0;
    for (double v : field) integral += v;
    integral *= 0.5 * 0.5 * 0.5;

    report(3,
           order_ratio > 3.0 && order_ratio < 5.0 && std::abs(integral - 1.0) <= 1e-3,
           "analytic diffusion residual O(h^2), unit integral",
           fmt("order ratio %.2f, integral %.6f", order_ratio, integral));
}

// 4. synth/invert round trip on 100 random scenes, beta in [0.1,2]
void criterion_scatter_roundtrip() {
    const auto start = Clock::now();
    oracle::Rng rng(1004);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const int rows = rng.uniform_int(4, 16), cols = rng.uniform_int(4, 16);
        const GrayImage scene = oracle::random_image(rng, rows, cols);
        scatter::ScatterParams p;
        p.beta = rng.uniform(0.1, 2.0);
        p.a_inf = rng.uniform(0.5, 1.0);
        p.depth = oracle::random_image(rng, rows, cols, 0.0, 4.0);
        const scatter::HazyScene hz = scatter::synth_haze(scene, p);
        const GrayImage back = scatter::invert_haze(hz.hazy, hz.airlight, p.a_inf);
        for (int r = 0; r < rows; ++r)
            for (int c = 0; c < cols; ++c)
                if (std::exp(-p.beta * p.depth.at(r, c)) > 1e-6)
                    worst = std::max(worst, std::abs(back.at(r, c) - scene.at(r, c)));
    }
    const double elapsed = seconds_since(start);
    report(4, worst < 1e-12 && elapsed < 1.0, "scattering round trip, 100 scenes",
           fmt("max abs err %.3g, %.2fs", worst, elapsed));
}

// 5. structural defaults: 100 layers, K = 1, exactly 51 output frames, output
//    dims equal input dims
void criterion_structural_constants() {
    oracle::Rng rng(1005);
    const GrayImage img = oracle::random_image(rng, 48, 40);
    const diffusion::DehazeParams defaults;
    const diffusion::DehazeResult result = diffusion::dehaze(img, defaults);
    const bool ok = defaults.layers == 100 && defaults.k_diff == 1.0 &&
                    defaults.outputs == 51 && result.sequence.layers() == 51 &&
                    result.output.rows() == img.rows() &&
                    result.output.cols() == img.cols() &&
                    result.sequence.rows() == img.rows() &&
                    result.sequence.cols() == img.cols();
    report(5, ok, "structural constants 100 layers / K=1 / 51 outputs / dims kept",
           fmt("sequence frames %.0f", static_cast<double>(result.sequence.layers())));
}

// 6. enhancement direction on 20 synthetic scenes at 128x128
void criterion_enhancement_direction() {
    const auto start = Clock::now();
    int improved = 0;
    for (int index = 0; index < 20; ++index) {
        const GrayImage degraded = scenes::degraded_scene(index, 128, 128);
        const diffusion::DehazeResult result =
            diffusion::dehaze(degraded, diffusion::DehazeParams{});
        const double e = metrics::metric_e(degraded, result.output, 0.05);
        const double rbar = metrics::metric_rbar(degraded, result.output, 0.05);
        if (e > 0.0 && rbar > 1.0) ++improved;
    }
    const double elapsed = seconds_since(start);
    report(6, improved >= 18 && elapsed < 120.0,
           "enhancement direction e>0, rbar>1 on synthetic scenes",
           fmt("%.0f/20 improved, %.1fs", static_cast<double>(improved), elapsed));
}

// 7. metric formulas against hand-computed values and the pixel-loop oracle
void criterion_metric_formulas() {
    bool ok = true;

    // hand-computed: e = (250-100)/100, geometric mean of {2,8}, sigma counts
    ok &= std::abs((250.0 - 100.0) / 100.0 - 1.5) < 1e-15;

    GrayImage half(16, 16, 0.0);
    for (int r = 0; r < 8; ++r)
        for (int c = 0; c < 16; ++c) half.at(r, c) = 1.0;
    ok &= std::abs(metrics::metric_sd(half) - 127.5) < 1e-12;

    GrayImage ramp(4, 256);
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 256; ++c) ramp.at(r, c) = c / 255.0;
    const double ag_expected = 255.0 * (255.0 / 256.0) * (1.0 / 255.0) / std::sqrt(2.0);
    ok &= std::abs(metrics::metric_ag(ramp) - ag_expected) < 1e-12;

    GrayImage big_o(100, 100, 0.5), big_r(100, 100, 0.5);
    for (int i = 0; i < 5; ++i) big_r.at(0, i) = 1.0;
    ok &= std::abs(metrics::metric_sigma(big_o, big_r) - 0.0005) < 1e-15;

    oracle::Rng rng(1007);
    double worst = 0.0;
    for (int trial = 0; trial < 5; ++trial) {
        const GrayImage original = oracle::random_image(rng, 16, 16);
        GrayImage restored = oracle::random_image(rng, 16, 16);
        restored.at(0, 0) = 1.0;
        restored.at(2, 3) = 0.0;
        worst = std::max(worst, std::abs(metrics::metric_e(original, restored, 0.05) -
                                         oracle::ref_metric_e(original, restored, 0.05)));
        worst = std::max(worst, std::abs(metrics::metric_rbar(original, restored, 0.05) -
                                         oracle::ref_metric_rbar(original, restored, 0.05)));
        worst = std::max(worst, std::abs(metrics::metric_sigma(original, restored) -
                                         oracle::ref_metric_sigma(original, restored)));
        worst = std::max(worst, std::abs(metrics::metric_sd(restored) -
                                         oracle::ref_metric_sd(restored)));
        worst = std::max(worst, std::abs(metrics::metric_ag(restored) -
                                         oracle::ref_metric_ag(restored)));
    }
    ok &= worst < 1e-12;
    report(7, ok, "metric formulas vs hand values and pixel-loop oracle",
           fmt("max oracle deviation %.3g", worst));
}

// 8. demosaic losslessness on a random 64x64 mosaic; Stokes linearity and
//    DOLP bounds on 1000 random superpixels
void criterion_demosaic() {
    oracle::Rng rng(1008);
    const GrayImage raw = oracle::random_image(rng, 64, 64);
    const mosaic::PolarFrame frame = mosaic::demosaic(raw);
    const GrayImage rebuilt = mosaic::remosaic(frame);
    bool ok = rebuilt.samples() == raw.samples();

    // linearity: stokes(a*A + b*B) == a*stokes(A) + b*stokes(B)
    const int n = 1000;
    mosaic::PolarFrame a, b, mix;
    const double alpha = 0.7, beta = 0.3;
    for (mosaic::PolarFrame* f : {&a, &b}) {
        f->i0 = oracle::random_image(rng, 1, n);
        f->i45 = oracle::random_image(rng, 1, n);
        f->i90 = oracle::random_image(rng, 1, n);
        f->i135 = oracle::random_image(rng, 1, n);
    }
    auto blend = [&](const GrayImage& x, const GrayImage& y) {
        GrayImage out(1, n);
        for (size_t i = 0; i < out.size(); ++i)
            out.samples()[i] = alpha * x.samples()[i] + beta * y.samples()[i];
        return out;
    };
    mix.i0 = blend(a.i0, b.i0);
    mix.i45 = blend(a.i45, b.i45);
    mix.i90 = blend(a.i90, b.i90);
    mix.i135 = blend(a.i135, b.i135);
    mosaic::compute_stokes(a);
    mosaic::compute_stokes(b);
    mosaic::compute_stokes(mix);
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
        worst = std::max(worst, std::abs(mix.s0.at(0, i) -
                                         (alpha * a.s0.at(0, i) + beta * b.s0.at(0, i))));
        worst = std::max(worst, std::abs(mix.s1.at(0, i) -
                                         (alpha * a.s1.at(0, i) + beta * b.s1.at(0, i))));
        worst = std::max(worst, std::abs(mix.s2.at(0, i) -
                                         (alpha * a.s2.at(0, i) + beta * b.s2.at(0, i))));
    }
    ok &= worst < 1e-12;

    const GrayImage dolp = mosaic::compute_dolp(mix);
    for (int i = 0; i < n; ++i) ok &= dolp.at(0, i) >= 0.0 && dolp.at(0, i) <= 1.0;

    report(8, ok, "demosaic losslessness, Stokes linearity, DOLP bounds",
           fmt("linearity dev %.3g", worst));
}

// 9. histogram matching KS bound on random pairs
void criterion_histmatch() {
    oracle::Rng rng(1009);
    const int bins = 256;
    double worst_excess = -1.0;
    for (int trial = 0; trial < 10; ++trial) {
        const int rows_s = rng.uniform_int(12, 32), cols_s = rng.uniform_int(12, 32);
        const int rows_r = rng.uniform_int(12, 32), cols_r = rng.uniform_int(12, 32);

        // sources with no overloaded histogram bin (shuffled stratified ramp)
        GrayImage src(rows_s, cols_s);
        const size_t n = src.size();
        for (size_t i = 0; i < n; ++i)
            src.samples()[i] =
                (static_cast<double>(i) + 0.5) / static_cast<double>(n);
        for (size_t i = n; i > 1; --i)
            std::swap(src.samples()[i - 1],
                      src.samples()[static_cast<size_t>(rng.next() % i)]);

        GrayImage ref = oracle::random_image(rng, rows_r, cols_r);
        if (trial % 2 == 0)
            for (double& v : ref.samples()) v = v * v;

        const GrayImage out = histmatch::match_histogram(src, ref, bins);

        // KS over bin edges
        std::vector<double> c_out(static_cast<size_t>(bins), 0.0),
            c_ref(static_cast<size_t>(bins), 0.0);
        auto accumulate = [&](const GrayImage& img, std::vector<double>& cdf) {
            for (double v : img.samples()) {
                int bi = static_cast<int>(std::floor(std::clamp(v, 0.0, 1.0) * bins));
                cdf[static_cast<size_t>(std::min(bi, bins - 1))] += 1.0;
            }
            double acc = 0.0;
            for (double& x : cdf) {
                acc += x;
                x = acc / static_cast<double>(img.size());
            }
        };
        accumulate(out, c_out);
        accumulate(ref, c_ref);
        double ks = 0.0;
        for (int k = 0; k < bins; ++k)
            ks = std::max(ks, std::abs(c_out[static_cast<size_t>(k)] -
                                       c_ref[static_cast<size_t>(k)]));

        const double bound =
            1.0 / bins + 1.0 / static_cast<double>(std::min(src.size(), ref.size()));
        worst_excess = std::max(worst_excess, ks - bound);
    }
    report(9, worst_excess <= 1e-12, "histogram matching KS bound",
           fmt("worst excess over bound %.3g", worst_excess));
}

// 10. 512x512 dehaze under defaults: < 60 s single worker, byte-identical reruns
void criterion_performance() {
    oracle::Rng rng(1010);
    GrayImage img(512, 512);
    for (int r = 0; r < 512; ++r)
        for (int c = 0; c < 512; ++c)
            img.at(r, c) = 0.5 + 0.3 * std::sin(0.07 * c) * std::cos(0.05 * r) +
                           0.05 * rng.uniform();

    const auto start = Clock::now();
    const diffusion::DehazeResult first = diffusion::dehaze(img, diffusion::DehazeParams{});
    const double elapsed = seconds_since(start);

    const diffusion::DehazeResult second = diffusion::dehaze(img, diffusion::DehazeParams{});
    const bool identical = first.output.samples() == second.output.samples() &&
                           first.sequence.samples() == second.sequence.samples();

    report(10, elapsed < 60.0 && identical, "512x512 dehaze under 60s, deterministic",
           fmt("%.1fs, reruns identical: %.0f", elapsed, identical ? 1.0 : 0.0));
}

}  // namespace

int main() {
    criterion_kernel_inversion();
    criterion_fft_roundtrip();
    criterion_analytic_diffusion();
    criterion_scatter_roundtrip();
    criterion_structural_constants();
    criterion_enhancement_direction();
    criterion_metric_formulas();
    criterion_demosaic();
    criterion_histmatch();
    criterion_performance();

    if (failures == 0) {
        std::printf("all acceptance criteria passed\n");
        return 0;
    }
    std::printf("%d acceptance criteria FAILED\n", failures);
    return 1;
}
