#include "polarfog/diffusion/dehaze.hpp"

#include <algorithm>
#include <cmath>

#include "polarfog/core/resample.hpp"
#include "polarfog/core/volume.hpp"

namespace polarfog::diffusion {

void DehazeParams::validate() const {
    if (layers < 2) throw std::invalid_argument("DehazeParams: layers must be >= 2");
    if (outputs < 1) throw std::invalid_argument("DehazeParams: outputs must be >= 1");
    if (!(k_diff > 0.0)) throw std::invalid_argument("DehazeParams: k_diff must be > 0");
    if (!(sigma_max > 0.0)) throw std::invalid_argument("DehazeParams: sigma_max must be > 0");
    if (t_downsample < 1)
        throw std::invalid_argument("DehazeParams: t_downsample must be >= 1");
    if (s_downsample < 1)
        throw std::invalid_argument("DehazeParams: s_downsample must be >= 1");
    if (pad_t < 0 || pad_s < 0) throw std::invalid_argument("DehazeParams: pads must be >= 0");
    if (smooth_window < 1 || smooth_window % 2 == 0)
        throw std::invalid_argument("DehazeParams: smooth_window must be odd and >= 1");
    if (t_extend_factor < 1)
        throw std::invalid_argument("DehazeParams: t_extend_factor must be >= 1");
    if (pad_s % s_downsample != 0)
        throw std::invalid_argument("DehazeParams: pad_s must be divisible by s_downsample");
}

GrayImage gaussian_blur(const GrayImage& img, double sigma) {
    if (img.empty()) throw std::invalid_argument("gaussian_blur: empty image");
    if (sigma < 0.0) throw std::invalid_argument("gaussian_blur: sigma must be >= 0");
    if (sigma == 0.0) return img;

    const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
    std::vector<double> weights(static_cast<size_t>(radius) + 1);
    double sum = 0.0;
    for (int k = 0; k <= radius; ++k) {
        weights[static_cast<size_t>(k)] = std::exp(-0.5 * (k * k) / (sigma * sigma));
        sum += (k == 0 ? 1.0 : 2.0) * weights[static_cast<size_t>(k)];
    }
    for (double& w : weights) w /= sum;

    // difference form center + sum w_k*(left + right - 2*center): algebraically
    // the normalized kernel, and constants pass through bit-exactly
    const int rows = img.rows(), cols = img.cols();
    GrayImage tmp(rows, cols);
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            const double center = img.at(r, c);
            double acc = center;
            for (int k = 1; k <= radius; ++k) {
                const int cl = std::max(0, c - k);
                const int cr = std::min(cols - 1, c + k);
                acc += weights[static_cast<size_t>(k)] *
                       (img.at(r, cl) + img.at(r, cr) - 2.0 * center);
            }
            tmp.at(r, c) = acc;
        }
    }
    GrayImage out(rows, cols);
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            const double center = tmp.at(r, c);
            double acc = center;
            for (int k = 1; k <= radius; ++k) {
                const int ru = std::max(0, r - k);
                const int rd = std::min(rows - 1, r + k);
                acc += weights[static_cast<size_t>(k)] *
                       (tmp.at(ru, c) + tmp.at(rd, c) - 2.0 * center);
            }
            out.at(r, c) = acc;
        }
    }
    return out;
}

ImageStack build_diffusion_stack(const GrayImage& img, const DehazeParams& p) {
    p.validate();
    if (img.empty()) throw std::invalid_argument("build_diffusion_stack: empty image");

    ImageStack stack(p.layers, img.rows(), img.cols());
    stack.set_layer(0, img);
    for (int j = 1; j < p.layers; ++j) {
        const double sigma = p.sigma_max * static_cast<double>(j) / (p.layers - 1);
        stack.set_layer(j, gaussian_blur(img, sigma));
    }
    return stack;
}

namespace {

// in place, buffering only the window of original layers the filter still needs
ImageStack temporal_moving_average(ImageStack stack, int window) {
    if (window == 1) return stack;
    const int half = window / 2;
    const int layers = stack.layers();
    const size_t plane = static_cast<size_t>(stack.rows()) * stack.cols();
    const double inv_w = 1.0 / window;

    std::vector<std::vector<double>> ring(static_cast<size_t>(window));
    auto original = [&](int l) -> const double* {
        return ring[static_cast<size_t>(l % window)].data();
    };
    for (int l = 0; l <= std::min(half, layers - 1); ++l)
        ring[static_cast<size_t>(l % window)]
            .assign(stack.layer_data(l), stack.layer_data(l) + plane);

    std::vector<double> acc(plane);
    for (int l = 0; l < layers; ++l) {
        std::fill(acc.begin(), acc.end(), 0.0);
        for (int k = -half; k <= half; ++k) {
            const double* src = original(std::clamp(l + k, 0, layers - 1));
            for (size_t i = 0; i < plane; ++i) acc[i] += src[i];
        }
        double* dst = stack.layer_data(l);
        for (size_t i = 0; i < plane; ++i) dst[i] = acc[i] * inv_w;
        const int incoming = l + half + 1;
        if (incoming < layers)
            ring[static_cast<size_t>(incoming % window)]
                .assign(stack.layer_data(incoming), stack.layer_data(incoming) + plane);
    }
    return stack;
}

ImageStack temporal_keep_every(ImageStack stack, int step) {
    if (step == 1) return stack;
    const int kept = (stack.layers() - 1) / step + 1;
    ImageStack out(kept, stack.rows(), stack.cols(), 0.0, stack.dt() * step);
    const size_t plane = static_cast<size_t>(stack.rows()) * stack.cols();
    for (int j = 0; j < kept; ++j)
        std::copy(stack.layer_data(j * step), stack.layer_data(j * step) + plane,
                  out.layer_data(j));
    return out;
}

}  // namespace

ImageStack blur_increments(const ImageStack& stack, const GrayImage& original,
                           const DehazeParams& p) {
    p.validate();
    if (stack.rows() != original.rows() || stack.cols() != original.cols())
        throw std::invalid_argument("blur_increments: stack and original dimension mismatch");

    ImageStack inc(stack.layers(), stack.rows(), stack.cols(), 0.0, stack.dt());
    const size_t plane = original.size();
    for (int l = 0; l < stack.layers(); ++l) {
        const double* src = stack.layer_data(l);
        double* dst = inc.layer_data(l);
        for (size_t i = 0; i < plane; ++i) dst[i] = src[i] - original.samples()[i];
    }

    inc = temporal_moving_average(std::move(inc), p.smooth_window);
    inc = temporal_keep_every(std::move(inc), p.t_downsample);
    // second smoothing pass at the coarser temporal spacing
    inc = temporal_moving_average(std::move(inc), p.smooth_window);
    return inc;
}

DiffusionKernel::DiffusionKernel(int layers, int rows, int cols, std::vector<double> xi2,
                                 std::vector<double> omega, double k_diff,
                                 DcPolicy dc_policy)
    : layers_(layers), rows_(rows), cols_(cols), dc_policy_(dc_policy) {
    if (!(k_diff > 0.0))
        throw std::invalid_argument("DiffusionKernel: k_diff must be > 0");
    if (xi2.size() != static_cast<size_t>(rows) * cols ||
        omega.size() != static_cast<size_t>(layers))
        throw std::invalid_argument("DiffusionKernel: grid sizes disagree with dims");

    values_.resize(static_cast<size_t>(layers) * rows * cols);
    const bool has_nyquist = layers % 2 == 0;
    const int nyquist = layers / 2;
    for (int l = 0; l < layers; ++l) {
        const double w = omega[static_cast<size_t>(l)];
        const bool self_conjugate_time = has_nyquist && l == nyquist && w != 0.0;
        for (int r = 0; r < rows; ++r) {
            for (int c = 0; c < cols; ++c) {
                const double x2 = xi2[static_cast<size_t>(r) * cols + c];
                std::complex<double> v;
                if (x2 == 0.0 && w == 0.0) {
                    v = dc_policy == DcPolicy::kZero ? 0.0 : 1.0;
                } else {
                    v = std::sqrt(std::complex<double>(x2, w / k_diff));
                    if (self_conjugate_time) v = v.real();
                }
                values_[index(l, r, c)] = v;
            }
        }
    }
}

std::complex<double> DiffusionKernel::psf_at(int l, int r, int c) const {
    const std::complex<double> v = values_[index(l, r, c)];
    if (v == std::complex<double>(0.0, 0.0)) return {0.0, 0.0};
    return 1.0 / v;
}

void DiffusionKernel::apply(Spectrum3D& spec) const {
    if (spec.data.size() != values_.size())
        throw std::invalid_argument("DiffusionKernel::apply: spectrum size mismatch");
    for (size_t i = 0; i < values_.size(); ++i) spec.data[i] *= values_[i];
}

void DiffusionKernel::apply_psf(Spectrum3D& spec) const {
    if (spec.data.size() != values_.size())
        throw std::invalid_argument("DiffusionKernel::apply_psf: spectrum size mismatch");
    for (size_t i = 0; i < values_.size(); ++i) {
        const std::complex<double> v = values_[i];
        spec.data[i] = v == std::complex<double>(0.0, 0.0) ? 0.0 : spec.data[i] / v;
    }
}

DiffusionKernel deconvolution_kernel(int layers, int rows, int cols,
                                     std::vector<double> xi2, std::vector<double> omega,
                                     double k_diff, DcPolicy dc_policy) {
    return DiffusionKernel(layers, rows, cols, std::move(xi2), std::move(omega), k_diff,
                           dc_policy);
}

DiffusionKernel deconvolution_kernel(const Spectrum3D& spec, double k_diff,
                                     DcPolicy dc_policy) {
    return DiffusionKernel(spec.layers, spec.rows, spec.cols, spec.xi2, spec.omega, k_diff,
                           dc_policy);
}

namespace {

ImageStack spatial_downsample(const ImageStack& stack, int factor) {
    if (factor == 1) return stack;
    const int rows = stack.rows() / factor;
    const int cols = stack.cols() / factor;
    if (rows < 1 || cols < 1)
        throw std::invalid_argument("apply_deconvolution: spatial downsample underflow");
    ImageStack out(stack.layers(), rows, cols, 0.0, stack.dt());
    for (int l = 0; l < stack.layers(); ++l)
        out.set_layer(l, resample(stack.layer(l), rows, cols, ResampleMethod::kBilinear));
    return out;
}

ImageStack extend_time(const ImageStack& stack, int factor) {
    if (factor == 1) return stack;
    const int extended = stack.layers() * factor;
    ImageStack out(extended, stack.rows(), stack.cols(), 0.0, stack.dt());
    const size_t plane = static_cast<size_t>(stack.rows()) * stack.cols();
    std::copy(stack.data(), stack.data() + stack.size(), out.data());
    const double* last = stack.layer_data(stack.layers() - 1);
    for (int l = stack.layers(); l < extended; ++l)
        std::copy(last, last + plane, out.layer_data(l));
    return out;
}

double region_mean(const ImageStack& stack, int layer, int r0, int r1, int c0, int c1) {
    double sum = 0.0;
    for (int r = r0; r < r1; ++r)
        for (int c = c0; c < c1; ++c) sum += stack.at(layer, r, c);
    return sum / (static_cast<double>(r1 - r0) * (c1 - c0));
}

}  // namespace

ImageStack apply_deconvolution(const ImageStack& stack, const DehazeParams& p,
                               DeconvolutionStats* stats) {
    p.validate();
    if (stack.empty()) throw std::invalid_argument("apply_deconvolution: empty stack");

    // scoped so each oversized intermediate frees before the next allocates
    ImageStack ds;
    {
        const ImageStack padded = pad_replicate_3d(stack, p.pad_t, p.pad_s, p.pad_s);
        ds = spatial_downsample(padded, p.s_downsample);
    }

    const int crop_s = p.pad_s / p.s_downsample;
    const int out_rows = ds.rows() - 2 * crop_s;
    const int out_cols = ds.cols() - 2 * crop_s;
    if (out_rows < 1 || out_cols < 1)
        throw std::invalid_argument("apply_deconvolution: pads exceed volume dimensions");

    // per-frame means over the voxels that survive the final crop
    std::vector<double> pre_means(static_cast<size_t>(stack.layers()));
    for (int j = 0; j < stack.layers(); ++j)
        pre_means[static_cast<size_t>(j)] =
            region_mean(ds, p.pad_t + j, crop_s, crop_s + out_rows, crop_s, crop_s + out_cols);

    const int ds_layers = ds.layers();
    double imag_residue = 0.0;
    ImageStack restored;
    {
        Spectrum3D spec;
        {
            const ImageStack extended = extend_time(ds, p.t_extend_factor);
            ds = ImageStack();
            spec = fft3(extended);
        }
        {
            const DiffusionKernel kernel =
                deconvolution_kernel(spec, p.k_diff, DcPolicy::kZero);
            kernel.apply(spec);
        }
        restored = ifft3(spec, &imag_residue);
    }
    if (stats) stats->max_imag_residue = imag_residue;

    restored = slice_time(restored, 0, ds_layers);
    restored = crop_3d(restored, p.pad_t, crop_s, crop_s);

    const size_t plane = static_cast<size_t>(out_rows) * out_cols;
    for (int j = 0; j < restored.layers(); ++j) {
        double* frame = restored.layer_data(j);
        double mean = 0.0;
        for (size_t i = 0; i < plane; ++i) mean += frame[i];
        mean /= static_cast<double>(plane);
        const double shift = pre_means[static_cast<size_t>(j)] - mean;
        for (size_t i = 0; i < plane; ++i) frame[i] += shift;
    }
    return restored;
}

DehazeResult dehaze(const GrayImage& img, const DehazeParams& p) {
    p.validate();
    if (img.empty()) throw std::invalid_argument("dehaze: empty image");

    ImageStack increments;
    {
        const ImageStack stack = build_diffusion_stack(img, p);
        increments = blur_increments(stack, img, p);
    }
    const ImageStack restored = apply_deconvolution(increments, p);
    increments = ImageStack();

    // one replicated frame at each end, then adjacent-pair averages
    const ImageStack padded = pad_replicate_3d(restored, 1, 0, 0);
    ImageStack averaged(padded.layers() - 1, padded.rows(), padded.cols(), 0.0, padded.dt());
    const size_t plane = static_cast<size_t>(padded.rows()) * padded.cols();
    for (int j = 0; j + 1 < padded.layers(); ++j) {
        const double* a = padded.layer_data(j);
        const double* b = padded.layer_data(j + 1);
        double* dst = averaged.layer_data(j);
        for (size_t i = 0; i < plane; ++i) dst[i] = 0.5 * (a[i] + b[i]);
    }

    if (averaged.layers() > p.outputs) {
        averaged = slice_time(averaged, 0, p.outputs);
    } else if (averaged.layers() < p.outputs) {
        ImageStack grown(p.outputs, averaged.rows(), averaged.cols(), 0.0, averaged.dt());
        std::copy(averaged.data(), averaged.data() + averaged.size(), grown.data());
        const double* last = averaged.layer_data(averaged.layers() - 1);
        for (int j = averaged.layers(); j < p.outputs; ++j)
            std::copy(last, last + plane, grown.layer_data(j));
        averaged = std::move(grown);
    }

    ImageStack sequence(p.outputs, img.rows(), img.cols(), 0.0, averaged.dt());
    for (int j = 0; j < p.outputs; ++j)
        sequence.set_layer(
            j, resample(averaged.layer(j), img.rows(), img.cols(), ResampleMethod::kBilinear));

    GrayImage mean(img.rows(), img.cols());
    for (int j = 0; j < sequence.layers(); ++j) {
        const double* frame = sequence.layer_data(j);
        for (size_t i = 0; i < mean.size(); ++i) mean.samples()[i] += frame[i];
    }
    const double inv_frames = 1.0 / sequence.layers();
    for (double& v : mean.samples()) v *= inv_frames;

    GrayImage output = normalize_to_unit(mean);
    for (double& v : output.samples()) v = 1.0 - v;
    return {std::move(output), std::move(sequence)};
}

double analytic_diffusion_at(double x, double y, double z, double t, double k_diff,
                             const std::array<double, 3>& x0) {
    if (!(t > 0.0)) throw std::invalid_argument("analytic_diffusion: t must be > 0");
    if (!(k_diff > 0.0)) throw std::invalid_argument("analytic_diffusion: k_diff must be > 0");
    const double dx = x - x0[0];
    const double dy = y - x0[1];
    const double dz = z - x0[2];
    const double r2 = dx * dx + dy * dy + dz * dz;
    const double denom = std::pow(4.0 * M_PI * k_diff * t, 1.5);
    return std::exp(-r2 / (4.0 * k_diff * t)) / denom;
}

std::vector<double> analytic_diffusion(const std::vector<double>& axis, double t,
                                       double k_diff, const std::array<double, 3>& x0) {
    const size_t n = axis.size();
    std::vector<double> out(n * n * n);
    size_t idx = 0;
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j)
            for (size_t k = 0; k < n; ++k)
                out[idx++] = analytic_diffusion_at(axis[i], axis[j], axis[k], t, k_diff, x0);
    return out;
}

}  // namespace polarfog::diffusion
