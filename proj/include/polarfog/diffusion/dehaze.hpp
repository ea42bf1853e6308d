#pragma once

#include <array>
#include <complex>
#include <vector>

#include "polarfog/core/fft3.hpp"
#include "polarfog/core/image.hpp"

namespace polarfog::diffusion {

/// Tunables of the diffusion-simulation dehazing pipeline.
struct DehazeParams {
    int layers = 100;          // initial stack depth
    int outputs = 51;          // final frame count
    double k_diff = 1.0;       // diffusion coefficient K
    double sigma_max = 5.0;    // largest blur sigma, px
    int t_downsample = 2;      // temporal keep-every-n
    int s_downsample = 2;      // spatial resize factor
    int pad_t = 8;             // replicate pad, time axis
    int pad_s = 16;            // replicate pad, spatial axes
    int smooth_window = 3;     // temporal moving-average width, odd
    int t_extend_factor = 2;   // time-axis extension multiple

    void validate() const;
};

/// Separable Gaussian convolution with edge-replicated borders; the kernel is
/// truncated at 3*sigma (odd width). sigma == 0 is the identity.
GrayImage gaussian_blur(const GrayImage& img, double sigma);

/// Replicate the image into p.layers frames, frame j blurred with
/// sigma_j = sigma_max * j / (layers - 1); frame 0 is untouched.
ImageStack build_diffusion_stack(const GrayImage& img, const DehazeParams& p);

/// Per-frame difference against the original, temporally smoothed with a
/// moving average of width p.smooth_window (edge-replicated), kept every
/// p.t_downsample frames, then smoothed once more at the coarser spacing.
/// The output dt scales by t_downsample.
ImageStack blur_increments(const ImageStack& stack, const GrayImage& original,
                           const DehazeParams& p);

/// Treatment of the zero-frequency bin, where the transfer function vanishes.
enum class DcPolicy {
    kZero,  // annihilate; apply_deconvolution restores per-frame means afterward
    kUnit,  // pass the bin through unchanged
};

/// Frequency-domain multiplier sqrt(xi^2 + i*omega/K) over a Spectrum3D grid
/// (principal branch), together with its reciprocal, the diffusion transfer
/// function. On the temporal Nyquist plane (even layer count) the imaginary
/// part is dropped so that conjugate-symmetric bins stay conjugate and real
/// volumes remain real after filtering.
class DiffusionKernel {
public:
    DiffusionKernel(int layers, int rows, int cols, std::vector<double> xi2,
                    std::vector<double> omega, double k_diff,
                    DcPolicy dc_policy = DcPolicy::kZero);

    int layers() const { return layers_; }
    int rows() const { return rows_; }
    int cols() const { return cols_; }
    DcPolicy dc_policy() const { return dc_policy_; }

    const std::vector<std::complex<double>>& values() const { return values_; }
    std::complex<double> value_at(int l, int r, int c) const {
        return values_[index(l, r, c)];
    }
    /// Transfer function 1/value; 0 wherever the kernel is 0 (annihilated DC).
    std::complex<double> psf_at(int l, int r, int c) const;

    /// Multiply a spectrum by the kernel (deconvolution direction).
    void apply(Spectrum3D& spec) const;
    /// Multiply a spectrum by the transfer function (forward blur model).
    void apply_psf(Spectrum3D& spec) const;

private:
    size_t index(int l, int r, int c) const {
        return (static_cast<size_t>(l) * rows_ + r) * cols_ + c;
    }

    int layers_, rows_, cols_;
    DcPolicy dc_policy_;
    std::vector<std::complex<double>> values_;
};

DiffusionKernel deconvolution_kernel(int layers, int rows, int cols,
                                     std::vector<double> xi2, std::vector<double> omega,
                                     double k_diff, DcPolicy dc_policy = DcPolicy::kZero);
DiffusionKernel deconvolution_kernel(const Spectrum3D& spec, double k_diff,
                                     DcPolicy dc_policy = DcPolicy::kZero);

struct DeconvolutionStats {
    double max_imag_residue = 0.0;  // largest |imaginary| discarded by the real cast
};

/// Full frequency-domain stage: replicate-pad, spatially downsample, extend
/// the time axis, transform, multiply by the kernel, transform back, crop to
/// the input frame count, and restore each frame's pre-transform mean.
/// Output frames keep the downsampled spatial dimensions.
ImageStack apply_deconvolution(const ImageStack& stack, const DehazeParams& p,
                               DeconvolutionStats* stats = nullptr);

struct DehazeResult {
    GrayImage output;      // 1 - normalized mean of the sequence
    ImageStack sequence;   // p.outputs frames at the input dimensions
};

/// End-to-end pipeline: diffusion stack, blur increments, deconvolution,
/// adjacent-frame averaging to p.outputs frames, resample to input size,
/// then invert the normalized temporal mean.
DehazeResult dehaze(const GrayImage& img, const DehazeParams& p = {});

/// Closed-form point-source diffusion profile at (x,y,z), time t > 0.
double analytic_diffusion_at(double x, double y, double z, double t, double k_diff,
                             const std::array<double, 3>& x0 = {0.0, 0.0, 0.0});

/// Evaluate the profile on the cubic grid axis x axis x axis (flattened
/// x-major like ImageStack layers). Verification oracle, not used by dehaze.
std::vector<double> analytic_diffusion(const std::vector<double>& axis, double t,
                                       double k_diff,
                                       const std::array<double, 3>& x0 = {0.0, 0.0, 0.0});

}  // namespace polarfog::diffusion
