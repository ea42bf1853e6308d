#pragma once

#include <complex>
#include <vector>

#include "polarfog/core/image.hpp"

namespace polarfog {

/// Complex 3-D frequency volume with its angular frequency grids.
///
/// xi2 holds the squared spatial frequency magnitude per (row,col) bin in
/// rad^2/px^2; omega holds the temporal angular frequency per layer in
/// rad/step. Both follow the standard DFT layout: axis frequency
/// 2*pi*k/(N*spacing) for k <= N/2 and the negative branch for k > N/2.
struct Spectrum3D {
    int layers = 0;
    int rows = 0;
    int cols = 0;
    double dt = 1.0;
    std::vector<std::complex<double>> data;  // layer-major, same layout as ImageStack
    std::vector<double> xi2;                 // rows*cols
    std::vector<double> omega;               // layers

    std::complex<double>& at(int l, int r, int c) {
        return data[(static_cast<size_t>(l) * rows + r) * cols + c];
    }
    std::complex<double> at(int l, int r, int c) const {
        return data[(static_cast<size_t>(l) * rows + r) * cols + c];
    }
    double xi2_at(int r, int c) const { return xi2[static_cast<size_t>(r) * cols + c]; }
};

/// Signed DFT axis frequency in rad/unit for index k of an N-point axis with
/// the given sample spacing.
double dft_angular_frequency(int k, int n, double spacing = 1.0);

/// Populate xi2/omega grids for the given dims (helper shared by fft3 and the
/// deconvolution kernel tests).
void fill_frequency_grids(Spectrum3D& spec);

/// Unnormalized forward DFT over (time, rows, cols).
Spectrum3D fft3(const ImageStack& stack);

/// Inverse DFT carrying the 1/N factor; returns the real part. If max_imag is
/// given it receives the largest |imaginary| residue discarded by the cast.
ImageStack ifft3(const Spectrum3D& spec, double* max_imag = nullptr);

}  // namespace polarfog
