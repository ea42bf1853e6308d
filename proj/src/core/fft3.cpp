#include "polarfog/core/fft3.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>

namespace polarfog {

namespace {

// FFTW plan creation is not thread-safe; execution of distinct plans is.
std::mutex& plan_mutex() {
    static std::mutex m;
    return m;
}

struct FftwBuffer {
    explicit FftwBuffer(size_t n)
        : ptr(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n))) {
        if (!ptr) throw std::bad_alloc();
    }
    ~FftwBuffer() { fftw_free(ptr); }
    FftwBuffer(const FftwBuffer&) = delete;
    FftwBuffer& operator=(const FftwBuffer&) = delete;
    fftw_complex* ptr;
};

struct FftwPlan {
    FftwPlan(int l, int r, int c, fftw_complex* in, fftw_complex* out, int sign) {
        std::lock_guard<std::mutex> lock(plan_mutex());
        plan = fftw_plan_dft_3d(l, r, c, in, out, sign, FFTW_ESTIMATE);
        if (!plan) throw std::runtime_error("fft3: FFTW plan creation failed");
    }
    ~FftwPlan() {
        std::lock_guard<std::mutex> lock(plan_mutex());
        fftw_destroy_plan(plan);
    }
    FftwPlan(const FftwPlan&) = delete;
    FftwPlan& operator=(const FftwPlan&) = delete;
    fftw_plan plan;
};

}  // namespace

double dft_angular_frequency(int k, int n, double spacing) {
    const int signed_k = k <= n / 2 ? k : k - n;
    return 2.0 * M_PI * static_cast<double>(signed_k) / (static_cast<double>(n) * spacing);
}

void fill_frequency_grids(Spectrum3D& spec) {
    spec.xi2.assign(static_cast<size_t>(spec.rows) * spec.cols, 0.0);
    spec.omega.assign(static_cast<size_t>(spec.layers), 0.0);
    for (int r = 0; r < spec.rows; ++r) {
        const double fr = dft_angular_frequency(r, spec.rows);
        for (int c = 0; c < spec.cols; ++c) {
            const double fc = dft_angular_frequency(c, spec.cols);
            spec.xi2[static_cast<size_t>(r) * spec.cols + c] = fr * fr + fc * fc;
        }
    }
    for (int l = 0; l < spec.layers; ++l)
        spec.omega[static_cast<size_t>(l)] = dft_angular_frequency(l, spec.layers, spec.dt);
}

Spectrum3D fft3(const ImageStack& stack) {
    if (stack.empty()) throw std::invalid_argument("fft3: empty stack");
    const size_t n = stack.size();

    FftwBuffer buf(n);
    for (size_t i = 0; i < n; ++i) {
        buf.ptr[i][0] = stack.samples()[i];
        buf.ptr[i][1] = 0.0;
    }
    FftwPlan plan(stack.layers(), stack.rows(), stack.cols(), buf.ptr, buf.ptr, FFTW_FORWARD);
    fftw_execute(plan.plan);

    Spectrum3D spec;
    spec.layers = stack.layers();
    spec.rows = stack.rows();
    spec.cols = stack.cols();
    spec.dt = stack.dt();
    spec.data.resize(n);
    for (size_t i = 0; i < n; ++i)
        spec.data[i] = std::complex<double>(buf.ptr[i][0], buf.ptr[i][1]);
    fill_frequency_grids(spec);
    return spec;
}

ImageStack ifft3(const Spectrum3D& spec, double* max_imag) {
    if (spec.data.empty()) throw std::invalid_argument("ifft3: empty spectrum");
    const size_t n = spec.data.size();

    FftwBuffer buf(n);
    for (size_t i = 0; i < n; ++i) {
        buf.ptr[i][0] = spec.data[i].real();
        buf.ptr[i][1] = spec.data[i].imag();
    }
    FftwPlan plan(spec.layers, spec.rows, spec.cols, buf.ptr, buf.ptr, FFTW_BACKWARD);
    fftw_execute(plan.plan);

    ImageStack out(spec.layers, spec.rows, spec.cols, 0.0, spec.dt);
    const double inv_n = 1.0 / static_cast<double>(n);
    double worst = 0.0;
    for (size_t i = 0; i < n; ++i) {
        out.samples()[i] = buf.ptr[i][0] * inv_n;
        const double im = std::abs(buf.ptr[i][1]) * inv_n;
        if (im > worst) worst = im;
    }
    if (max_imag) *max_imag = worst;
    return out;
}

}  // namespace polarfog
