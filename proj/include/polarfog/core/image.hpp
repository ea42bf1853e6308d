#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace polarfog {

/// Single-plane real-valued image, row-major doubles.
/// Samples are nominally in [0,1] once loaded through io::load_image with
/// normalization; intermediate pipeline stages may leave that range.
class GrayImage {
public:
    GrayImage() = default;
    GrayImage(int rows, int cols, double fill = 0.0)
        : rows_(rows), cols_(cols),
          data_(static_cast<size_t>(check_dims(rows, cols)) , fill) {}

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    bool empty() const { return data_.empty(); }
    size_t size() const { return data_.size(); }

    double& at(int r, int c) { return data_[static_cast<size_t>(r) * cols_ + c]; }
    double at(int r, int c) const { return data_[static_cast<size_t>(r) * cols_ + c]; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }
    std::vector<double>& samples() { return data_; }
    const std::vector<double>& samples() const { return data_; }

    bool same_dims(const GrayImage& other) const {
        return rows_ == other.rows_ && cols_ == other.cols_;
    }

private:
    static size_t check_dims(int rows, int cols) {
        if (rows < 1 || cols < 1)
            throw std::invalid_argument("GrayImage: dimensions must be >= 1");
        return static_cast<size_t>(rows) * static_cast<size_t>(cols);
    }

    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> data_;
};

/// Time-ordered real volume, layer-major: index = (layer * rows + row) * cols + col.
/// dt is the abstract spacing between layers; operations that drop layers
/// (temporal downsampling) scale it accordingly.
class ImageStack {
public:
    ImageStack() = default;
    ImageStack(int layers, int rows, int cols, double fill = 0.0, double dt = 1.0)
        : layers_(layers), rows_(rows), cols_(cols), dt_(dt),
          data_(check_dims(layers, rows, cols), fill) {}

    int layers() const { return layers_; }
    int rows() const { return rows_; }
    int cols() const { return cols_; }
    double dt() const { return dt_; }
    void set_dt(double dt) { dt_ = dt; }
    bool empty() const { return data_.empty(); }
    size_t size() const { return data_.size(); }

    double& at(int l, int r, int c) {
        return data_[(static_cast<size_t>(l) * rows_ + r) * cols_ + c];
    }
    double at(int l, int r, int c) const {
        return data_[(static_cast<size_t>(l) * rows_ + r) * cols_ + c];
    }

    double* layer_data(int l) { return data_.data() + static_cast<size_t>(l) * rows_ * cols_; }
    const double* layer_data(int l) const {
        return data_.data() + static_cast<size_t>(l) * rows_ * cols_;
    }

    GrayImage layer(int l) const {
        GrayImage img(rows_, cols_);
        const double* src = layer_data(l);
        std::copy(src, src + static_cast<size_t>(rows_) * cols_, img.data());
        return img;
    }
    void set_layer(int l, const GrayImage& img) {
        if (img.rows() != rows_ || img.cols() != cols_)
            throw std::invalid_argument("ImageStack::set_layer: dimension mismatch");
        std::copy(img.data(), img.data() + img.size(), layer_data(l));
    }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }
    std::vector<double>& samples() { return data_; }
    const std::vector<double>& samples() const { return data_; }

private:
    static size_t check_dims(int layers, int rows, int cols) {
        if (layers < 1 || rows < 1 || cols < 1)
            throw std::invalid_argument("ImageStack: dimensions must be >= 1");
        return static_cast<size_t>(layers) * rows * cols;
    }

    int layers_ = 0;
    int rows_ = 0;
    int cols_ = 0;
    double dt_ = 1.0;
    std::vector<double> data_;
};

double min_value(const GrayImage& img);
double max_value(const GrayImage& img);
double mean_value(const GrayImage& img);

/// Affine map of [min,max] onto [0,1]; a constant image maps to all zeros.
GrayImage normalize_to_unit(const GrayImage& img);

}  // namespace polarfog
