#include "polarfog/io/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

namespace polarfog::io {

namespace fs = std::filesystem;

namespace {

[[noreturn]] void fail(const fs::path& path, const std::string& what) {
    throw std::runtime_error(path.string() + ": " + what);
}

struct File {
    File(const fs::path& path, const char* mode) : f(std::fopen(path.c_str(), mode)) {}
    ~File() {
        if (f) std::fclose(f);
    }
    File(const File&) = delete;
    File& operator=(const File&) = delete;
    FILE* f;
};

fs::path temp_name(const fs::path& path) {
    fs::path tmp = path;
    tmp += ".tmp";
    return tmp;
}

void commit(const fs::path& tmp, const fs::path& path) {
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp);
        fail(path, "rename failed: " + ec.message());
    }
}

// ---- PGM (binary P5) ----

int pgm_read_token(std::istream& in) {
    // skip whitespace and '#' comments
    int ch = in.get();
    while (ch != EOF) {
        if (ch == '#') {
            while (ch != EOF && ch != '\n') ch = in.get();
        } else if (!std::isspace(ch)) {
            break;
        }
        ch = in.get();
    }
    if (ch == EOF) return -1;
    int value = 0;
    while (ch != EOF && std::isdigit(ch)) {
        value = value * 10 + (ch - '0');
        ch = in.get();
    }
    return value;
}

GrayImage load_pgm(const fs::path& path, bool normalize) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(path, "cannot open");
    char magic[2] = {0, 0};
    in.read(magic, 2);
    if (magic[0] != 'P' || magic[1] != '5') fail(path, "not a binary PGM (P5)");

    const int cols = pgm_read_token(in);
    const int rows = pgm_read_token(in);
    const int maxval = pgm_read_token(in);
    if (cols <= 0 || rows <= 0) fail(path, "zero-sized image");
    if (maxval <= 0 || maxval > 65535) fail(path, "unsupported PGM maxval");

    const bool wide = maxval > 255;
    const size_t npix = static_cast<size_t>(rows) * cols;
    std::vector<unsigned char> raw(npix * (wide ? 2 : 1));
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (static_cast<size_t>(in.gcount()) != raw.size()) fail(path, "truncated pixel data");

    GrayImage img(rows, cols);
    const double scale = normalize ? 1.0 / maxval : 1.0;
    for (size_t i = 0; i < npix; ++i) {
        const unsigned v = wide ? (static_cast<unsigned>(raw[2 * i]) << 8) | raw[2 * i + 1]
                                : raw[i];
        img.samples()[i] = v * scale;
    }
    return img;
}

void save_pgm16_impl(const fs::path& path, const GrayImage& img, double vmin, double vmax) {
    const fs::path tmp = temp_name(path);
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) fail(path, "cannot open for writing");
        out << "P5\n" << img.cols() << " " << img.rows() << "\n65535\n";
        const double scale = vmax > vmin ? 65535.0 / (vmax - vmin) : 0.0;
        std::vector<unsigned char> raw(img.size() * 2);
        for (size_t i = 0; i < img.size(); ++i) {
            double v = (img.samples()[i] - vmin) * scale;
            v = std::clamp(v, 0.0, 65535.0);
            const unsigned q = static_cast<unsigned>(std::lround(v));
            raw[2 * i] = static_cast<unsigned char>(q >> 8);
            raw[2 * i + 1] = static_cast<unsigned char>(q & 0xff);
        }
        out.write(reinterpret_cast<const char*>(raw.data()),
                  static_cast<std::streamsize>(raw.size()));
        if (!out) fail(path, "write failed");
    }
    commit(tmp, path);
}

// ---- PNG ----

GrayImage load_png(const fs::path& path, bool normalize) {
    File file(path, "rb");
    if (!file.f) fail(path, "cannot open");

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) fail(path, "libpng init failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        fail(path, "libpng init failed");
    }

    std::vector<png_bytep> row_ptrs;
    std::vector<unsigned char> pixels;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        fail(path, "PNG decode error");
    }

    png_init_io(png, file.f);
    png_read_info(png, info);

    const png_uint_32 width = png_get_image_width(png, info);
    const png_uint_32 height = png_get_image_height(png, info);
    int bit_depth = png_get_bit_depth(png, info);
    int color_type = png_get_color_type(png, info);

    if (width == 0 || height == 0) {
        png_destroy_read_struct(&png, &info, nullptr);
        fail(path, "zero-sized image");
    }

    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8)
        png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    if (color_type & PNG_COLOR_MASK_ALPHA || png_get_valid(png, info, PNG_INFO_tRNS))
        png_set_strip_alpha(png);
    png_set_interlace_handling(png);
    png_read_update_info(png, info);

    bit_depth = png_get_bit_depth(png, info);
    color_type = png_get_color_type(png, info);
    const int channels = png_get_channels(png, info);
    if ((bit_depth != 8 && bit_depth != 16) || (channels != 1 && channels != 3)) {
        png_destroy_read_struct(&png, &info, nullptr);
        fail(path, "unsupported bit depth or channel layout");
    }

    const size_t row_bytes = png_get_rowbytes(png, info);
    pixels.resize(row_bytes * height);
    row_ptrs.resize(height);
    for (png_uint_32 r = 0; r < height; ++r) row_ptrs[r] = pixels.data() + r * row_bytes;
    png_read_image(png, row_ptrs.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    GrayImage img(static_cast<int>(height), static_cast<int>(width));
    const double maxval = bit_depth == 16 ? 65535.0 : 255.0;
    const double scale = normalize ? 1.0 / maxval : 1.0;
    const int bytes = bit_depth / 8;
    for (png_uint_32 r = 0; r < height; ++r) {
        const unsigned char* row = pixels.data() + r * row_bytes;
        for (png_uint_32 c = 0; c < width; ++c) {
            double acc = 0.0;
            for (int ch = 0; ch < channels; ++ch) {
                const unsigned char* p = row + (c * channels + ch) * bytes;
                const unsigned v = bytes == 2 ? (static_cast<unsigned>(p[0]) << 8) | p[1] : p[0];
                acc += static_cast<double>(v);
            }
            img.at(static_cast<int>(r), static_cast<int>(c)) = acc / channels * scale;
        }
    }
    return img;
}

void save_png16_impl(const fs::path& path, const GrayImage& img, double vmin, double vmax) {
    const fs::path tmp = temp_name(path);
    {
        File file(tmp, "wb");
        if (!file.f) fail(path, "cannot open for writing");

        png_structp png =
            png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
        if (!png) fail(path, "libpng init failed");
        png_infop info = png_create_info_struct(png);
        if (!info) {
            png_destroy_write_struct(&png, nullptr);
            fail(path, "libpng init failed");
        }
        if (setjmp(png_jmpbuf(png))) {
            png_destroy_write_struct(&png, &info);
            fail(path, "PNG encode error");
        }

        png_init_io(png, file.f);
        png_set_IHDR(png, info, static_cast<png_uint_32>(img.cols()),
                     static_cast<png_uint_32>(img.rows()), 16, PNG_COLOR_TYPE_GRAY,
                     PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                     PNG_FILTER_TYPE_DEFAULT);
        png_write_info(png, info);

        const double scale = vmax > vmin ? 65535.0 / (vmax - vmin) : 0.0;
        std::vector<unsigned char> row(static_cast<size_t>(img.cols()) * 2);
        for (int r = 0; r < img.rows(); ++r) {
            for (int c = 0; c < img.cols(); ++c) {
                double v = (img.at(r, c) - vmin) * scale;
                v = std::clamp(v, 0.0, 65535.0);
                const unsigned q = static_cast<unsigned>(std::lround(v));
                row[2 * c] = static_cast<unsigned char>(q >> 8);
                row[2 * c + 1] = static_cast<unsigned char>(q & 0xff);
            }
            png_write_row(png, row.data());
        }
        png_write_end(png, nullptr);
        png_destroy_write_struct(&png, &info);
    }
    commit(tmp, path);
}

}  // namespace

GrayImage load_image(const fs::path& path, bool normalize) {
    std::ifstream probe(path, std::ios::binary);
    if (!probe) fail(path, "cannot open");
    unsigned char magic[2] = {0, 0};
    probe.read(reinterpret_cast<char*>(magic), 2);
    probe.close();

    if (magic[0] == 'P' && magic[1] == '5') return load_pgm(path, normalize);
    if (magic[0] == 0x89 && magic[1] == 'P') return load_png(path, normalize);
    fail(path, "unsupported format (expected PNG or binary PGM)");
}

void save_png16(const fs::path& path, const GrayImage& img, double vmin, double vmax) {
    if (img.empty()) fail(path, "refusing to write empty image");
    save_png16_impl(path, img, vmin, vmax);
}

void save_pgm16(const fs::path& path, const GrayImage& img, double vmin, double vmax) {
    if (img.empty()) fail(path, "refusing to write empty image");
    save_pgm16_impl(path, img, vmin, vmax);
}

void save_image(const fs::path& path, const GrayImage& img, double vmin, double vmax) {
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char ch) { return std::tolower(ch); });
    if (ext == ".png")
        save_png16(path, img, vmin, vmax);
    else if (ext == ".pgm")
        save_pgm16(path, img, vmin, vmax);
    else
        fail(path, "unsupported output extension (use .png or .pgm)");
}

void write_text_atomic(const fs::path& path, const std::string& contents) {
    const fs::path tmp = temp_name(path);
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) fail(path, "cannot open for writing");
        out << contents;
        if (!out) fail(path, "write failed");
    }
    commit(tmp, path);
}

}  // namespace polarfog::io
