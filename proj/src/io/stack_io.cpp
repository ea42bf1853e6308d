#include "polarfog/io/stack_io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "polarfog/io/image_io.hpp"

namespace polarfog::io {

namespace fs = std::filesystem;

namespace {

std::string layer_name(int index) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "layer_%04d.pgm", index);
    return buf;
}

}  // namespace

void save_stack(const fs::path& dir, const ImageStack& stack) {
    if (stack.empty()) throw std::invalid_argument("save_stack: empty stack");
    fs::create_directories(dir);

    double vmin = stack.samples()[0], vmax = stack.samples()[0];
    for (double v : stack.samples()) {
        vmin = std::min(vmin, v);
        vmax = std::max(vmax, v);
    }
    if (vmax <= vmin) vmax = vmin + 1.0;  // constant volume still round-trips

    for (int l = 0; l < stack.layers(); ++l)
        save_pgm16(dir / layer_name(l), stack.layer(l), vmin, vmax);

    std::ostringstream meta;
    meta << "layers=" << stack.layers() << "\n"
         << "rows=" << stack.rows() << "\n"
         << "cols=" << stack.cols() << "\n"
         << "dt=" << std::setprecision(17) << stack.dt() << "\n"
         << "vmin=" << std::setprecision(17) << vmin << "\n"
         << "vmax=" << std::setprecision(17) << vmax << "\n";
    write_text_atomic(dir / "meta.txt", meta.str());
}

ImageStack load_stack(const fs::path& dir) {
    std::ifstream meta(dir / "meta.txt");
    if (!meta) throw std::runtime_error((dir / "meta.txt").string() + ": cannot open");

    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(meta, line)) {
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        kv[line.substr(0, eq)] = line.substr(eq + 1);
    }
    for (const char* key : {"layers", "rows", "cols", "dt"})
        if (!kv.count(key))
            throw std::runtime_error(dir.string() + ": meta.txt missing key " + key);

    const int layers = std::stoi(kv["layers"]);
    const int rows = std::stoi(kv["rows"]);
    const int cols = std::stoi(kv["cols"]);
    const double dt = std::stod(kv["dt"]);
    const double vmin = kv.count("vmin") ? std::stod(kv["vmin"]) : 0.0;
    const double vmax = kv.count("vmax") ? std::stod(kv["vmax"]) : 1.0;

    ImageStack stack(layers, rows, cols, 0.0, dt);
    for (int l = 0; l < layers; ++l) {
        GrayImage layer = load_image(dir / layer_name(l), true);
        if (layer.rows() != rows || layer.cols() != cols)
            throw std::runtime_error(dir.string() + ": layer dims disagree with meta.txt");
        for (double& v : layer.samples()) v = vmin + v * (vmax - vmin);
        stack.set_layer(l, layer);
    }
    return stack;
}

}  // namespace polarfog::io
