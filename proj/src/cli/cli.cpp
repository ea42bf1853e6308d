#include "polarfog/cli/cli.hpp"

#include <CLI11.hpp>
#include <fnmatch.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "polarfog/histmatch/histmatch.hpp"
#include "polarfog/io/image_io.hpp"
#include "polarfog/io/stack_io.hpp"
#include "polarfog/metrics/metrics.hpp"
#include "polarfog/scatter/scatter.hpp"

namespace polarfog::cli {

namespace fs = std::filesystem;

namespace {

// ---------------------------------------------------------------- config file

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

std::string normalize_key(std::string key) {
    std::replace(key.begin(), key.end(), '_', '-');
    return key;
}

long long parse_ll(const std::string& value, const std::string& where) {
    size_t consumed = 0;
    long long parsed = 0;
    try {
        parsed = std::stoll(value, &consumed);
    } catch (const std::exception&) {
        throw ConfigError(where + ": expected an integer, got '" + value + "'");
    }
    if (consumed != value.size())
        throw ConfigError(where + ": expected an integer, got '" + value + "'");
    return parsed;
}

double parse_d(const std::string& value, const std::string& where) {
    size_t consumed = 0;
    double parsed = 0.0;
    try {
        parsed = std::stod(value, &consumed);
    } catch (const std::exception&) {
        throw ConfigError(where + ": expected a number, got '" + value + "'");
    }
    if (consumed != value.size())
        throw ConfigError(where + ": expected a number, got '" + value + "'");
    return parsed;
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& config_setters() {
    static const std::map<std::string, Setter> table = {
        {"layers", [](RunConfig& c, const std::string& v, const std::string& w) {
             c.dehaze.layers = static_cast<int>(parse_ll(v, w));
         }},
        {"outputs", [](RunConfig& c, const std::string& v, const std::string& w) {
             c.dehaze.outputs = static_cast<int>(parse_ll(v, w));
         }},
        {"k-diff", [](RunConfig& c, const std::string& v, const std::string& w) {
             c.dehaze.k_diff = parse_d(v, w);
         }},
        {"sigma-max", [](RunConfig& c, const std::string& v, const std::string& w) {
             c.dehaze.sigma_max = parse_d(v, w);
         }},
        {"t-downsample", [](RunConfig& c, const std::string& v, const std::string& w) {
             c.dehaze.t_downsample = static_cast<int>(parse_ll(v, w));
         }},
        {"s-downsample", [](RunConfig& c, const std::string& v, const std::string& w) {
             c.dehaze.s_downsample = static_cast<int>(parse_ll(v, w));
         }},
        {"pad-t", [](RunConfig& c, const std::string& v, const std::string& w) {
             c.dehaze.pad_t = static_cast<int>(parse_ll(v, w));
         }},
        {"pad-s", [](RunConfig& c, const std::string& v, const std::string& w) {
             c.dehaze.pad_s = static_cast<int>(parse_ll(v, w));
         }},
        {"smooth-window", [](RunConfig& c, const std::string& v, const std::string& w) {
             c.dehaze.smooth_window = static_cast<int>(parse_ll(v, w));
         }},
        {"t-extend-factor", [](RunConfig& c, const std::string& v, const std::string& w) {
             c.dehaze.t_extend_factor = static_cast<int>(parse_ll(v, w));
         }},
        {"threshold", [](RunConfig& c, const std::string& v, const std::string& w) {
             c.metric_threshold = parse_d(v, w);
         }},
        {"bins", [](RunConfig& c, const std::string& v, const std::string& w) {
             c.histmatch_bins = static_cast<int>(parse_ll(v, w));
         }},
        {"layout", [](RunConfig& c, const std::string& v, const std::string&) {
             c.layout = v;
         }},
        {"planes", [](RunConfig& c, const std::string& v, const std::string&) {
             c.planes = v;
         }},
        {"seed", [](RunConfig& c, const std::string& v, const std::string& w) {
             c.seed = static_cast<unsigned long long>(parse_ll(v, w));
         }},
    };
    return table;
}

// ------------------------------------------------------------ input expansion

bool has_image_extension(const fs::path& p) {
    std::string ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char ch) { return std::tolower(ch); });
    return ext == ".png" || ext == ".pgm";
}

// batch outputs are named by input stem; collisions would race on the same path
void require_unique_stems(const std::vector<fs::path>& files) {
    std::set<std::string> seen;
    for (const fs::path& f : files)
        if (!seen.insert(f.stem().string()).second)
            throw ConfigError("duplicate input stem '" + f.stem().string() +
                              "' would collide in the output directory");
}

std::vector<fs::path> expand_inputs(const std::vector<std::string>& inputs) {
    std::vector<fs::path> files;
    for (const std::string& entry : inputs) {
        const fs::path path(entry);
        if (fs::is_directory(path)) {
            std::vector<fs::path> found;
            for (const auto& item : fs::directory_iterator(path))
                if (item.is_regular_file() && has_image_extension(item.path()))
                    found.push_back(item.path());
            std::sort(found.begin(), found.end());
            files.insert(files.end(), found.begin(), found.end());
        } else if (entry.find_first_of("*?[") != std::string::npos) {
            const fs::path dir = path.parent_path().empty() ? "." : path.parent_path();
            const std::string pattern = path.filename().string();
            std::vector<fs::path> found;
            if (fs::is_directory(dir))
                for (const auto& item : fs::directory_iterator(dir))
                    if (item.is_regular_file() &&
                        fnmatch(pattern.c_str(), item.path().filename().c_str(), 0) == 0)
                        found.push_back(item.path());
            std::sort(found.begin(), found.end());
            files.insert(files.end(), found.begin(), found.end());
        } else {
            files.push_back(path);
        }
    }
    if (files.empty()) throw ConfigError("empty input set");
    return files;
}

// --------------------------------------------------------------- batch runner

struct FileResult {
    bool ok = false;
    std::string error;
    std::string csv;
    std::string note;  // extra per-file detail for stderr (stage timing, counts)
    double seconds = 0.0;
};

int run_batch(const std::vector<fs::path>& files,
              const std::function<void(const fs::path&, FileResult&)>& process,
              std::ostream& out, std::ostream& err) {
    std::vector<FileResult> results(files.size());
    const int workers = worker_count(files.size());
    std::atomic<size_t> next{0};

    auto worker = [&]() {
        for (size_t i = next.fetch_add(1); i < files.size(); i = next.fetch_add(1)) {
            const auto start = std::chrono::steady_clock::now();
            try {
                process(files[i], results[i]);
                results[i].ok = true;
            } catch (const std::exception& e) {
                results[i].error = e.what();
            }
            results[i].seconds =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                    .count();
        }
    };

    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<size_t>(workers));
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }

    bool any_failed = false;
    for (size_t i = 0; i < files.size(); ++i) {
        const FileResult& r = results[i];
        if (r.ok) {
            char buf[64];
            std::snprintf(buf, sizeof(buf), "%.2f", r.seconds);
            err << files[i].string() << ": ok (" << buf << " s)";
            if (!r.note.empty()) err << " [" << r.note << "]";
            err << "\n";
            out << r.csv;
        } else {
            any_failed = true;
            err << files[i].string() << ": error: " << r.error << "\n";
        }
    }
    return any_failed ? 1 : 0;
}

// ------------------------------------------------------------- plane handling

struct PlaneImage {
    std::string name;
    GrayImage image;
    double vmin = 0.0;
    double vmax = 1.0;
};

std::vector<PlaneImage> product_planes(const mosaic::PolarFrame& frame) {
    const double half_pi = std::asin(1.0);
    return {
        {"i0", frame.i0, 0.0, 1.0},       {"i45", frame.i45, 0.0, 1.0},
        {"i90", frame.i90, 0.0, 1.0},     {"i135", frame.i135, 0.0, 1.0},
        {"s0", frame.s0, 0.0, 2.0},       {"s1", frame.s1, -1.0, 1.0},
        {"s2", frame.s2, -1.0, 1.0},      {"dolp", frame.dolp, 0.0, 1.0},
        {"aolp", frame.aolp, -half_pi, half_pi},
    };
}

/// Affine map of a plane onto [0,1] for processing. s0 rescales by its own
/// maximum; the others use their natural range.
GrayImage plane_to_unit(const std::string& name, const GrayImage& plane) {
    GrayImage out = plane;
    if (name == "s0") {
        const double hi = max_value(plane);
        if (hi > 0.0)
            for (double& v : out.samples()) v /= hi;
        return out;
    }
    if (name == "s1" || name == "s2") {
        for (double& v : out.samples()) v = 0.5 * (v + 1.0);
        return out;
    }
    if (name == "aolp") {
        const double half_pi = std::asin(1.0);
        for (double& v : out.samples()) v = (v + half_pi) / (2.0 * half_pi);
        return out;
    }
    return out;  // i*, dolp already in [0,1]
}

std::vector<std::string> parse_planes(const std::string& text) {
    static const std::set<std::string> known = {"i0", "i45", "i90",  "i135", "s0",
                                                "s1", "s2",  "dolp", "aolp"};
    std::vector<std::string> planes;
    std::istringstream in(text);
    std::string tok;
    while (std::getline(in, tok, ',')) {
        tok = trim(tok);
        if (tok.empty()) continue;
        if (!known.count(tok)) throw ConfigError("unknown plane '" + tok + "'");
        planes.push_back(tok);
    }
    if (planes.empty()) throw ConfigError("no planes selected");
    return planes;
}

const GrayImage& frame_plane(const mosaic::PolarFrame& frame, const std::string& name) {
    if (name == "i0") return frame.i0;
    if (name == "i45") return frame.i45;
    if (name == "i90") return frame.i90;
    if (name == "i135") return frame.i135;
    if (name == "s0") return frame.s0;
    if (name == "s1") return frame.s1;
    if (name == "s2") return frame.s2;
    if (name == "dolp") return frame.dolp;
    return frame.aolp;
}

// ----------------------------------------------------------------- CSV output

constexpr const char* kCsvHeader = "file,e,rbar,sigma,sd,ag,n_o,n_r,n_s,threshold\n";

std::string csv_row(const std::string& file, const metrics::MetricsReport& m) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%.9g,%.9g,%.9g,%.9g,%.9g,%ld,%ld,%ld,%.9g", m.e,
                  m.r_bar, m.sigma, m.sd, m.ag, m.n_o, m.n_r, m.n_s, m.threshold);
    return file + "," + buf + "\n";
}

// ----------------------------------------------------------------- subcommands

fs::path output_dir_for(const RunConfig& cfg) {
    if (cfg.output.empty()) throw ConfigError("missing output (-o)");
    fs::create_directories(cfg.output);
    return cfg.output;
}

void write_products(const fs::path& dir, const std::string& stem,
                    const mosaic::PolarFrame& frame, bool all_planes) {
    std::ostringstream ranges;
    for (const PlaneImage& p : product_planes(frame)) {
        if (!all_planes && p.name != "s0" && p.name != "s1" && p.name != "dolp" &&
            p.name != "aolp")
            continue;
        io::save_png16(dir / (stem + "_" + p.name + ".png"), p.image, p.vmin, p.vmax);
        ranges << p.name << " vmin=" << p.vmin << " vmax=" << p.vmax << "\n";
    }
    io::write_text_atomic(dir / (stem + "_ranges.txt"), ranges.str());
}

int cmd_demosaic(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const auto files = expand_inputs(cfg.inputs);
    require_unique_stems(files);
    const mosaic::MosaicLayout layout = mosaic::parse_layout(cfg.layout);
    const fs::path dir = output_dir_for(cfg);

    return run_batch(
        files,
        [&](const fs::path& file, FileResult& result) {
            const GrayImage raw = io::load_image(file, !cfg.raw_load);
            mosaic::DolpReport report;
            const mosaic::PolarFrame frame = mosaic::process_mosaic(raw, layout, &report);
            write_products(dir, file.stem().string(), frame, true);
            if (report.degenerate > 0 || report.clamped > 0) {
                char buf[96];
                std::snprintf(buf, sizeof(buf), "dolp degenerate %ld, clamped %ld",
                              report.degenerate, report.clamped);
                result.note = buf;
            }
        },
        out, err);
}

int cmd_dehaze(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const auto files = expand_inputs(cfg.inputs);
    if (cfg.output.empty()) throw ConfigError("missing output (-o)");

    const bool single_file_output = files.size() == 1 && has_image_extension(cfg.output);
    if (files.size() > 1 && has_image_extension(cfg.output))
        throw ConfigError("multiple inputs need an output directory, not a file");
    if (!single_file_output) require_unique_stems(files);
    fs::path out_dir;
    if (!single_file_output) {
        fs::create_directories(cfg.output);
        out_dir = cfg.output;
    } else if (fs::path(cfg.output).has_parent_path()) {
        fs::create_directories(fs::path(cfg.output).parent_path());
    }

    return run_batch(
        files,
        [&](const fs::path& file, FileResult& fr) {
            const auto t0 = std::chrono::steady_clock::now();
            const GrayImage img = io::load_image(file, !cfg.raw_load);
            const auto t1 = std::chrono::steady_clock::now();
            const diffusion::DehazeResult result = diffusion::dehaze(img, cfg.dehaze);
            const auto t2 = std::chrono::steady_clock::now();
            const fs::path target = single_file_output
                                        ? fs::path(cfg.output)
                                        : out_dir / (file.stem().string() + "_dehazed.png");
            io::save_image(target, result.output, 0.0, 1.0);
            if (!cfg.save_stack.empty()) {
                const fs::path stack_dir =
                    files.size() == 1 ? fs::path(cfg.save_stack)
                                      : fs::path(cfg.save_stack) / file.stem().string();
                io::save_stack(stack_dir, result.sequence);
            }
            const auto t3 = std::chrono::steady_clock::now();
            const auto secs = [](auto a, auto b) {
                return std::chrono::duration<double>(b - a).count();
            };
            char buf[96];
            std::snprintf(buf, sizeof(buf), "load %.2fs, dehaze %.2fs, write %.2fs",
                          secs(t0, t1), secs(t1, t2), secs(t2, t3));
            fr.note = buf;
        },
        out, err);
}

int cmd_synth(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const auto files = expand_inputs(cfg.inputs);
    if (files.size() != 1) throw ConfigError("synth expects exactly one scene image");
    if (cfg.depth.empty()) throw ConfigError("synth requires --depth");
    if (cfg.output.empty()) throw ConfigError("missing output (-o)");

    return run_batch(
        files,
        [&](const fs::path& file, FileResult&) {
            const GrayImage scene = io::load_image(file, !cfg.raw_load);
            scatter::ScatterParams params;
            params.beta = cfg.beta;
            params.a_inf = cfg.a_inf;
            params.depth = io::load_image(cfg.depth, true);
            for (double& z : params.depth.samples()) z *= cfg.depth_scale;
            const scatter::HazyScene scene_out = scatter::synth_haze(scene, params);
            io::save_image(cfg.output, scene_out.hazy, 0.0, 1.0);
            if (!cfg.airlight_out.empty())
                io::save_image(cfg.airlight_out, scene_out.airlight, 0.0, 1.0);
        },
        out, err);
}

int cmd_metrics(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    if (cfg.original.empty() || cfg.restored.empty())
        throw ConfigError("metrics requires --original and --restored");

    std::vector<std::pair<fs::path, fs::path>> pairs;
    if (fs::is_directory(cfg.original) && fs::is_directory(cfg.restored)) {
        std::vector<fs::path> originals;
        for (const auto& item : fs::directory_iterator(cfg.original))
            if (item.is_regular_file() && has_image_extension(item.path()))
                originals.push_back(item.path());
        std::sort(originals.begin(), originals.end());
        for (const fs::path& o : originals) {
            const fs::path r = fs::path(cfg.restored) / o.filename();
            if (fs::exists(r)) pairs.emplace_back(o, r);
        }
    } else {
        pairs.emplace_back(cfg.original, cfg.restored);
    }
    if (pairs.empty()) throw ConfigError("empty input set");

    std::vector<fs::path> files;
    files.reserve(pairs.size());
    for (const auto& p : pairs) files.push_back(p.second);

    out << kCsvHeader;
    std::map<std::string, fs::path> original_of;
    for (const auto& p : pairs) original_of[p.second.string()] = p.first;

    return run_batch(
        files,
        [&](const fs::path& file, FileResult& result) {
            const GrayImage original = io::load_image(original_of.at(file.string()), true);
            const GrayImage restored = io::load_image(file, true);
            const metrics::MetricsReport report =
                metrics::compute_metrics(original, restored, cfg.metric_threshold);
            result.csv = csv_row(file.string(), report);
        },
        out, err);
}

int cmd_histmatch(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const auto files = expand_inputs(cfg.inputs);
    if (cfg.ref.empty()) throw ConfigError("histmatch requires --ref");
    if (cfg.output.empty()) throw ConfigError("missing output (-o)");

    const bool single_file_output = files.size() == 1 && has_image_extension(cfg.output);
    if (files.size() > 1 && has_image_extension(cfg.output))
        throw ConfigError("multiple inputs need an output directory, not a file");
    if (!single_file_output) {
        require_unique_stems(files);
        fs::create_directories(cfg.output);
    }

    const GrayImage ref = io::load_image(cfg.ref, true);
    return run_batch(
        files,
        [&](const fs::path& file, FileResult&) {
            const GrayImage src = io::load_image(file, true);
            const GrayImage matched = histmatch::match_histogram(src, ref, cfg.histmatch_bins);
            const fs::path target =
                single_file_output
                    ? fs::path(cfg.output)
                    : fs::path(cfg.output) / (file.stem().string() + "_matched.png");
            io::save_image(target, matched, 0.0, 1.0);
        },
        out, err);
}

int cmd_pipeline(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const auto files = expand_inputs(cfg.inputs);
    require_unique_stems(files);
    const mosaic::MosaicLayout layout = mosaic::parse_layout(cfg.layout);
    const auto planes = parse_planes(cfg.planes);
    const fs::path dir = output_dir_for(cfg);

    out << kCsvHeader;
    return run_batch(
        files,
        [&](const fs::path& file, FileResult& result) {
            const std::string stem = file.stem().string();
            const GrayImage raw = io::load_image(file, !cfg.raw_load);
            const mosaic::PolarFrame frame = mosaic::process_mosaic(raw, layout);
            write_products(dir, stem, frame, false);

            std::ostringstream rows;
            for (const std::string& plane : planes) {
                const GrayImage original = plane_to_unit(plane, frame_plane(frame, plane));
                const diffusion::DehazeResult dehazed = diffusion::dehaze(original, cfg.dehaze);
                const GrayImage matched = histmatch::match_histogram(
                    dehazed.output, original, cfg.histmatch_bins);

                const std::string dehazed_name = stem + "_" + plane + "_dehazed.png";
                const std::string matched_name = stem + "_" + plane + "_matched.png";
                io::save_png16(dir / dehazed_name, dehazed.output, 0.0, 1.0);
                io::save_png16(dir / matched_name, matched, 0.0, 1.0);

                rows << csv_row(dehazed_name, metrics::compute_metrics(
                                                  original, dehazed.output,
                                                  cfg.metric_threshold));
                rows << csv_row(matched_name,
                                metrics::compute_metrics(original, matched,
                                                         cfg.metric_threshold));
            }
            result.csv = rows.str();
        },
        out, err);
}

// --------------------------------------------------------------------- driver

struct OptionKeys {
    std::vector<std::pair<CLI::Option*, std::string>> entries;

    void track(CLI::Option* opt, const std::string& key) { entries.emplace_back(opt, key); }
    std::vector<std::string> overridden() const {
        std::vector<std::string> keys;
        for (const auto& [opt, key] : entries)
            if (opt->count() > 0) keys.push_back(key);
        return keys;
    }
};

void add_dehaze_options(CLI::App* sub, RunConfig& cfg, OptionKeys& keys) {
    keys.track(sub->add_option("--layers", cfg.dehaze.layers, "Diffusion stack depth"),
               "layers");
    keys.track(sub->add_option("--outputs", cfg.dehaze.outputs, "Output sequence length"),
               "outputs");
    keys.track(sub->add_option("--k-diff", cfg.dehaze.k_diff, "Diffusion coefficient K"),
               "k-diff");
    keys.track(sub->add_option("--sigma-max", cfg.dehaze.sigma_max, "Largest blur sigma (px)"),
               "sigma-max");
    keys.track(sub->add_option("--t-downsample", cfg.dehaze.t_downsample,
                               "Temporal keep-every-n"),
               "t-downsample");
    keys.track(sub->add_option("--s-downsample", cfg.dehaze.s_downsample,
                               "Spatial downsample factor"),
               "s-downsample");
    keys.track(sub->add_option("--pad-t", cfg.dehaze.pad_t, "Replicate pad, time axis"),
               "pad-t");
    keys.track(sub->add_option("--pad-s", cfg.dehaze.pad_s, "Replicate pad, spatial axes"),
               "pad-s");
    keys.track(sub->add_option("--smooth-window", cfg.dehaze.smooth_window,
                               "Temporal moving-average width (odd)"),
               "smooth-window");
    keys.track(sub->add_option("--t-extend-factor", cfg.dehaze.t_extend_factor,
                               "Time-axis extension multiple"),
               "t-extend-factor");
    keys.track(sub->add_option("--seed", cfg.seed, "Reserved; the pipeline is deterministic"),
               "seed");
}

}  // namespace

RunConfig load_config(const fs::path& path) {
    RunConfig cfg;
    apply_config_file(path, cfg, {});
    return cfg;
}

void apply_config_file(const fs::path& path, RunConfig& cfg,
                       const std::vector<std::string>& overridden) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path.string() + ": cannot open config file");
    const std::set<std::string> skip(overridden.begin(), overridden.end());

    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        const std::string where = path.string() + ":" + std::to_string(lineno);
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(where + ": expected 'key = value'");
        const std::string key = normalize_key(trim(line.substr(0, eq)));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError(where + ": empty key");

        const auto it = config_setters().find(key);
        if (it == config_setters().end())
            throw ConfigError(where + ": unknown key '" + key + "'");
        if (skip.count(key)) continue;  // command-line flag takes precedence
        it->second(cfg, value, where);
    }
}

int worker_count(size_t jobs) {
    long requested = 0;
    if (const char* env = std::getenv("POLARFOG_THREADS")) {
        char* end = nullptr;
        requested = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || requested < 0)
            throw ConfigError("POLARFOG_THREADS must be a non-negative integer");
    }
    if (requested == 0) requested = static_cast<long>(std::thread::hardware_concurrency());
    if (requested < 1) requested = 1;
    return static_cast<int>(std::min<long>(requested, static_cast<long>(std::max<size_t>(jobs, 1))));
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    std::string config_path;
    OptionKeys keys;

    CLI::App app{"Polarization-image dehazing by simulated fog diffusion"};
    app.require_subcommand(1);

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "Config file (key = value lines)");
    };

    CLI::App* demosaic = app.add_subcommand("demosaic", "Split a polarization mosaic");
    demosaic->add_option("inputs", cfg.inputs, "Mosaic images")->required();
    demosaic->add_option("-o,--output", cfg.output, "Output directory");
    keys.track(demosaic->add_option("--layout", cfg.layout, "TL,TR,BL,BR angles"), "layout");
    demosaic->add_flag("--raw", cfg.raw_load, "Skip [0,1] normalization on load");
    add_common(demosaic);

    CLI::App* dehaze = app.add_subcommand("dehaze", "Dehaze grayscale images");
    dehaze->add_option("inputs", cfg.inputs, "Input images")->required();
    dehaze->add_option("-o,--output", cfg.output, "Output file or directory");
    dehaze->add_option("--save-stack", cfg.save_stack, "Directory for the output sequence");
    dehaze->add_flag("--raw", cfg.raw_load, "Skip [0,1] normalization on load");
    add_dehaze_options(dehaze, cfg, keys);
    add_common(dehaze);

    CLI::App* synth = app.add_subcommand("synth", "Synthesize haze over a clear scene");
    synth->add_option("inputs", cfg.inputs, "Scene image")->required();
    synth->add_option("-o,--output", cfg.output, "Hazy output image");
    synth->add_option("--depth", cfg.depth, "Depth map image")->required();
    synth->add_option("--depth-scale", cfg.depth_scale, "Scale mapping [0,1] depth to z");
    synth->add_option("--beta", cfg.beta, "Attenuation coefficient");
    synth->add_option("--ainf", cfg.a_inf, "Atmospheric light at infinity");
    synth->add_option("--airlight-out", cfg.airlight_out, "Optional airlight output");
    add_common(synth);

    CLI::App* metrics_cmd = app.add_subcommand("metrics", "Blind dehazing quality metrics");
    metrics_cmd->add_option("--original", cfg.original, "Original image or directory")
        ->required();
    metrics_cmd->add_option("--restored", cfg.restored, "Restored image or directory")
        ->required();
    keys.track(metrics_cmd->add_option("--threshold", cfg.metric_threshold,
                                       "Visible-edge threshold"),
               "threshold");
    add_common(metrics_cmd);

    CLI::App* histmatch_cmd = app.add_subcommand("histmatch", "Match histogram to a reference");
    histmatch_cmd->add_option("inputs", cfg.inputs, "Input images")->required();
    histmatch_cmd->add_option("--ref", cfg.ref, "Reference image")->required();
    histmatch_cmd->add_option("-o,--output", cfg.output, "Output file or directory");
    keys.track(histmatch_cmd->add_option("--bins", cfg.histmatch_bins, "Histogram bins"),
               "bins");
    add_common(histmatch_cmd);

    CLI::App* pipeline = app.add_subcommand(
        "pipeline", "demosaic, per-plane dehaze, histogram match, metrics");
    pipeline->add_option("inputs", cfg.inputs, "Mosaic images or directories")->required();
    pipeline->add_option("-o,--output", cfg.output, "Output directory");
    keys.track(pipeline->add_option("--layout", cfg.layout, "TL,TR,BL,BR angles"), "layout");
    keys.track(pipeline->add_option("--planes", cfg.planes, "Planes to dehaze (CSV)"),
               "planes");
    keys.track(pipeline->add_option("--threshold", cfg.metric_threshold,
                                    "Visible-edge threshold"),
               "threshold");
    keys.track(pipeline->add_option("--bins", cfg.histmatch_bins, "Histogram bins"), "bins");
    pipeline->add_flag("--raw", cfg.raw_load, "Skip [0,1] normalization on load");
    add_dehaze_options(pipeline, cfg, keys);
    add_common(pipeline);

    std::vector<const char*> argv;
    argv.reserve(args.size());
    for (const std::string& a : args) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return 2;
    }

    try {
        if (!config_path.empty()) apply_config_file(config_path, cfg, keys.overridden());

        // validate everything up front, before touching any file
        cfg.dehaze.validate();
        mosaic::parse_layout(cfg.layout);
        parse_planes(cfg.planes);
        if (cfg.metric_threshold < 0.0) throw ConfigError("threshold must be >= 0");
        if (cfg.histmatch_bins < 2) throw ConfigError("bins must be >= 2");

        if (app.got_subcommand(demosaic)) return cmd_demosaic(cfg, out, err);
        if (app.got_subcommand(dehaze)) return cmd_dehaze(cfg, out, err);
        if (app.got_subcommand(synth)) return cmd_synth(cfg, out, err);
        if (app.got_subcommand(metrics_cmd)) return cmd_metrics(cfg, out, err);
        if (app.got_subcommand(histmatch_cmd)) return cmd_histmatch(cfg, out, err);
        if (app.got_subcommand(pipeline)) return cmd_pipeline(cfg, out, err);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

int run(int argc, const char* const* argv) {
    std::vector<std::string> args(argv, argv + argc);
    return run(args, std::cout, std::cerr);
}

}  // namespace polarfog::cli
