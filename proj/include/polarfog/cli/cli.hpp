#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "polarfog/diffusion/dehaze.hpp"
#include "polarfog/mosaic/mosaic.hpp"

namespace polarfog::cli {

/// Everything a subcommand run needs. Numeric fields are validated against
/// the owning module's rules before any file is touched.
struct RunConfig {
    diffusion::DehazeParams dehaze;
    std::string layout = "90,45,135,0";  // TL,TR,BL,BR
    double metric_threshold = 0.05;
    int histmatch_bins = 256;
    std::string planes = "s0,dolp";  // pipeline plane selection
    unsigned long long seed = 0;     // reserved; the pipeline is deterministic

    std::vector<std::string> inputs;
    std::string output;
    std::string save_stack;
    std::string ref;       // histmatch reference
    std::string original;  // metrics original
    std::string restored;  // metrics restored
    std::string depth;     // synth depth map
    std::string airlight_out;
    double beta = 1.0;
    double a_inf = 1.0;
    double depth_scale = 1.0;
    bool raw_load = false;  // skip [0,1] normalization on load
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Parse a `key = value` config file ('#' comments) onto defaults. Unknown
/// keys and malformed values raise ConfigError naming the line.
RunConfig load_config(const std::filesystem::path& path);

/// Apply config-file values to cfg, skipping keys in `overridden` (those came
/// from command-line flags, which take precedence).
void apply_config_file(const std::filesystem::path& path, RunConfig& cfg,
                       const std::vector<std::string>& overridden);

/// Worker count for batch processing: POLARFOG_THREADS caps it, 0/unset means
/// hardware concurrency; always at least 1 and at most `jobs`.
int worker_count(size_t jobs);

/// Entry point. Exit codes: 0 success, 1 at least one per-file failure
/// (processing continues, failures listed on err), 2 configuration error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv);

}  // namespace polarfog::cli
