#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "oracle_helpers.hpp"
#include "polarfog/cli/cli.hpp"
#include "polarfog/io/image_io.hpp"
#include "polarfog/io/stack_io.hpp"
#include "polarfog/scatter/scatter.hpp"

using namespace polarfog;
namespace fs = std::filesystem;

namespace {

fs::path test_dir() {
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / "polarfog_cli_tests";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

int run_cli(const std::vector<std::string>& args, std::string* out_text = nullptr,
            std::string* err_text = nullptr) {
    std::ostringstream out, err;
    std::vector<std::string> argv = {"polarfog"};
    argv.insert(argv.end(), args.begin(), args.end());
    const int code = cli::run(argv, out, err);
    if (out_text) *out_text = out.str();
    if (err_text) *err_text = err.str();
    return code;
}

std::vector<std::string> fast_flags() {
    return {"--layers", "10",       "--outputs", "6", "--sigma-max", "2",
            "--pad-t",  "2",        "--pad-s",   "4", "--smooth-window", "3"};
}

std::string read_bytes(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

GrayImage step_image(int rows, int cols) {
    GrayImage img(rows, cols, 0.25);
    for (int r = 0; r < rows; ++r)
        for (int c = cols / 2; c < cols; ++c) img.at(r, c) = 0.75;
    return img;
}

}  // namespace

TEST_CASE("load_config: empty file keeps library defaults") {
    const fs::path cfg = test_dir() / "empty.conf";
    std::ofstream(cfg) << "# nothing but a comment\n\n";
    const cli::RunConfig parsed = cli::load_config(cfg);
    CHECK(parsed.dehaze.layers == 100);
    CHECK(parsed.dehaze.outputs == 51);
    CHECK(parsed.dehaze.k_diff == 1.0);
    CHECK(parsed.histmatch_bins == 256);
}

TEST_CASE("load_config: values, comments, and underscore aliases") {
    const fs::path cfg = test_dir() / "values.conf";
    std::ofstream(cfg) << "layers = 12   # trailing comment\n"
                       << "k_diff = 2.5\n"
                       << "sigma-max=3.5\n"
                       << "planes = s0\n";
    const cli::RunConfig parsed = cli::load_config(cfg);
    CHECK(parsed.dehaze.layers == 12);
    CHECK(parsed.dehaze.k_diff == 2.5);
    CHECK(parsed.dehaze.sigma_max == 3.5);
    CHECK(parsed.planes == "s0");
}

TEST_CASE("load_config: malformed value names the line") {
    const fs::path cfg = test_dir() / "bad.conf";
    std::ofstream(cfg) << "layers = 10\nlayers = abc\n";
    try {
        cli::load_config(cfg);
        FAIL("expected ConfigError");
    } catch (const cli::ConfigError& e) {
        const std::string msg = e.what();
        CHECK(msg.find(":2") != std::string::npos);
        CHECK(msg.find("abc") != std::string::npos);
    }
}

TEST_CASE("load_config: unknown key names the line") {
    const fs::path cfg = test_dir() / "unknown.conf";
    std::ofstream(cfg) << "\n\nnot_a_key = 1\n";
    try {
        cli::load_config(cfg);
        FAIL("expected ConfigError");
    } catch (const cli::ConfigError& e) {
        const std::string msg = e.what();
        CHECK(msg.find(":3") != std::string::npos);
        CHECK(msg.find("not-a-key") != std::string::npos);
    }
}

TEST_CASE("flags override config file values which override defaults") {
    const fs::path cfg = test_dir() / "precedence.conf";
    std::ofstream(cfg) << "layers = 10\noutputs = 6\nsigma-max = 2\npad-t = 2\npad-s = 4\n";

    const fs::path input = test_dir() / "precedence_in.png";
    oracle::Rng rng(7);
    io::save_png16(input, oracle::random_image(rng, 24, 24));

    const fs::path stack_dir = test_dir() / "precedence_stack";
    const fs::path output = test_dir() / "precedence_out.png";
    std::string err;
    const int code =
        run_cli({"dehaze", input.string(), "-o", output.string(), "--config", cfg.string(),
                 "--layers", "20", "--save-stack", stack_dir.string()},
                nullptr, &err);
    REQUIRE(code == 0);
    // outputs=6 came from the file; layers=20 from the flag (else sequence
    // length would disagree): 20 layers -> 10 increments -> 11 averaged,
    // cropped to outputs=6
    const ImageStack seq = io::load_stack(stack_dir);
    CHECK(seq.layers() == 6);
}

TEST_CASE("dehaze subcommand writes an output of the input dimensions") {
    const fs::path input = test_dir() / "dehaze_in.png";
    io::save_png16(input, step_image(32, 32));
    const fs::path output = test_dir() / "dehaze_out.png";
    const fs::path stack_dir = test_dir() / "dehaze_stack";

    // library defaults end to end: 100 layers, 51 outputs
    std::string err;
    const int code = run_cli({"dehaze", input.string(), "-o", output.string(),
                              "--save-stack", stack_dir.string()},
                             nullptr, &err);
    REQUIRE(code == 0);
    const GrayImage out = io::load_image(output);
    CHECK(out.rows() == 32);
    CHECK(out.cols() == 32);
    const ImageStack seq = io::load_stack(stack_dir);
    CHECK(seq.layers() == 51);
    CHECK(seq.rows() == 32);
    CHECK(seq.cols() == 32);
}

TEST_CASE("dehaze reruns are byte-identical") {
    const fs::path input = test_dir() / "det_in.png";
    oracle::Rng rng(9);
    io::save_png16(input, oracle::random_image(rng, 20, 20));

    const fs::path out1 = test_dir() / "det_out1.png";
    const fs::path out2 = test_dir() / "det_out2.png";
    auto args1 = fast_flags();
    args1.insert(args1.begin(), {"dehaze", input.string(), "-o", out1.string()});
    auto args2 = fast_flags();
    args2.insert(args2.begin(), {"dehaze", input.string(), "-o", out2.string()});
    REQUIRE(run_cli(args1) == 0);
    REQUIRE(run_cli(args2) == 0);
    CHECK(read_bytes(out1) == read_bytes(out2));
}

TEST_CASE("metrics subcommand on an identity pair") {
    const fs::path img = test_dir() / "metrics_in.png";
    io::save_png16(img, step_image(16, 16));
    std::string csv;
    const int code =
        run_cli({"metrics", "--original", img.string(), "--restored", img.string()}, &csv);
    REQUIRE(code == 0);
    std::istringstream lines(csv);
    std::string header, row;
    std::getline(lines, header);
    std::getline(lines, row);
    CHECK(header == "file,e,rbar,sigma,sd,ag,n_o,n_r,n_s,threshold");
    CHECK(row.find(img.string() + ",0,1,0,") == 0);
}

TEST_CASE("synth subcommand matches the library computation") {
    const fs::path scene_path = test_dir() / "synth_scene.png";
    const fs::path depth_path = test_dir() / "synth_depth.png";
    const fs::path out_path = test_dir() / "synth_out.png";
    io::save_png16(scene_path, step_image(12, 12));
    io::save_png16(depth_path, scatter::make_ramp_depth(12, 12, 1.0));

    const int code = run_cli({"synth", scene_path.string(), "--depth", depth_path.string(),
                              "--beta", "0.8", "--ainf", "0.9", "--depth-scale", "2.0",
                              "-o", out_path.string()});
    REQUIRE(code == 0);

    scatter::ScatterParams p;
    p.beta = 0.8;
    p.a_inf = 0.9;
    p.depth = io::load_image(depth_path);
    for (double& z : p.depth.samples()) z *= 2.0;
    const GrayImage expected = scatter::synth_haze(io::load_image(scene_path), p).hazy;
    const GrayImage actual = io::load_image(out_path);
    for (size_t i = 0; i < expected.size(); ++i)
        CHECK(std::abs(actual.samples()[i] - expected.samples()[i]) <= 1.0 / 65535.0);
}

TEST_CASE("histmatch subcommand pulls the input toward the reference") {
    const fs::path ref_path = test_dir() / "hm_ref.png";
    const fs::path in_path = test_dir() / "hm_in.png";
    const fs::path out_path = test_dir() / "hm_out.png";
    io::save_png16(ref_path, GrayImage(8, 8, 0.5));
    oracle::Rng rng(11);
    io::save_png16(in_path, oracle::random_image(rng, 8, 8));

    REQUIRE(run_cli({"histmatch", in_path.string(), "--ref", ref_path.string(), "-o",
                     out_path.string()}) == 0);
    const GrayImage out = io::load_image(out_path);
    for (double v : out.samples())
        CHECK(v == doctest::Approx(0.5).epsilon(2e-4));  // constant ref collapses output
}

TEST_CASE("pipeline produces products, dehazed planes, and a CSV") {
    oracle::Rng rng(13);
    const fs::path mosaic_path = test_dir() / "scene01.png";
    io::save_png16(mosaic_path, oracle::random_image(rng, 64, 64, 0.1, 0.9));
    const fs::path out_dir = test_dir() / "pipeline_out";

    auto args = fast_flags();
    args.insert(args.begin(), {"pipeline", mosaic_path.string(), "-o", out_dir.string()});
    std::string csv, err;
    const int code = run_cli(args, &csv, &err);
    REQUIRE(code == 0);

    for (const char* name : {"scene01_s0.png", "scene01_s1.png", "scene01_dolp.png",
                             "scene01_aolp.png", "scene01_ranges.txt",
                             "scene01_s0_dehazed.png", "scene01_s0_matched.png",
                             "scene01_dolp_dehazed.png", "scene01_dolp_matched.png"})
        CHECK(fs::exists(out_dir / name));

    std::istringstream lines(csv);
    std::string line;
    std::getline(lines, line);
    CHECK(line == "file,e,rbar,sigma,sd,ag,n_o,n_r,n_s,threshold");
    int rows = 0;
    while (std::getline(lines, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 4);  // dehazed + matched for each of s0, dolp
}

TEST_CASE("pipeline over a directory walks scenes in path order") {
    oracle::Rng rng(19);
    const fs::path scene_dir = test_dir() / "scenes";
    fs::create_directories(scene_dir);
    for (const char* name : {"b_scene.png", "a_scene.png", "c_scene.png"})
        io::save_png16(scene_dir / name, oracle::random_image(rng, 32, 32, 0.1, 0.9));

    const fs::path out_dir = test_dir() / "scenes_out";
    auto args = fast_flags();
    args.insert(args.begin(),
                {"pipeline", scene_dir.string(), "-o", out_dir.string(), "--planes", "s0"});
    std::string csv, err;
    REQUIRE(run_cli(args, &csv, &err) == 0);

    // CSV rows follow sorted input paths regardless of completion order
    std::vector<std::string> stems;
    std::istringstream lines(csv);
    std::string line;
    std::getline(lines, line);  // header
    while (std::getline(lines, line))
        if (!line.empty()) stems.push_back(line.substr(0, line.find(',')));
    REQUIRE(stems.size() == 6);  // dehazed + matched per scene
    CHECK(stems[0] == "a_scene_s0_dehazed.png");
    CHECK(stems[2] == "b_scene_s0_dehazed.png");
    CHECK(stems[4] == "c_scene_s0_dehazed.png");
    for (const char* stem : {"a_scene", "b_scene", "c_scene"})
        CHECK(fs::exists(out_dir / (std::string(stem) + "_s0.png")));
}

TEST_CASE("pipeline dehazes any selected plane") {
    oracle::Rng rng(23);
    const fs::path mosaic_path = test_dir() / "planes_scene.png";
    io::save_png16(mosaic_path, oracle::random_image(rng, 32, 32, 0.1, 0.9));
    const fs::path out_dir = test_dir() / "planes_out";

    auto args = fast_flags();
    args.insert(args.begin(), {"pipeline", mosaic_path.string(), "-o", out_dir.string(),
                               "--planes", "s1,aolp,i45"});
    std::string csv, err;
    REQUIRE(run_cli(args, &csv, &err) == 0);
    for (const char* name :
         {"planes_scene_s1_dehazed.png", "planes_scene_aolp_dehazed.png",
          "planes_scene_i45_dehazed.png", "planes_scene_s1_matched.png"})
        CHECK(fs::exists(out_dir / name));

    // unknown plane name is a configuration error
    auto bad = fast_flags();
    bad.insert(bad.begin(), {"pipeline", mosaic_path.string(), "-o", out_dir.string(),
                             "--planes", "s3"});
    CHECK(run_cli(bad, nullptr, &err) == 2);
}

TEST_CASE("metrics subcommand pairs directories by filename") {
    oracle::Rng rng(21);
    const fs::path orig_dir = test_dir() / "metrics_orig";
    const fs::path rest_dir = test_dir() / "metrics_rest";
    fs::create_directories(orig_dir);
    fs::create_directories(rest_dir);
    for (const char* name : {"one.png", "two.png"}) {
        io::save_png16(orig_dir / name, oracle::random_image(rng, 16, 16));
        io::save_png16(rest_dir / name, oracle::random_image(rng, 16, 16));
    }
    io::save_png16(orig_dir / "unpaired.png", oracle::random_image(rng, 16, 16));

    std::string csv;
    const int code = run_cli(
        {"metrics", "--original", orig_dir.string(), "--restored", rest_dir.string()}, &csv);
    REQUIRE(code == 0);
    int rows = 0;
    std::istringstream lines(csv);
    std::string line;
    std::getline(lines, line);
    while (std::getline(lines, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 2);  // the unpaired original is skipped
}

TEST_CASE("configuration errors exit with 2") {
    std::string err;
    CHECK(run_cli({"dehaze"}, nullptr, &err) == 2);                        // missing input
    CHECK(run_cli({"frobnicate"}, nullptr, &err) == 2);                    // unknown command
    CHECK(run_cli({"dehaze", "in.png", "--no-such-flag"}, nullptr, &err) == 2);

    const fs::path input = test_dir() / "cfg_err_in.png";
    io::save_png16(input, GrayImage(8, 8, 0.5));
    // invalid parameter combination caught before processing
    CHECK(run_cli({"dehaze", input.string(), "-o", (test_dir() / "x.png").string(),
                   "--layers", "1"},
                  nullptr, &err) == 2);
    // empty input set from a non-matching glob
    CHECK(run_cli({"dehaze", (test_dir() / "no_such_*.png").string(), "-o",
                   (test_dir() / "y.png").string()},
                  nullptr, &err) == 2);
}

TEST_CASE("colliding input stems are rejected before processing") {
    oracle::Rng rng(27);
    const fs::path dir_a = test_dir() / "stems_a";
    const fs::path dir_b = test_dir() / "stems_b";
    fs::create_directories(dir_a);
    fs::create_directories(dir_b);
    io::save_png16(dir_a / "same.png", oracle::random_image(rng, 16, 16));
    io::save_png16(dir_b / "same.png", oracle::random_image(rng, 16, 16));

    auto args = fast_flags();
    args.insert(args.begin(), {"dehaze", (dir_a / "same.png").string(),
                               (dir_b / "same.png").string(), "-o",
                               (test_dir() / "stems_out").string()});
    std::string err;
    CHECK(run_cli(args, nullptr, &err) == 2);
    CHECK(err.find("same") != std::string::npos);
}

TEST_CASE("per-file failures list the file and continue") {
    const fs::path good = test_dir() / "batch_good.png";
    oracle::Rng rng(15);
    io::save_png16(good, oracle::random_image(rng, 16, 16));
    const fs::path missing = test_dir() / "batch_missing.png";
    const fs::path out_dir = test_dir() / "batch_out";

    auto args = fast_flags();
    args.insert(args.begin(),
                {"dehaze", good.string(), missing.string(), "-o", out_dir.string()});
    std::string err;
    const int code = run_cli(args, nullptr, &err);
    CHECK(code == 1);
    CHECK(fs::exists(out_dir / "batch_good_dehazed.png"));
    CHECK(err.find("batch_missing.png") != std::string::npos);
    CHECK(err.find("error") != std::string::npos);
}

TEST_CASE("worker_count respects POLARFOG_THREADS") {
    setenv("POLARFOG_THREADS", "3", 1);
    CHECK(cli::worker_count(8) == 3);
    CHECK(cli::worker_count(2) == 2);  // capped by job count
    setenv("POLARFOG_THREADS", "0", 1);
    CHECK(cli::worker_count(64) >= 1);  // auto
    setenv("POLARFOG_THREADS", "junk", 1);
    CHECK_THROWS_AS(cli::worker_count(4), cli::ConfigError);
    setenv("POLARFOG_THREADS", "2", 1);
}

TEST_CASE("demosaic subcommand writes nine planes and the ranges sidecar") {
    oracle::Rng rng(17);
    const fs::path mosaic_path = test_dir() / "demo_raw.png";
    io::save_png16(mosaic_path, oracle::random_image(rng, 16, 16));
    const fs::path out_dir = test_dir() / "demo_out";

    REQUIRE(run_cli({"demosaic", mosaic_path.string(), "-o", out_dir.string()}) == 0);
    for (const char* plane :
         {"i0", "i45", "i90", "i135", "s0", "s1", "s2", "dolp", "aolp"}) {
        const fs::path p = out_dir / ("demo_raw_" + std::string(plane) + ".png");
        CHECK(fs::exists(p));
        const GrayImage img = io::load_image(p);
        CHECK(img.rows() == 8);
        CHECK(img.cols() == 8);
    }
    const std::string ranges = read_bytes(out_dir / "demo_raw_ranges.txt");
    CHECK(ranges.find("s1 vmin=-1 vmax=1") != std::string::npos);
    CHECK(ranges.find("aolp vmin=") != std::string::npos);
}
