#include <doctest.h>

#include <limits>
#include <stdexcept>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "distvar/commands.hpp"
#include "distvar/image_io.hpp"
#include "distvar/metrics.hpp"
#include "distvar/resample.hpp"
#include "distvar/synthetic.hpp"

using namespace distvar;

namespace {

namespace fs = std::filesystem;

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string str(const std::string& child) const { return (path / child).string(); }
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int count_lines(const std::string& text) {
    int n = 0;
    for (char c : text)
        if (c == '\n') ++n;
    return n;
}

/// Writes a scene to disk and returns a config pointing at it.
RunConfig scene_config(const TempDir& dir, std::uint64_t seed = 5) {
    const SyntheticScene scene = make_two_plane_scene(seed, 32, 32);
    write_image_png16(scene.hr, dir.str("hr.png"));
    write_pfm(scene.depth, dir.str("hr.depth.pfm"));

    RunConfig cfg;
    cfg.hr_image = dir.str("hr.png");
    cfg.depth_map = dir.str("hr.depth.pfm");
    cfg.out_dir = dir.str("out");
    cfg.scale = 2;
    cfg.num_bins = 4;
    cfg.kernel_radius = 3;
    cfg.atmosphere.noise_sigma = 0.005;
    cfg.solver.iterations = 8;
    return cfg;
}

}  // namespace

TEST_CASE("degrade with no blur and no noise equals block averaging") {
    TempDir dir("distvar_cmd_blockavg");
    RunConfig cfg = scene_config(dir);
    cfg.atmosphere.r0 = 1e-9;
    cfg.atmosphere.beta0 = 0.0;
    cfg.atmosphere.noise_sigma = 0.0;
    cfg.kernel_radius = 0;
    cmd_degrade(cfg);

    const ScalarField lr = read_image(cfg.out_dir + "/lr.png").planes[0];
    const ScalarField hr = read_image(cfg.hr_image).planes[0];
    const ScalarField expected = downsample(hr, 2);
    for (std::size_t i = 0; i < lr.size(); ++i)
        CHECK(lr[i] == doctest::Approx(expected[i]).epsilon(2e-5));  // 16-bit quantization
}

TEST_CASE("degrade is byte-identical for a fixed seed and round-trips its manifest") {
    TempDir dir("distvar_cmd_repro");
    RunConfig cfg = scene_config(dir);

    cmd_degrade(cfg);
    const std::string first = slurp(cfg.out_dir + "/lr.png");
    cmd_degrade(cfg);
    CHECK(slurp(cfg.out_dir + "/lr.png") == first);

    // Manifest round trip into a fresh output directory.
    RunConfig manifest_cfg = parse_config_file(cfg.out_dir + "/manifest.txt");
    manifest_cfg.out_dir = dir.str("out2");
    cmd_degrade(manifest_cfg);
    CHECK(slurp(manifest_cfg.out_dir + "/lr.png") == first);
}

TEST_CASE("restore writes the SR image and a well-formed trace") {
    TempDir dir("distvar_cmd_restore");
    RunConfig cfg = scene_config(dir);
    cmd_degrade(cfg);

    cfg.lr_image = cfg.out_dir + "/lr.png";
    cmd_restore(cfg);

    const ScalarField sr = read_image(cfg.out_dir + "/sr.png").planes[0];
    const ScalarField hr = read_image(cfg.hr_image).planes[0];
    const ScalarField lr = read_image(cfg.lr_image).planes[0];
    CHECK(psnr(sr, hr) >= psnr(clamp01(upsample_bilinear(lr, 2)), hr));

    const std::string trace = slurp(cfg.out_dir + "/trace.csv");
    const int rows = count_lines(trace);
    CHECK(rows >= 2);                          // header + >= 1 iteration
    CHECK(rows <= cfg.solver.iterations + 1);  // early stop may shorten it
}

TEST_CASE("restore with zero iterations returns the initialization") {
    TempDir dir("distvar_cmd_k0");
    RunConfig cfg = scene_config(dir);
    cmd_degrade(cfg);
    cfg.lr_image = cfg.out_dir + "/lr.png";
    cfg.solver.iterations = 0;
    cmd_restore(cfg);

    const ScalarField sr = read_image(cfg.out_dir + "/sr.png").planes[0];
    const ScalarField lr = read_image(cfg.lr_image).planes[0];
    const ScalarField init = clamp01(upsample_bilinear(lr, 2));
    for (std::size_t i = 0; i < sr.size(); ++i)
        CHECK(sr[i] == doctest::Approx(init[i]).epsilon(2e-5));
    CHECK(count_lines(slurp(cfg.out_dir + "/trace.csv")) == 1);  // header only
}

TEST_CASE("restore in bank mode fits, saves, and reloads the bank") {
    TempDir dir("distvar_cmd_bank");
    RunConfig cfg = scene_config(dir);
    cmd_degrade(cfg);
    cfg.lr_image = cfg.out_dir + "/lr.png";
    cfg.solver.mode = SolverMode::kKernelBank;
    cfg.bank_fit_iterations = 40;
    cfg.bank_anchors = 3;
    cfg.bank_kernel_size = 3;
    cmd_restore(cfg);
    CHECK(fs::exists(cfg.out_dir + "/sr.png"));
    REQUIRE(fs::exists(cfg.out_dir + "/bank.dkb"));
    const std::string first_sr = slurp(cfg.out_dir + "/sr.png");

    // Reloading the saved bank must reproduce the restoration exactly.
    RunConfig reload = cfg;
    reload.kernel_bank_path = cfg.out_dir + "/bank.dkb";
    reload.out_dir = dir.str("out_reload");
    cmd_restore(reload);
    CHECK(slurp(reload.out_dir + "/sr.png") == first_sr);
}

TEST_CASE("RGB images degrade and restore per channel with a shared depth map") {
    TempDir dir("distvar_cmd_rgb");
    const SyntheticScene base = make_two_plane_scene(6, 32, 32);
    Image rgb;
    rgb.planes.push_back(base.hr);
    rgb.planes.push_back(scale(base.hr, 0.8));
    rgb.planes.push_back(scale(base.hr, 0.6));
    write_image_png16(rgb, dir.str("hr.png"));
    write_pfm(base.depth, dir.str("hr.depth.pfm"));

    RunConfig cfg;
    cfg.hr_image = dir.str("hr.png");
    cfg.depth_map = dir.str("hr.depth.pfm");
    cfg.out_dir = dir.str("out");
    cfg.scale = 2;
    cfg.num_bins = 3;
    cfg.kernel_radius = 2;
    cfg.atmosphere.noise_sigma = 0.002;
    cfg.solver.iterations = 4;
    cmd_degrade(cfg);

    const Image lr = read_image(cfg.out_dir + "/lr.png");
    REQUIRE(lr.rgb());
    CHECK(lr.width() == 16);

    cfg.lr_image = cfg.out_dir + "/lr.png";
    cmd_restore(cfg);
    const Image sr = read_image(cfg.out_dir + "/sr.png");
    REQUIRE(sr.rgb());
    CHECK(sr.width() == 32);
    const double p = psnr(luminance(sr), luminance(rgb));
    CHECK(p > 15.0);  // sanity: channels were restored, not scrambled
}

TEST_CASE("analyze emits one CSV row per bin and the cutoff map scaling law") {
    TempDir dir("distvar_cmd_analyze");
    // Two-region depth: far region exactly 16x the near depth.
    ScalarField depth(16, 16, 3.0);
    for (int y = 0; y < 16; ++y)
        for (int x = 8; x < 16; ++x) depth.at(x, y) = 48.0;
    write_pfm(depth, dir.str("depth.pfm"));

    RunConfig cfg;
    cfg.depth_map = dir.str("depth.pfm");
    cfg.out_dir = dir.str("out");
    cfg.num_bins = 5;
    cfg.kernel_radius = 2;
    cmd_analyze(cfg);

    const std::string csv = slurp(cfg.out_dir + "/spectral.csv");
    CHECK(count_lines(csv) == cfg.num_bins + 1);
    CHECK(csv.rfind("depth,rank,cutoff", 0) == 0);

    // Normalized cutoff map: far pixels sit at 1/8 of the near maximum.
    const ScalarField cmap = read_image(cfg.out_dir + "/cutoff_map.png").planes[0];
    CHECK(cmap.at(2, 8) == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(cmap.at(12, 8) == doctest::Approx(0.125).epsilon(1e-2));
}

TEST_CASE("bench counting contract on a tiny synthetic run") {
    TempDir dir("distvar_cmd_bench");
    RunConfig cfg;
    cfg.out_dir = dir.str("out");
    cfg.bench_synthetic = true;
    cfg.bench_scene_count = 2;
    cfg.bench_scene_size = 32;
    cfg.bench_scales = {2};
    cfg.bench_variants = {"bilinear", "k0"};
    cfg.num_bins = 3;
    cfg.kernel_radius = 2;
    cfg.solver.iterations = 2;

    const std::string csv = cmd_bench(cfg);
    // 2 scenes x 1 scale x 2 variants = 4 data rows, plus 2 summary rows.
    CHECK(count_lines(csv) == 1 + 4 + 2);

    // Runtime column positive on every data row.
    std::istringstream lines(csv);
    std::string line;
    std::getline(lines, line);  // header
    int data_rows = 0;
    while (std::getline(lines, line)) {
        const std::size_t last_comma = line.rfind(',');
        REQUIRE(last_comma != std::string::npos);
        CHECK(std::stod(line.substr(last_comma + 1)) > 0.0);
        if (line.rfind("mean,", 0) != 0) ++data_rows;
    }
    CHECK(data_rows == 4);
}

TEST_CASE("calibrate writes fitted parameters and a non-increasing objective trace") {
    TempDir dir("distvar_cmd_cal");
    RunConfig cfg;
    cfg.out_dir = dir.str("out");
    cfg.bench_synthetic = true;
    cfg.bench_scene_count = 1;
    cfg.bench_scene_size = 32;
    cfg.num_bins = 3;
    cfg.kernel_radius = 2;
    cfg.solver.iterations = 2;
    cfg.calibrate.coords = {"lambda"};
    cfg.calibrate.golden_iters = 6;
    cmd_calibrate(cfg);

    const RunConfig fitted = parse_config_file(cfg.out_dir + "/calibrated.txt");
    CHECK(fitted.reg.lambda > 0.0);

    std::istringstream trace(slurp(cfg.out_dir + "/calibrate_trace.csv"));
    std::string line;
    std::getline(trace, line);
    REQUIRE(line == "step,objective");
    double prev = std::numeric_limits<double>::infinity();
    int rows = 0;
    while (std::getline(trace, line)) {
        const double value = std::stod(line.substr(line.find(',') + 1));
        CHECK(value <= prev + 1e-12);
        prev = value;
        ++rows;
    }
    CHECK(rows >= 1);
}

TEST_CASE("bench reads dataset directories with depth siblings") {
    TempDir dir("distvar_cmd_bench_ds");
    fs::create_directories(dir.str("data"));
    for (int i = 0; i < 2; ++i) {
        const SyntheticScene scene = make_two_plane_scene(100 + i, 32, 32);
        const std::string stem = dir.str("data") + "/scene" + std::to_string(i);
        write_image_png16(scene.hr, stem + ".png");
        write_pfm(scene.depth, stem + ".depth.pfm");
    }
    RunConfig cfg;
    cfg.out_dir = dir.str("out");
    cfg.dataset_dir = dir.str("data");
    cfg.bench_scales = {2};
    cfg.bench_variants = {"bilinear", "wiener"};
    cfg.num_bins = 3;
    cfg.kernel_radius = 2;

    const std::string csv = cmd_bench(cfg);
    CHECK(count_lines(csv) == 1 + 4 + 2);  // header, 2x2 data rows, 2 means
    CHECK(csv.find("scene0,bilinear,2,") != std::string::npos);
    CHECK(csv.find("scene1,wiener,2,") != std::string::npos);
}

TEST_CASE("bench rejects an empty dataset directory") {
    TempDir dir("distvar_cmd_bench_empty");
    fs::create_directories(dir.str("data"));
    RunConfig cfg;
    cfg.out_dir = dir.str("out");
    cfg.dataset_dir = dir.str("data");
    CHECK_THROWS_AS(cmd_bench(cfg), std::runtime_error);
}
