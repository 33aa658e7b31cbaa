#include "distvar/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "distvar/image_io.hpp"
#include "distvar/metrics.hpp"
#include "distvar/resample.hpp"
#include "distvar/synthetic.hpp"

namespace distvar {

namespace {

namespace fs = std::filesystem;

void ensure_out_dir(const RunConfig& cfg) {
    if (!cfg.out_dir.empty()) fs::create_directories(cfg.out_dir);
}

std::string out_path(const RunConfig& cfg, const std::string& name) {
    return (fs::path(cfg.out_dir) / name).string();
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);  // binary keeps LF endings everywhere
    if (!out) throw std::runtime_error("cannot open " + path);
    out << text;
    if (!out) throw std::runtime_error("write failed for " + path);
}

Image read_planes(const std::string& path, double pixel_pitch) {
    if (path.empty()) throw std::invalid_argument("missing input image path");
    Image img = read_image(path);
    for (ScalarField& p : img.planes) p.pixel_pitch = pixel_pitch;
    return img;
}

ScalarField load_depth(const RunConfig& cfg) {
    if (cfg.depth_map.empty()) throw std::invalid_argument("io.depth_map is required");
    ScalarField depth = read_depth(cfg.depth_map, cfg.depth_scale, cfg.pixel_pitch);
    for (double d : depth.data)
        if (!(d > 0.0))
            throw std::invalid_argument("depth map must be strictly positive: " + cfg.depth_map);
    return depth;
}

ScalarField depth_at_hr(const RunConfig& cfg, const ScalarField& depth, int lr_w, int lr_h) {
    const int hw = lr_w * cfg.scale, hh = lr_h * cfg.scale;
    if (depth.width == hw && depth.height == hh) return depth;
    if (depth.width == lr_w && depth.height == lr_h)
        return upsample_bilinear(depth, cfg.scale);
    throw std::invalid_argument("depth map must match the LR or HR grid");
}

/// Deterministic per-scene bank: fitted to the analytic gradient on the
/// initialization image so bank mode works without an external bank file.
KernelBank bank_for(const RunConfig& cfg, const ScalarField& init, const ScalarField& depth) {
    if (!cfg.kernel_bank_path.empty()) return load_bank(cfg.kernel_bank_path);
    double dmin = depth[0], dmax = depth[0];
    for (double d : depth.data) {
        dmin = std::min(dmin, d);
        dmax = std::max(dmax, d);
    }
    if (dmax - dmin < 1e-9) dmax = dmin + 1.0;
    KernelBank bank = make_zero_bank(cfg.bank_anchors, dmin, dmax, cfg.bank_kernel_size,
                                     cfg.bank_lipschitz);
    const std::vector<BankSample> samples = {{init, depth}};
    return fit_bank_to_analytic(bank, samples, cfg.reg, cfg.bank_fit_iterations).bank;
}

}  // namespace

void cmd_degrade(const RunConfig& cfg) {
    validate(cfg);
    ensure_out_dir(cfg);
    const Image hr = read_planes(cfg.hr_image, cfg.pixel_pitch);
    const ScalarField depth = load_depth(cfg);
    if (depth.width != hr.width() || depth.height != hr.height())
        throw std::invalid_argument("degrade: depth map must match the HR image grid");
    if (hr.width() % cfg.scale != 0 || hr.height() % cfg.scale != 0)
        throw std::invalid_argument("degrade: HR dimensions must be divisible by the scale");

    const DegradationModel model =
        build_model(cfg.atmosphere, depth, cfg.num_bins, cfg.scale, cfg.kernel_radius);

    Image lr;
    for (std::size_t c = 0; c < hr.planes.size(); ++c) {
        ScalarField obs = apply(model, hr.planes[c], depth);
        obs = add_noise(obs, cfg.atmosphere.noise_sigma,
                        cfg.atmosphere.rng_seed + std::uint64_t(c));
        lr.planes.push_back(obs);
    }
    write_image_png16(lr, out_path(cfg, "lr.png"));
    write_text(out_path(cfg, "manifest.txt"), degrade_manifest(cfg));
}

void cmd_restore(const RunConfig& cfg) {
    validate(cfg);
    ensure_out_dir(cfg);
    const Image lr = read_planes(cfg.lr_image, cfg.pixel_pitch * cfg.scale);
    ScalarField depth = load_depth(cfg);
    depth = depth_at_hr(cfg, depth, lr.width(), lr.height());

    const DegradationModel model =
        build_model(cfg.atmosphere, depth, cfg.num_bins, cfg.scale, cfg.kernel_radius);

    SolverConfig solver = cfg.solver;
    solver.wiener_profile = cfg.resolved_spectral();

    KernelBank bank;
    const KernelBank* bank_ptr = nullptr;
    if (solver.mode == SolverMode::kKernelBank) {
        bank = bank_for(cfg, upsample_bilinear(lr.planes[0], cfg.scale), depth);
        bank_ptr = &bank;
        // Keep the operator that was actually used; a later run can reload it
        // through io.kernel_bank.
        if (cfg.kernel_bank_path.empty()) save_bank(bank, out_path(cfg, "bank.dkb"));
    }

    Image sr;
    SolverTrace trace;
    for (std::size_t c = 0; c < lr.planes.size(); ++c) {
        RestoreResult result = restore(lr.planes[c], depth, model, cfg.reg, solver, bank_ptr);
        if (c == 0) trace = result.trace;
        sr.planes.push_back(std::move(result.image));
    }
    write_image_png16(sr, out_path(cfg, "sr.png"));
    write_text(out_path(cfg, "trace.csv"), trace.to_csv());
}

void cmd_analyze(const RunConfig& cfg) {
    validate(cfg);
    ensure_out_dir(cfg);
    const ScalarField depth = load_depth(cfg);
    const DegradationModel model =
        build_model(cfg.atmosphere, depth, cfg.num_bins, cfg.scale, cfg.kernel_radius);

    SpectralProfile profile = cfg.resolved_spectral();
    if (profile.beta_eff <= 0.0)
        throw std::invalid_argument(
            "analyze: cutoff analysis needs attenuation; set atmosphere.beta0 > 0 or "
            "spectral.beta_eff");
    FrequencyGrid grid(depth.width, depth.height, depth.pixel_pitch);
    analyze_bins(profile, model, grid);

    std::ostringstream csv;
    csv.precision(17);
    csv << "depth,rank,cutoff\n";
    for (std::size_t b = 0; b < profile.bin_depths.size(); ++b)
        csv << profile.bin_depths[b] << ',' << profile.bin_ranks[b] << ','
            << profile.bin_cutoffs[b] << '\n';
    write_text(out_path(cfg, "spectral.csv"), csv.str());

    const double peak = sigma0_magnitude(cfg.atmosphere, 0.0);
    ScalarField cmap = cutoff_map(depth, peak, profile.epsilon, profile.beta_eff);
    const double cmax = max_abs(cmap);
    if (cmax > 0.0)
        for (double& v : cmap.data) v /= cmax;  // normalized; scale recorded in the CSV
    write_image_png16(cmap, out_path(cfg, "cutoff_map.png"));
}

namespace {

struct BenchScene {
    std::string name;
    ScalarField hr;     // luminance plane
    ScalarField depth;  // HR grid
    ScalarField lr;     // empty unless the dataset supplies it
    bool has_lr = false;
};

std::vector<BenchScene> dataset_scenes(const RunConfig& cfg) {
    std::vector<BenchScene> scenes;
    std::vector<std::string> names;
    for (const auto& entry : fs::directory_iterator(cfg.dataset_dir)) {
        if (!entry.is_regular_file()) continue;
        const std::string name = entry.path().filename().string();
        const bool image = has_suffix(name, ".png") || has_suffix(name, ".pgm");
        if (!image) continue;
        if (name.find(".depth.") != std::string::npos) continue;
        if (name.find(".lr.") != std::string::npos) continue;
        names.push_back(entry.path().string());
    }
    std::sort(names.begin(), names.end());
    for (const std::string& path : names) {
        BenchScene scene;
        const fs::path p(path);
        const std::string stem = (p.parent_path() / p.stem()).string();
        scene.name = p.stem().string();
        scene.hr = luminance(read_planes(path, cfg.pixel_pitch));

        std::string depth_path;
        for (const char* ext : {".depth.png", ".depth.pgm", ".depth.pfm"})
            if (fs::exists(stem + ext)) depth_path = stem + ext;
        if (depth_path.empty())
            throw std::runtime_error("bench: no depth map found for " + path);
        scene.depth = read_depth(depth_path, cfg.depth_scale, cfg.pixel_pitch);
        if (!scene.depth.same_shape(scene.hr))
            throw std::runtime_error("bench: depth grid mismatch for " + path);

        if (fs::exists(stem + ".lr.png")) {
            scene.lr = luminance(read_planes(stem + ".lr.png", cfg.pixel_pitch));
            scene.has_lr = true;
        }
        scenes.push_back(std::move(scene));
    }
    if (scenes.empty()) throw std::runtime_error("bench: empty dataset " + cfg.dataset_dir);
    return scenes;
}

std::vector<BenchScene> synthetic_scenes(const RunConfig& cfg) {
    std::vector<BenchScene> scenes;
    for (SyntheticScene& s : make_scene_suite(cfg.atmosphere.rng_seed, cfg.bench_scene_count,
                                              cfg.bench_scene_size, cfg.bench_scene_size)) {
        BenchScene scene;
        scene.name = s.name;
        scene.hr = std::move(s.hr);
        scene.depth = std::move(s.depth);
        scene.hr.pixel_pitch = cfg.pixel_pitch;
        scene.depth.pixel_pitch = cfg.pixel_pitch;
        scenes.push_back(std::move(scene));
    }
    return scenes;
}

ScalarField run_variant(const std::string& variant, const RunConfig& cfg,
                        const DegradationModel& model, const ScalarField& lr,
                        const ScalarField& depth) {
    const SpectralProfile profile = cfg.resolved_spectral();
    if (variant == "bilinear") return clamp01(upsample_bilinear(lr, model.scale));
    if (variant == "wiener") return clamp01(wiener_restore(lr, model, depth, profile));
    if (variant == "wiener_nocut") {
        SpectralProfile open_band = profile;
        open_band.beta_eff = 0.0;
        return clamp01(wiener_restore(lr, model, depth, open_band));
    }

    SolverConfig solver = cfg.solver;
    solver.wiener_profile = profile;
    if (variant == "full") return restore(lr, depth, model, cfg.reg, solver).image;
    if (variant == "constant_g") {
        solver.constant_reg_depth = true;
        return restore(lr, depth, model, cfg.reg, solver).image;
    }
    if (variant == "k0") {
        solver.iterations = 0;
        return restore(lr, depth, model, cfg.reg, solver).image;
    }
    if (variant == "bank") {
        solver.mode = SolverMode::kKernelBank;
        const KernelBank bank = bank_for(cfg, upsample_bilinear(lr, model.scale), depth);
        return restore(lr, depth, model, cfg.reg, solver, &bank).image;
    }
    throw std::invalid_argument("bench: unknown variant '" + variant + "'");
}

}  // namespace

std::string cmd_bench(const RunConfig& cfg) {
    validate(cfg);
    ensure_out_dir(cfg);
    const bool synthetic = cfg.bench_synthetic || cfg.dataset_dir.empty();
    std::vector<BenchScene> scenes = synthetic ? synthetic_scenes(cfg) : dataset_scenes(cfg);

    std::ostringstream csv;
    csv << "name,variant,scale,psnr,ssim,runtime_ms\n";
    csv.precision(10);

    struct Accum {
        double psnr = 0.0, ssim = 0.0, runtime = 0.0;
        int count = 0;
    };
    std::vector<Accum> sums(cfg.bench_variants.size());

    for (const int scale : cfg.bench_scales) {
        for (std::size_t idx = 0; idx < scenes.size(); ++idx) {
            const BenchScene& scene = scenes[idx];
            if (scene.hr.width % scale != 0 || scene.hr.height % scale != 0)
                throw std::runtime_error("bench: scene " + scene.name +
                                         " not divisible by scale " + std::to_string(scale));
            RunConfig run = cfg;
            run.scale = scale;
            const DegradationModel model =
                build_model(run.atmosphere, scene.depth, run.num_bins, scale, run.kernel_radius);
            ScalarField lr = scene.lr;
            if (!scene.has_lr) {
                lr = add_noise(apply(model, scene.hr, scene.depth), run.atmosphere.noise_sigma,
                               run.atmosphere.rng_seed + idx);
            }
            for (std::size_t v = 0; v < cfg.bench_variants.size(); ++v) {
                const auto start = std::chrono::steady_clock::now();
                const ScalarField out =
                    run_variant(cfg.bench_variants[v], run, model, lr, scene.depth);
                const auto stop = std::chrono::steady_clock::now();
                const double ms =
                    std::chrono::duration<double, std::milli>(stop - start).count();
                const MetricReport report = compare(out, scene.hr, cfg.shave);
                csv << scene.name << ',' << cfg.bench_variants[v] << ',' << scale << ','
                    << report.psnr << ',' << report.ssim << ',' << ms << '\n';
                sums[v].psnr += report.psnr;
                sums[v].ssim += report.ssim;
                sums[v].runtime += ms;
                ++sums[v].count;
            }
        }
    }
    for (std::size_t v = 0; v < cfg.bench_variants.size(); ++v) {
        const Accum& a = sums[v];
        if (a.count == 0) continue;
        csv << "mean," << cfg.bench_variants[v] << ",all," << a.psnr / a.count << ','
            << a.ssim / a.count << ',' << a.runtime / a.count << '\n';
    }
    const std::string text = csv.str();
    write_text(out_path(cfg, "bench.csv"), text);
    return text;
}

void cmd_calibrate(const RunConfig& cfg) {
    validate(cfg);
    ensure_out_dir(cfg);
    const bool synthetic = cfg.bench_synthetic || cfg.dataset_dir.empty();
    std::vector<BenchScene> scenes = synthetic ? synthetic_scenes(cfg) : dataset_scenes(cfg);

    std::vector<TrainingTriple> data;
    for (std::size_t idx = 0; idx < scenes.size(); ++idx) {
        BenchScene& scene = scenes[idx];
        TrainingTriple triple;
        triple.depth = scene.depth;
        if (scene.has_lr) {
            triple.lr = std::move(scene.lr);
        } else {
            const DegradationModel model = build_model(cfg.atmosphere, scene.depth, cfg.num_bins,
                                                       cfg.scale, cfg.kernel_radius);
            triple.lr = add_noise(apply(model, scene.hr, scene.depth),
                                  cfg.atmosphere.noise_sigma, cfg.atmosphere.rng_seed + idx);
        }
        triple.hr = std::move(scene.hr);
        data.push_back(std::move(triple));
    }

    const CalibrationResult result = calibrate(cfg.reg, data, cfg.atmosphere, cfg.num_bins,
                                               cfg.scale, cfg.solver, cfg.calibrate);

    std::ostringstream params;
    params.precision(17);
    params << "reg.lambda = " << result.params.lambda << "\n";
    params << "reg.mu = " << result.params.mu << "\n";
    params << "reg.d0 = " << result.params.d0 << "\n";
    params << "reg.gamma0 = " << result.params.gamma0 << "\n";
    params << "reg.gamma1 = " << result.params.gamma1 << "\n";
    params << "reg.d1 = " << result.params.d1 << "\n";
    params << "reg.sigma_r0 = " << result.params.sigma_r0 << "\n";
    params << "reg.d_sigma = " << result.params.d_sigma << "\n";
    params << "reg.h_mid = " << result.params.h_mid << "\n";
    params << "reg.h_width = " << result.params.h_width << "\n";
    write_text(out_path(cfg, "calibrated.txt"), params.str());

    std::ostringstream trace;
    trace.precision(17);
    trace << "step,objective\n";
    for (std::size_t i = 0; i < result.objective_trace.size(); ++i)
        trace << i << ',' << result.objective_trace[i] << '\n';
    write_text(out_path(cfg, "calibrate_trace.csv"), trace.str());
}

}  // namespace distvar
