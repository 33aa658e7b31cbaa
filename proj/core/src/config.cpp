#include "distvar/config.hpp"

#include "distvar/resample.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace distvar {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

[[noreturn]] void fail(const std::string& location, const std::string& key,
                       const std::string& what) {
    throw std::invalid_argument(location + ": " + key + ": " + what);
}

double parse_double(const std::string& location, const std::string& key,
                    const std::string& value) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        fail(location, key, "expected a number, got '" + value + "'");
    }
}

long long parse_int(const std::string& location, const std::string& key,
                    const std::string& value) {
    try {
        std::size_t pos = 0;
        const long long v = std::stoll(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        fail(location, key, "expected an integer, got '" + value + "'");
    }
}

std::uint64_t parse_u64(const std::string& location, const std::string& key,
                        const std::string& value) {
    try {
        std::size_t pos = 0;
        const unsigned long long v = std::stoull(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        fail(location, key, "expected an unsigned integer, got '" + value + "'");
    }
}

bool parse_bool(const std::string& location, const std::string& key, const std::string& value) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    fail(location, key, "expected true/false, got '" + value + "'");
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

void require(bool ok, const std::string& location, const std::string& key,
             const std::string& what) {
    if (!ok) fail(location, key, what);
}

}  // namespace

void apply_config_key(RunConfig& cfg, const std::string& key, const std::string& value,
                      const std::string& location) {
    // io
    if (key == "io.hr_image") { cfg.hr_image = value; return; }
    if (key == "io.lr_image") { cfg.lr_image = value; return; }
    if (key == "io.depth_map") { cfg.depth_map = value; return; }
    if (key == "io.out_dir") { cfg.out_dir = value; return; }
    if (key == "io.dataset_dir") { cfg.dataset_dir = value; return; }
    if (key == "io.kernel_bank") { cfg.kernel_bank_path = value; return; }
    if (key == "io.depth_scale") {
        cfg.depth_scale = parse_double(location, key, value);
        require(cfg.depth_scale > 0.0, location, key, "must be > 0");
        return;
    }
    if (key == "io.pixel_pitch") {
        cfg.pixel_pitch = parse_double(location, key, value);
        require(cfg.pixel_pitch > 0.0, location, key, "must be > 0");
        return;
    }
    // atmosphere
    if (key == "atmosphere.r0") {
        cfg.atmosphere.r0 = parse_double(location, key, value);
        require(cfg.atmosphere.r0 > 0.0, location, key, "must be > 0");
        return;
    }
    if (key == "atmosphere.beta0") {
        cfg.atmosphere.beta0 = parse_double(location, key, value);
        require(cfg.atmosphere.beta0 >= 0.0, location, key, "must be >= 0");
        return;
    }
    if (key == "atmosphere.wavelength") {
        cfg.atmosphere.wavelength = parse_double(location, key, value);
        require(cfg.atmosphere.wavelength > 0.0, location, key, "must be > 0");
        return;
    }
    if (key == "atmosphere.refractive_index") {
        cfg.atmosphere.refractive_index = parse_double(location, key, value);
        require(cfg.atmosphere.refractive_index > 1.0, location, key, "must be > 1");
        return;
    }
    if (key == "atmosphere.particle_density") {
        cfg.atmosphere.particle_density = parse_double(location, key, value);
        require(cfg.atmosphere.particle_density >= 0.0, location, key, "must be >= 0");
        return;
    }
    if (key == "atmosphere.noise_sigma") {
        cfg.atmosphere.noise_sigma = parse_double(location, key, value);
        require(cfg.atmosphere.noise_sigma >= 0.0, location, key, "must be >= 0");
        return;
    }
    if (key == "atmosphere.seed") {
        cfg.atmosphere.rng_seed = parse_u64(location, key, value);
        return;
    }
    // degrade
    if (key == "degrade.scale") {
        cfg.scale = int(parse_int(location, key, value));
        require(valid_scale(cfg.scale), location, key, "must be one of 1,2,4,8");
        return;
    }
    if (key == "degrade.num_bins") {
        cfg.num_bins = int(parse_int(location, key, value));
        require(cfg.num_bins >= 2, location, key, "must be >= 2");
        return;
    }
    if (key == "degrade.kernel_radius") {
        cfg.kernel_radius = int(parse_int(location, key, value));
        require(cfg.kernel_radius >= 0, location, key, "must be >= 0 (0 = automatic)");
        return;
    }
    // spectral
    if (key == "spectral.epsilon") {
        cfg.spectral.epsilon = parse_double(location, key, value);
        require(cfg.spectral.epsilon > 0.0, location, key, "must be > 0");
        return;
    }
    if (key == "spectral.alpha") {
        cfg.spectral.alpha = parse_double(location, key, value);
        require(cfg.spectral.alpha > 0.0 && cfg.spectral.alpha < 1.0, location, key,
                "must lie in (0,1)");
        return;
    }
    if (key == "spectral.signal_amplitude") {
        cfg.spectral.signal_psd.amplitude = parse_double(location, key, value);
        require(cfg.spectral.signal_psd.amplitude > 0.0, location, key, "must be > 0");
        return;
    }
    if (key == "spectral.signal_exponent") {
        cfg.spectral.signal_psd.exponent = parse_double(location, key, value);
        require(cfg.spectral.signal_psd.exponent >= 0.0, location, key, "must be >= 0");
        return;
    }
    if (key == "spectral.signal_offset") {
        cfg.spectral.signal_psd.offset = parse_double(location, key, value);
        require(cfg.spectral.signal_psd.offset > 0.0, location, key, "must be > 0");
        return;
    }
    if (key == "spectral.noise_floor") {
        cfg.spectral.noise_floor = parse_double(location, key, value);
        require(cfg.spectral.noise_floor >= 0.0, location, key, "must be >= 0");
        cfg.spectral_noise_floor_set = true;
        return;
    }
    if (key == "spectral.beta_eff") {
        cfg.spectral.beta_eff = parse_double(location, key, value);
        require(cfg.spectral.beta_eff >= 0.0, location, key, "must be >= 0");
        cfg.spectral_beta_eff_set = true;
        return;
    }
    // regularizer
    if (key == "reg.lambda") {
        cfg.reg.lambda = parse_double(location, key, value);
        require(cfg.reg.lambda > 0.0, location, key, "must be > 0");
        return;
    }
    if (key == "reg.mu") {
        cfg.reg.mu = parse_double(location, key, value);
        require(cfg.reg.mu >= 0.0, location, key, "must be >= 0");
        return;
    }
    if (key == "reg.d0") {
        cfg.reg.d0 = parse_double(location, key, value);
        require(cfg.reg.d0 > 0.0, location, key, "must be > 0");
        return;
    }
    if (key == "reg.gamma0") {
        cfg.reg.gamma0 = parse_double(location, key, value);
        require(cfg.reg.gamma0 >= 0.0, location, key, "must be >= 0");
        return;
    }
    if (key == "reg.gamma1") {
        cfg.reg.gamma1 = parse_double(location, key, value);
        require(cfg.reg.gamma1 >= 0.0, location, key, "must be >= 0");
        return;
    }
    if (key == "reg.d1") {
        cfg.reg.d1 = parse_double(location, key, value);
        require(cfg.reg.d1 > 0.0, location, key, "must be > 0");
        return;
    }
    if (key == "reg.sigma_r0") {
        cfg.reg.sigma_r0 = parse_double(location, key, value);
        require(cfg.reg.sigma_r0 > 0.0, location, key, "must be > 0");
        return;
    }
    if (key == "reg.d_sigma") {
        cfg.reg.d_sigma = parse_double(location, key, value);
        require(cfg.reg.d_sigma > 0.0, location, key, "must be > 0");
        return;
    }
    if (key == "reg.h_mid") {
        cfg.reg.h_mid = parse_double(location, key, value);
        return;
    }
    if (key == "reg.h_width") {
        cfg.reg.h_width = parse_double(location, key, value);
        require(cfg.reg.h_width > 0.0, location, key, "must be > 0");
        return;
    }
    // solver
    if (key == "solver.iterations") {
        cfg.solver.iterations = int(parse_int(location, key, value));
        require(cfg.solver.iterations >= 0, location, key, "must be >= 0");
        return;
    }
    if (key == "solver.tau0") {
        cfg.solver.tau0 = parse_double(location, key, value);
        require(cfg.solver.tau0 > 0.0, location, key, "must be > 0");
        return;
    }
    if (key == "solver.backtrack_rho") {
        cfg.solver.backtrack_rho = parse_double(location, key, value);
        require(cfg.solver.backtrack_rho > 0.0 && cfg.solver.backtrack_rho < 1.0, location, key,
                "must lie in (0,1)");
        return;
    }
    if (key == "solver.max_halvings") {
        cfg.solver.max_halvings = int(parse_int(location, key, value));
        require(cfg.solver.max_halvings >= 0, location, key, "must be >= 0");
        return;
    }
    if (key == "solver.stop_tol") {
        cfg.solver.stop_tol = parse_double(location, key, value);
        require(cfg.solver.stop_tol >= 0.0, location, key, "must be >= 0");
        return;
    }
    if (key == "solver.mode") {
        if (value == "analytic") cfg.solver.mode = SolverMode::kAnalytic;
        else if (value == "bank") cfg.solver.mode = SolverMode::kKernelBank;
        else fail(location, key, "must be 'analytic' or 'bank', got '" + value + "'");
        return;
    }
    if (key == "solver.init") {
        if (value == "bilinear") cfg.solver.init = SolverInit::kBilinear;
        else if (value == "wiener") cfg.solver.init = SolverInit::kWiener;
        else fail(location, key, "must be 'bilinear' or 'wiener', got '" + value + "'");
        return;
    }
    if (key == "solver.constant_reg_depth") {
        cfg.solver.constant_reg_depth = parse_bool(location, key, value);
        return;
    }
    // bank
    if (key == "bank.anchors") {
        cfg.bank_anchors = int(parse_int(location, key, value));
        require(cfg.bank_anchors >= 1, location, key, "must be >= 1");
        return;
    }
    if (key == "bank.kernel_size") {
        cfg.bank_kernel_size = int(parse_int(location, key, value));
        require(cfg.bank_kernel_size >= 1 && cfg.bank_kernel_size % 2 == 1, location, key,
                "must be odd and >= 1");
        return;
    }
    if (key == "bank.lipschitz") {
        cfg.bank_lipschitz = parse_double(location, key, value);
        require(cfg.bank_lipschitz > 0.0, location, key, "must be > 0");
        return;
    }
    if (key == "bank.fit_iterations") {
        cfg.bank_fit_iterations = int(parse_int(location, key, value));
        require(cfg.bank_fit_iterations >= 1, location, key, "must be >= 1");
        return;
    }
    // calibrate
    if (key == "calibrate.alpha") {
        cfg.calibrate.alpha = parse_double(location, key, value);
        require(cfg.calibrate.alpha >= 0.0, location, key, "must be >= 0");
        return;
    }
    if (key == "calibrate.beta") {
        cfg.calibrate.beta = parse_double(location, key, value);
        require(cfg.calibrate.beta >= 0.0, location, key, "must be >= 0");
        return;
    }
    if (key == "calibrate.coords") {
        cfg.calibrate.coords = split_list(value);
        require(!cfg.calibrate.coords.empty(), location, key, "must name >= 1 coordinate");
        for (const std::string& c : cfg.calibrate.coords) {
            bool known = false;
            for (const std::string& k : calibratable_coords()) known = known || k == c;
            require(known, location, key, "unknown coordinate '" + c + "'");
        }
        return;
    }
    if (key == "calibrate.passes") {
        cfg.calibrate.passes = int(parse_int(location, key, value));
        require(cfg.calibrate.passes >= 1, location, key, "must be >= 1");
        return;
    }
    if (key == "calibrate.golden_iters") {
        cfg.calibrate.golden_iters = int(parse_int(location, key, value));
        require(cfg.calibrate.golden_iters >= 1, location, key, "must be >= 1");
        return;
    }
    // bench
    if (key == "bench.synthetic") {
        cfg.bench_synthetic = parse_bool(location, key, value);
        return;
    }
    if (key == "bench.scene_size") {
        cfg.bench_scene_size = int(parse_int(location, key, value));
        require(cfg.bench_scene_size >= 16, location, key, "must be >= 16");
        return;
    }
    if (key == "bench.scene_count") {
        cfg.bench_scene_count = int(parse_int(location, key, value));
        require(cfg.bench_scene_count >= 1, location, key, "must be >= 1");
        return;
    }
    if (key == "bench.scales") {
        cfg.bench_scales.clear();
        for (const std::string& s : split_list(value)) {
            const int v = int(parse_int(location, key, s));
            require(valid_scale(v), location, key, "scales must be from {1,2,4,8}");
            cfg.bench_scales.push_back(v);
        }
        require(!cfg.bench_scales.empty(), location, key, "must list >= 1 scale");
        return;
    }
    if (key == "bench.variants") {
        cfg.bench_variants = split_list(value);
        require(!cfg.bench_variants.empty(), location, key, "must list >= 1 variant");
        return;
    }
    // metrics
    if (key == "metrics.shave") {
        cfg.shave = int(parse_int(location, key, value));
        require(cfg.shave >= 0, location, key, "must be >= 0");
        return;
    }
    fail(location, key, "unknown key");
}

void load_config_file(RunConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open " + path);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        const std::string location = path + ":" + std::to_string(lineno);
        if (eq == std::string::npos)
            throw std::invalid_argument(location + ": expected 'key = value', got '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw std::invalid_argument(location + ": empty key");
        apply_config_key(cfg, key, value, location);
    }
}

RunConfig parse_config_file(const std::string& path) {
    RunConfig cfg;
    load_config_file(cfg, path);
    return cfg;
}

void validate(const RunConfig& cfg) {
    validate(cfg.atmosphere);
    validate(cfg.reg);
    validate(cfg.solver);
    validate(cfg.resolved_spectral());
}

SpectralProfile RunConfig::resolved_spectral() const {
    SpectralProfile profile = spectral;
    if (!spectral_beta_eff_set) profile.beta_eff = effective_beta(atmosphere);
    if (!spectral_noise_floor_set)
        profile.noise_floor = atmosphere.noise_sigma * atmosphere.noise_sigma;
    return profile;
}

std::string degrade_manifest(const RunConfig& cfg) {
    std::ostringstream out;
    out.precision(17);
    out << "# distvar degrade manifest; usable directly as --config\n";
    out << "io.hr_image = " << cfg.hr_image << "\n";
    out << "io.depth_map = " << cfg.depth_map << "\n";
    out << "io.depth_scale = " << cfg.depth_scale << "\n";
    out << "io.pixel_pitch = " << cfg.pixel_pitch << "\n";
    out << "atmosphere.r0 = " << cfg.atmosphere.r0 << "\n";
    out << "atmosphere.beta0 = " << cfg.atmosphere.beta0 << "\n";
    out << "atmosphere.wavelength = " << cfg.atmosphere.wavelength << "\n";
    out << "atmosphere.refractive_index = " << cfg.atmosphere.refractive_index << "\n";
    out << "atmosphere.particle_density = " << cfg.atmosphere.particle_density << "\n";
    out << "atmosphere.noise_sigma = " << cfg.atmosphere.noise_sigma << "\n";
    out << "atmosphere.seed = " << cfg.atmosphere.rng_seed << "\n";
    out << "degrade.scale = " << cfg.scale << "\n";
    out << "degrade.num_bins = " << cfg.num_bins << "\n";
    out << "degrade.kernel_radius = " << cfg.kernel_radius << "\n";
    return out.str();
}

}  // namespace distvar
