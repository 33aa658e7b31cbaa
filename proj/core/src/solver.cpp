#include "distvar/solver.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <stdexcept>

#include "distvar/resample.hpp"

namespace distvar {

namespace {
constexpr double kSufficientDecrease = 1e-4;
}

void validate(const SolverConfig& config) {
    if (config.iterations < 0) throw std::invalid_argument("solver: iterations must be >= 0");
    if (config.tau0 <= 0.0) throw std::invalid_argument("solver: tau0 must be > 0");
    if (config.backtrack_rho <= 0.0 || config.backtrack_rho >= 1.0)
        throw std::invalid_argument("solver: backtracking factor must lie in (0,1)");
    if (config.max_halvings < 0) throw std::invalid_argument("solver: max_halvings must be >= 0");
    if (config.stop_tol < 0.0) throw std::invalid_argument("solver: stop_tol must be >= 0");
    for (double l : config.lambda_schedule)
        if (l < 0.0) throw std::invalid_argument("solver: lambda schedule must be >= 0");
}

namespace {

double lambda_at(const SolverConfig& config, const RegularizerParams& params, int k) {
    if (config.lambda_schedule.empty()) return params.lambda;
    const int idx = std::min<int>(k, int(config.lambda_schedule.size()) - 1);
    return config.lambda_schedule[idx];
}

EnergyBreakdown energy_with_lambda(const ScalarField& u, const ScalarField& u0,
                                   const DegradationModel& model, const ScalarField& depth_map,
                                   const ScalarField& reg_depth, const RegularizerParams& params,
                                   double lambda) {
    const ScalarField residual = subtract(apply(model, u, depth_map), u0);
    EnergyBreakdown e;
    e.data = 0.5 * inner_product(residual, residual);
    e.reg = lambda * regularizer_value(u, reg_depth, params);
    e.total = e.data + e.reg;
    return e;
}

}  // namespace

EnergyBreakdown energy(const ScalarField& u, const ScalarField& u0, const DegradationModel& model,
                       const ScalarField& depth_map, const RegularizerParams& params) {
    return energy_with_lambda(u, u0, model, depth_map, depth_map, params, params.lambda);
}

ScalarField energy_gradient(const ScalarField& u, const ScalarField& u0,
                            const DegradationModel& model, const ScalarField& depth_map,
                            const RegularizerParams& params) {
    const ScalarField residual = subtract(apply(model, u, depth_map), u0);
    const ScalarField data_grad = apply_adjoint(model, residual, depth_map);
    return axpy(data_grad, params.lambda, regularizer_gradient(u, depth_map, params));
}

std::string SolverTrace::to_csv() const {
    std::ostringstream out;
    out.precision(17);
    out << "iteration,energy,data_term,reg_term,tau,el_residual,consistency_residual\n";
    for (const TraceRow& r : rows)
        out << r.iteration << ',' << r.energy << ',' << r.data_term << ',' << r.reg_term << ','
            << r.tau << ',' << r.el_residual << ',' << r.consistency_residual << '\n';
    return out.str();
}

void flow_step(SolverState& state, const ScalarField& u0, const DegradationModel& model,
               const ScalarField& depth_map, const ScalarField& reg_depth,
               const RegularizerParams& params, const SolverConfig& config,
               const KernelBank* bank, SolverTrace& trace) {
    const int k = state.step_index;
    const double lambda_k = lambda_at(config, params, k);
    if (state.current_lambda != lambda_k) {
        state.current =
            energy_with_lambda(state.u, u0, model, depth_map, reg_depth, params, lambda_k);
        state.current_lambda = lambda_k;
    }

    const ScalarField residual = subtract(apply(model, state.u, depth_map), u0);
    const ScalarField data_grad = apply_adjoint(model, residual, depth_map);

    ScalarField reg_dir = regularizer_gradient(state.u, reg_depth, params);
    ScalarField direction(state.u.width, state.u.height, 0.0, state.u.pixel_pitch);
    if (config.mode == SolverMode::kKernelBank) {
        if (bank == nullptr)
            throw std::invalid_argument("flow_step: kernel-bank mode requires a bank");
        direction = axpy(data_grad, lambda_k, apply_bank(*bank, state.u, reg_depth));
    } else {
        direction = axpy(data_grad, lambda_k, reg_dir);
    }
    const ScalarField analytic_grad = axpy(data_grad, lambda_k, reg_dir);
    const double el_residual = norm_l2(analytic_grad);

    const double dir_norm2 = inner_product(direction, direction);
    TraceRow row;
    row.iteration = k + 1;
    row.el_residual = el_residual;

    if (dir_norm2 == 0.0) {
        // Stationary point: the step is the identity and tau is untouched.
        row.energy = state.current.total;
        row.data_term = state.current.data;
        row.reg_term = state.current.reg;
        row.tau = state.tau;
        row.consistency_residual = 0.0;
        trace.rows.push_back(row);
        ++state.step_index;
        return;
    }

    double tau = state.tau;
    bool accepted = false;
    ScalarField candidate = state.u;
    EnergyBreakdown cand_energy = state.current;
    for (int halvings = 0; halvings <= config.max_halvings; ++halvings) {
        candidate = axpy(state.u, -tau, direction);
        cand_energy =
            energy_with_lambda(candidate, u0, model, depth_map, reg_depth, params, lambda_k);
        if (cand_energy.total <= state.current.total - kSufficientDecrease * tau * dir_norm2) {
            accepted = true;
            break;
        }
        tau *= config.backtrack_rho;
    }

    if (accepted) {
        state.u = std::move(candidate);
        state.current = cand_energy;
        // Adaptive step: try growing again next iteration; backtracking
        // pulls it back down whenever the sufficient-decrease rule fails.
        state.tau = tau / config.backtrack_rho;
        row.tau = tau;
        // (u' - u)/tau == -direction exactly, so the consistency term
        // reduces to ||analytic_grad - direction||^2 (zero in analytic mode).
        if (config.mode == SolverMode::kKernelBank) {
            const ScalarField dev = subtract(analytic_grad, direction);
            row.consistency_residual = inner_product(dev, dev);
        } else {
            row.consistency_residual = 0.0;
        }
    } else {
        // Backtracking exhausted: record a zero step, keep the iterate.
        trace.backtrack_exhausted = true;
        row.tau = 0.0;
        row.consistency_residual = el_residual * el_residual;
    }
    row.energy = state.current.total;
    row.data_term = state.current.data;
    row.reg_term = state.current.reg;
    trace.rows.push_back(row);
    ++state.step_index;
}

RestoreResult restore(const ScalarField& u0, const ScalarField& depth_map,
                      const DegradationModel& model, const RegularizerParams& params,
                      const SolverConfig& config, const KernelBank* bank) {
    validate(config);
    validate(params);

    const int hw = u0.width * model.scale, hh = u0.height * model.scale;
    ScalarField depth_hr = depth_map;
    if (depth_map.width == hw && depth_map.height == hh) {
        // already HR
    } else if (depth_map.width == u0.width && depth_map.height == u0.height) {
        depth_hr = upsample_bilinear(depth_map, model.scale);
    } else {
        throw std::invalid_argument("restore: depth map must match the LR or HR grid");
    }

    ScalarField reg_depth = depth_hr;
    if (config.constant_reg_depth) {
        // Depth-blind ablation: freeze the regularizer at the midpoint of the
        // operating depth range (the same reference the bin grid is centered
        // on), independent of scene composition.
        double dmin = depth_hr[0], dmax = depth_hr[0];
        for (double d : depth_hr.data) {
            dmin = std::min(dmin, d);
            dmax = std::max(dmax, d);
        }
        reg_depth = ScalarField(depth_hr.width, depth_hr.height, 0.5 * (dmin + dmax),
                                depth_hr.pixel_pitch);
    }

    SolverState state;
    state.u = config.init == SolverInit::kWiener
                  ? wiener_restore(u0, model, depth_hr, config.wiener_profile)
                  : upsample_bilinear(u0, model.scale);
    state.tau = config.tau0;
    state.current_lambda = lambda_at(config, params, 0);
    state.current = energy_with_lambda(state.u, u0, model, depth_hr, reg_depth, params,
                                       state.current_lambda);

    RestoreResult result;
    result.trace.initial_energy = state.current.total;
    result.trace.initial_data = state.current.data;
    result.trace.initial_reg = state.current.reg;

    for (int k = 0; k < config.iterations; ++k) {
        const double before = state.current.total;
        flow_step(state, u0, model, depth_hr, reg_depth, params, config, bank, result.trace);
        const double after = state.current.total;
        const double rel_decrease = (before - after) / std::max(std::fabs(before), 1e-300);
        if (rel_decrease < config.stop_tol) break;
    }

    result.image = clamp01(state.u);
    result.image.pixel_pitch = depth_hr.pixel_pitch;
    return result;
}

namespace {

struct CoordSpec {
    const char* name;
    double RegularizerParams::*member;
    double lo;
    double hi;
};

const CoordSpec kCoords[] = {
    {"lambda", &RegularizerParams::lambda, 1e-5, 1.0},
    {"mu", &RegularizerParams::mu, 0.0, 0.1},
    {"d0", &RegularizerParams::d0, 0.5, 200.0},
    {"d1", &RegularizerParams::d1, 0.5, 200.0},
    {"gamma0", &RegularizerParams::gamma0, 0.0, 2.0},
    {"gamma1", &RegularizerParams::gamma1, 0.0, 2.0},
    {"sigma_r0", &RegularizerParams::sigma_r0, 1e-3, 1.0},
    {"d_sigma", &RegularizerParams::d_sigma, 0.5, 200.0},
};

const CoordSpec* find_coord(const std::string& name) {
    for (const CoordSpec& c : kCoords)
        if (name == c.name) return &c;
    return nullptr;
}

/// Golden-section minimizer over [a, b]. Ties keep the lower segment, so a
/// flat objective resolves to the lower bound (least regularization).
double golden_section(const std::function<double(double)>& f, double a, double b, int iters,
                      double* f_best) {
    const double inv_phi = 0.6180339887498949;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int i = 0; i < iters; ++i) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
    }
    const double x = f1 <= f2 ? x1 : x2;
    if (f_best) *f_best = std::min(f1, f2);
    return x;
}

}  // namespace

const std::vector<std::string>& calibratable_coords() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> out;
        for (const CoordSpec& c : kCoords) out.emplace_back(c.name);
        return out;
    }();
    return names;
}

CalibrationResult calibrate(const RegularizerParams& init,
                            const std::vector<TrainingTriple>& data,
                            const AtmosphereParams& atm, int num_bins, int scale,
                            const SolverConfig& solver_config, const CalibrateOptions& opts) {
    if (data.empty()) throw std::invalid_argument("calibrate: empty training set");
    validate(init);

    // Models depend on atmosphere and depth only, so build them once.
    std::vector<DegradationModel> models;
    models.reserve(data.size());
    double d_max = 0.0;
    for (const TrainingTriple& t : data) {
        models.push_back(build_model(atm, t.depth, num_bins, scale));
        for (double d : t.depth.data) d_max = std::max(d_max, d);
    }
    const std::vector<double> depth_grid = uniform_depth_grid(d_max, opts.depth_grid_points);

    auto objective = [&](const RegularizerParams& p) {
        double acc = 0.0;
        for (std::size_t j = 0; j < data.size(); ++j) {
            const RestoreResult r =
                restore(data[j].lr, data[j].depth, models[j], p, solver_config);
            const ScalarField diff = subtract(r.image, data[j].hr);
            acc += inner_product(diff, diff);
        }
        acc += opts.alpha * monotonicity_penalty(p, depth_grid);
        acc += opts.beta * smoothness_penalty(p, depth_grid);
        return acc;
    };

    CalibrationResult result;
    result.params = init;
    double current = objective(result.params);
    result.objective_trace.push_back(current);

    for (int pass = 0; pass < opts.passes; ++pass) {
        for (const std::string& name : opts.coords) {
            const CoordSpec* spec = find_coord(name);
            if (!spec) throw std::invalid_argument("calibrate: unknown coordinate " + name);
            auto line = [&](double v) {
                RegularizerParams p = result.params;
                p.*(spec->member) = v;
                return objective(p);
            };
            double f_best = 0.0;
            const double best = golden_section(line, spec->lo, spec->hi, opts.golden_iters,
                                               &f_best);
            if (f_best <= current) {
                result.params.*(spec->member) = best;
                current = f_best;
                result.objective_trace.push_back(current);
            }
        }
    }
    return result;
}

}  // namespace distvar
