// sideband-sim: steady states, sweeps, and cross-validation engines for the
// coupled two-oscillator sideband cooling model.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "sideband/sideband.hpp"

namespace {

using nlohmann::json;
using namespace sideband;

constexpr int exit_ok = 0;
constexpr int exit_config_error = 2;
constexpr int exit_all_failed = 3;
constexpr int exit_capacity = 4;

struct GlobalOpts {
    std::string config_path;
    std::string out_path;
    uint64_t seed = 1;
    int threads = 0;  // 0 = unset; falls back to SIDEBAND_SIM_THREADS, then 1
    double tol = 1e-3;

    int resolved_threads() const {
        if (threads > 0) return threads;
        if (const char* env = std::getenv("SIDEBAND_SIM_THREADS")) {
            const int n = std::atoi(env);
            if (n > 0) return n;
        }
        return 1;
    }
};

std::vector<Engine> parse_engines(const std::string& csv) {
    std::vector<Engine> out;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok == "closed_form") out.push_back(Engine::ClosedForm);
        else if (tok == "rate") out.push_back(Engine::Rate);
        else if (tok == "lindblad") out.push_back(Engine::Lindblad);
        else if (tok == "langevin") out.push_back(Engine::Langevin);
        else throw PreconditionError("unknown engine '" + tok + "'");
    }
    if (out.empty()) throw PreconditionError("no engines given");
    return out;
}

// Writes to --out when set, stdout otherwise.
void emit(const GlobalOpts& g, const std::string& text) {
    if (g.out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(g.out_path, std::ios::binary);
    if (!f) throw Error("cannot open output file '" + g.out_path + "'");
    f << text;
}

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

int cmd_steady(const GlobalOpts& g, const std::string& engines_csv) {
    const auto loaded = load_config(g.config_path);
    const auto& c = loaded.config;
    const auto engines = parse_engines(engines_csv);
    auto has = [&](Engine e) {
        return std::find(engines.begin(), engines.end(), e) != engines.end();
    };

    json out;
    std::ostringstream text;
    text.precision(10);
    text << "steady-state report (units: "
         << (c.unit_system == UnitSystem::SI ? "si" : "scaled") << ")\n";
    const auto det = detunings(c);
    text << "  delta = " << det.delta << ", delta_c = " << det.delta_c
         << ", delta_h = " << det.delta_h << "\n";
    out["delta"] = det.delta;
    out["delta_c"] = det.delta_c;
    out["delta_h"] = det.delta_h;

    const auto rwa = validate_rwa(c);
    out["rwa_pass"] = rwa.pass;
    if (!rwa.pass) text << "  warning: " << rwa.message << "\n";

    if (c.coupling.type == CouplingType::BeamSplitter && c.drive.amplitude == 0.0)
        text << "  no cooling (decoupled): amplitude = 0\n";

    if (has(Engine::ClosedForm) || has(Engine::Rate)) {
        try {
            const auto rep = steady_state_report(c);
            out["xi"] = rep.xi;
            out["t_eff"] = rep.t_eff;
            text << "  xi = " << rep.xi << "\n";
            text << "  T_eff = " << rep.t_eff
                 << (c.unit_system == UnitSystem::SI ? " K" : " (omega_b units, k_B = 1)") << "\n";
            if (has(Engine::ClosedForm)) {
                out["closed_form"]["n_b"] = rep.n_b_final;
                out["closed_form"]["n_a"] = rep.n_a_final;
                text << "  closed_form: n_b = " << rep.n_b_final << ", n_a = " << rep.n_a_final
                     << "\n";
            }
            if (has(Engine::Rate)) {
                const auto ss = steady_moments(c);
                out["rate"]["n_b"] = ss.n_b;
                out["rate"]["n_a"] = ss.n_a;
                text << "  rate:        n_b = " << ss.n_b << ", n_a = " << ss.n_a << "\n";
            }
            const double strong = resonant_strong_drive_population(c);
            out["resonant_strong_drive_limit"] = strong;
            text << "  strong-drive resonant limit = " << strong << "\n";
        } catch (const UnsupportedModelError& e) {
            text << "  closed_form/rate: " << e.what() << "\n";
            out["unsupported"] = e.what();
        }
    }
    if (has(Engine::Lindblad)) {
        const auto dims = truncation_check(c, FockDims{4, 4}, g.tol);
        const auto sol = steady_density(c, dims);
        out["lindblad"]["n_b"] = sol.n_b;
        out["lindblad"]["n_a"] = sol.n_a;
        out["lindblad"]["residual"] = sol.residual;
        out["lindblad"]["dim_a"] = sol.rho.dims.dim_a;
        out["lindblad"]["dim_b"] = sol.rho.dims.dim_b;
        text << "  lindblad:    n_b = " << sol.n_b << ", n_a = " << sol.n_a << " (dims "
             << dims.dim_a << "x" << dims.dim_b << ", residual " << sol.residual << ")\n";
    }
    if (has(Engine::Langevin)) {
        RunOptions opt;
        opt.seed = g.seed;
        SweepSpec one;
        one.engines = {Engine::Langevin};
        const auto row = evaluate_point(c, one, c.detuning(), opt, std::nullopt);
        if (row.lv_n_b) {
            out["langevin"]["n_b"] = *row.lv_n_b;
            out["langevin"]["se_n_b"] = *row.lv_se_n_b;
            text << "  langevin:    n_b = " << *row.lv_n_b << " +- " << *row.lv_se_n_b << "\n";
        } else {
            text << "  langevin: " << row.reason << "\n";
        }
    }

    const auto jc = jc_cooling_limit(c);
    const auto sb = sideband_cooling_limit(c);
    out["jc_limit"] = jc.limit;
    out["jc_regime_ok"] = jc.regime_ok;
    out["sideband_limit"] = sb.limit;
    out["sideband_optimal_detuning"] = sb.optimal_detuning;
    out["sideband_resolved_ok"] = sb.resolved_ok;
    text << "  jc limit = " << jc.limit << " (regime " << (jc.regime_ok ? "ok" : "not met")
         << "), sideband limit = " << sb.limit << " at delta = " << sb.optimal_detuning
         << " (resolved " << (sb.resolved_ok ? "ok" : "not met") << ")\n";

    std::cout << text.str();
    if (!g.out_path.empty()) emit(g, out.dump(2) + "\n");
    return exit_ok;
}

int cmd_evolve(const GlobalOpts& g, double t_final, double rel_tol, double n_a0, double n_b0) {
    const auto loaded = load_config(g.config_path);
    const auto& c = loaded.config;
    MomentState init{n_a0 < 0 ? c.mode_a.bath_occupation : n_a0,
                     n_b0 < 0 ? c.mode_b.bath_occupation : n_b0, 0.0};
    const auto traj = evolve_moments(init, c, t_final, rel_tol);
    std::ostringstream csv;
    char hash[32];
    std::snprintf(hash, sizeof hash, "%016llx", (unsigned long long)loaded.hash);
    csv << "# sideband-sim " << version_string << "\n# config_hash: " << hash
        << "\n# seed: " << g.seed << "\nt,n_a,n_b,re_sigma,im_sigma\n";
    for (size_t i = 0; i < traj.times.size(); ++i) {
        const auto& s = traj.states[i];
        csv << fmt_double(traj.times[i]) << ',' << fmt_double(s.n_a) << ',' << fmt_double(s.n_b)
            << ',' << fmt_double(s.sigma.real()) << ',' << fmt_double(s.sigma.imag()) << "\n";
    }
    emit(g, csv.str());
    return exit_ok;
}

int cmd_sweep(const GlobalOpts& g, const SweepSpec& spec) {
    const auto loaded = load_config(g.config_path);
    RunOptions opt;
    opt.seed = g.seed;
    opt.threads = g.resolved_threads();
    opt.tol = g.tol;
    const auto result = run_sweep(loaded.config, spec, opt, loaded.hash);
    std::ostringstream csv;
    write_csv(csv, result);
    emit(g, csv.str());
    if (result.failed_rows == int(result.rows.size())) {
        std::cerr << "sweep: all " << result.rows.size() << " points failed\n";
        return exit_all_failed;
    }
    return exit_ok;
}

int cmd_lindblad(const GlobalOpts& g, int dim_a, int dim_b, const std::string& method_name) {
    const auto loaded = load_config(g.config_path);
    const auto& c = loaded.config;
    SteadyMethod method = SteadyMethod::Auto;
    if (method_name == "null_space") method = SteadyMethod::NullSpace;
    else if (method_name == "long_time") method = SteadyMethod::LongTime;
    else if (method_name != "auto") throw PreconditionError("unknown method '" + method_name + "'");

    FockDims dims{4, 4};
    if (dim_a > 0 && dim_b > 0)
        dims = FockDims{dim_a, dim_b};
    else
        dims = truncation_check(c, dims, g.tol);
    const auto sol = steady_density(c, dims, method);

    json out;
    out["n_a"] = sol.n_a;
    out["n_b"] = sol.n_b;
    out["residual"] = sol.residual;
    out["truncation_ok"] = sol.truncation_ok;
    out["dim_a"] = dims.dim_a;
    out["dim_b"] = dims.dim_b;
    out["trace_deviation"] = sol.rho.trace_deviation();
    out["hermiticity_deviation"] = sol.rho.hermiticity_deviation();
    out["min_eigenvalue"] = sol.rho.min_eigenvalue();
    out["t_eff"] = sol.n_b > 0 ? effective_temperature(sol.n_b, c.omega_b(), c.unit_system) : 0.0;
    std::cout << "lindblad steady state: n_b = " << sol.n_b << ", n_a = " << sol.n_a << " (dims "
              << dims.dim_a << "x" << dims.dim_b << ", residual " << sol.residual << ")\n";
    if (!g.out_path.empty()) emit(g, out.dump(2) + "\n");
    return exit_ok;
}

int cmd_ensemble(const GlobalOpts& g, int n_atoms, int m_a, int n_b, double delta, double omega_b,
                 double omega, double t_final, int points) {
    AtomicConfig cfg{n_atoms, delta, omega_b, omega};
    std::vector<double> grid(points);
    for (int i = 0; i < points; ++i) grid[i] = t_final * i / (points - 1);
    const auto cmp = compare_dynamics(cfg, m_a, n_b, grid);
    std::ostringstream csv;
    csv << "# sideband-sim " << version_string << "\n# n_atoms: " << n_atoms << "\n# max_deviation: "
        << fmt_double(cmp.max_deviation) << "\nt,n_b_atomic,n_b_bosonic,deviation\n";
    for (size_t i = 0; i < cmp.times.size(); ++i)
        csv << fmt_double(cmp.times[i]) << ',' << fmt_double(cmp.n_b_atomic[i]) << ','
            << fmt_double(cmp.n_b_bosonic[i]) << ','
            << fmt_double(std::abs(cmp.n_b_atomic[i] - cmp.n_b_bosonic[i])) << "\n";
    emit(g, csv.str());
    std::cerr << "max deviation: " << cmp.max_deviation << "\n";
    return exit_ok;
}

int cmd_linearize(const GlobalOpts& g) {
    const auto loaded = load_config(g.config_path);
    const auto& c = loaded.config;
    if (c.coupling.type != CouplingType::Generalized)
        throw PreconditionError("linearize requires coupling.kind = generalized");
    const auto eq = equilibrium_displacements(c.coupling.f_spec, c.coupling.g_prime,
                                              c.coupling.f_drive, c.detuning(), c.omega_b());
    const auto lin = linearized_params(c.coupling.f_spec, c.coupling.g_prime, eq.alpha, eq.beta,
                                       c.detuning());
    const auto exp_res = expansion_residual(c.coupling.f_spec, c.coupling.g_prime,
                                            c.coupling.f_drive, c.detuning(), c.omega_b(),
                                            eq.alpha, eq.beta);
    json out;
    out["alpha"] = eq.alpha;
    out["beta"] = eq.beta;
    out["delta_eff"] = lin.delta_eff;
    out["g_eff"] = lin.g_eff;
    out["stationarity_residual"] = eq.residual;
    out["expansion_linear_residual"] = exp_res.linear;
    out["expansion_quadratic_mismatch"] = exp_res.quadratic;
    out["multistable"] = eq.multistable();
    std::cout.precision(12);
    std::cout << "linearization: alpha = " << eq.alpha << ", beta = " << eq.beta
              << ", delta_eff = " << lin.delta_eff << ", g_eff = " << lin.g_eff << "\n"
              << "  stationarity residual = " << eq.residual
              << ", expansion linear = " << exp_res.linear
              << ", quadratic mismatch = " << exp_res.quadratic << "\n";
    for (const auto& r : eq.all_roots) {
        const bool is_default = r.alpha == eq.alpha;
        out["roots"].push_back({{"alpha", r.alpha}, {"beta", r.beta}, {"residual", r.residual},
                                {"default", is_default}});
        std::cout << "  root: alpha = " << r.alpha << ", beta = " << r.beta << ", residual = "
                  << r.residual << (is_default ? " [default]" : "") << "\n";
    }
    if (!g.out_path.empty()) emit(g, out.dump(2) + "\n");
    return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sideband cooling simulator"};
    app.require_subcommand(1);

    GlobalOpts g;
    app.add_option("--config", g.config_path, "config file path");
    app.add_option("--out", g.out_path, "output file path (default stdout)");
    app.add_option("--seed", g.seed, "RNG seed");
    app.add_option("--threads", g.threads, "worker threads (env SIDEBAND_SIM_THREADS fallback)");
    app.add_option("--tol", g.tol, "truncation / convergence tolerance");

    auto* steady = app.add_subcommand("steady", "steady-state point report");
    std::string engines_csv = "closed_form,rate";
    steady->add_option("--engines", engines_csv, "comma list: closed_form,rate,lindblad,langevin");

    auto* evolve = app.add_subcommand("evolve", "rate-equation time evolution (CSV)");
    double t_final = 10.0, rel_tol = 1e-8, n_a0 = -1.0, n_b0 = -1.0;
    evolve->add_option("--t-final", t_final, "final time");
    evolve->add_option("--rel-tol", rel_tol, "integrator relative tolerance");
    evolve->add_option("--n-a0", n_a0, "initial <n_a> (default: bath occupation)");
    evolve->add_option("--n-b0", n_b0, "initial <n_b> (default: bath occupation)");

    auto* sweep = app.add_subcommand("sweep", "parameter sweep (CSV)");
    SweepSpec spec;
    std::string param_name = "delta", spacing_name = "linear", sweep_engines = "closed_form,rate";
    sweep->add_option("--param", param_name, "delta | omega_drive | amplitude | g");
    sweep->add_option("--start", spec.start, "sweep start")->required();
    sweep->add_option("--stop", spec.stop, "sweep stop")->required();
    sweep->add_option("--points", spec.points, "grid points (>= 2)")->required();
    sweep->add_option("--spacing", spacing_name, "linear | log");
    sweep->add_option("--engines", sweep_engines, "comma list of engines");

    auto* lindblad = app.add_subcommand("lindblad", "Lindblad steady state");
    int dim_a = 0, dim_b = 0;
    std::string method_name = "auto";
    lindblad->add_option("--dim-a", dim_a, "Fock dimension of mode a (default: auto)");
    lindblad->add_option("--dim-b", dim_b, "Fock dimension of mode b (default: auto)");
    lindblad->add_option("--method", method_name, "auto | null_space | long_time");

    auto* ensemble = app.add_subcommand("ensemble", "atomic vs bosonic dynamics (CSV)");
    int n_atoms = 3, m_a = 0, n_b = 1, points = 201;
    double ens_delta = 1.0, ens_omega_b = 1.0, ens_omega = 0.5, ens_t_final = 20.0;
    ensemble->add_option("--n-atoms", n_atoms, "number of atoms (1..6)");
    ensemble->add_option("--ma", m_a, "initial a-excitations");
    ensemble->add_option("--nb", n_b, "initial b-excitations");
    ensemble->add_option("--delta", ens_delta, "detuning");
    ensemble->add_option("--omega-b", ens_omega_b, "b-mode frequency");
    ensemble->add_option("--omega", ens_omega, "drive coupling");
    ensemble->add_option("--t-final", ens_t_final, "final time");
    ensemble->add_option("--points", points, "time grid points");

    auto* linearize_cmd = app.add_subcommand("linearize", "generalized-model linearization report");
    (void)linearize_cmd;

    CLI11_PARSE(app, argc, argv);

    try {
        if (steady->parsed()) return cmd_steady(g, engines_csv);
        if (evolve->parsed()) return cmd_evolve(g, t_final, rel_tol, n_a0, n_b0);
        if (sweep->parsed()) {
            if (param_name == "delta") spec.parameter = SweepParameter::Delta;
            else if (param_name == "omega_drive") spec.parameter = SweepParameter::OmegaDrive;
            else if (param_name == "amplitude") spec.parameter = SweepParameter::Amplitude;
            else if (param_name == "g") spec.parameter = SweepParameter::G;
            else throw PreconditionError("unknown sweep parameter '" + param_name + "'");
            if (spacing_name == "linear") spec.spacing = Spacing::Linear;
            else if (spacing_name == "log") spec.spacing = Spacing::Log;
            else throw PreconditionError("unknown spacing '" + spacing_name + "'");
            spec.engines = parse_engines(sweep_engines);
            return cmd_sweep(g, spec);
        }
        if (lindblad->parsed()) return cmd_lindblad(g, dim_a, dim_b, method_name);
        if (ensemble->parsed())
            return cmd_ensemble(g, n_atoms, m_a, n_b, ens_delta, ens_omega_b, ens_omega,
                                ens_t_final, points);
        if (linearize_cmd->parsed()) return cmd_linearize(g);
    } catch (const sideband::ConfigParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_config_error;
    } catch (const sideband::CapacityError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_capacity;
    } catch (const sideband::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return exit_ok;
}
