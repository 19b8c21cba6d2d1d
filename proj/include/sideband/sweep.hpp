#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "sideband/closed_form.hpp"
#include "sideband/lindblad.hpp"
#include "sideband/model.hpp"
#include "sideband/rate_dynamics.hpp"

namespace sideband {

enum class Engine { ClosedForm, Rate, Lindblad, Langevin };

inline const char* engine_name(Engine e) {
    switch (e) {
        case Engine::ClosedForm: return "closed_form";
        case Engine::Rate: return "rate";
        case Engine::Lindblad: return "lindblad";
        case Engine::Langevin: return "langevin";
    }
    return "?";
}

enum class SweepParameter { Delta, OmegaDrive, Amplitude, G };

inline const char* parameter_name(SweepParameter p) {
    switch (p) {
        case SweepParameter::Delta: return "delta";
        case SweepParameter::OmegaDrive: return "omega_drive";
        case SweepParameter::Amplitude: return "amplitude";
        case SweepParameter::G: return "g";
    }
    return "?";
}

enum class Spacing { Linear, Log };

struct SweepSpec {
    SweepParameter parameter = SweepParameter::Delta;
    double start = 0.0;
    double stop = 1.0;
    int points = 2;
    Spacing spacing = Spacing::Linear;
    std::vector<Engine> engines{Engine::ClosedForm, Engine::Rate};

    void validate() const {
        if (points < 2) throw PreconditionError("sweep: points must be >= 2");
        if (!(start < stop)) throw PreconditionError("sweep: start must be < stop");
        if (spacing == Spacing::Log && !(start > 0.0))
            throw PreconditionError("sweep: log spacing requires start > 0");
        if (engines.empty()) throw PreconditionError("sweep: at least one engine required");
    }

    bool has(Engine e) const { return std::find(engines.begin(), engines.end(), e) != engines.end(); }

    std::vector<double> grid() const {
        std::vector<double> g(points);
        for (int i = 0; i < points; ++i) {
            const double f = double(i) / (points - 1);
            g[i] = spacing == Spacing::Linear
                       ? start + f * (stop - start)
                       : std::exp(std::log(start) + f * (std::log(stop) - std::log(start)));
        }
        return g;
    }
};

struct RunOptions {
    uint64_t seed = 1;
    int threads = 1;
    double tol = 1e-3;          // truncation tolerance for the Lindblad engine
    int langevin_traj = 2000;
    double langevin_t_final = 0.0;  // 0 = auto from relaxation rate
    double langevin_dt = 0.0;       // 0 = auto from fastest rate
    std::optional<FockDims> dims;   // fixed Lindblad truncation; default: truncation_check
    int capacity = FockDims::default_capacity;
};

struct SweepRow {
    double param = 0.0;
    std::optional<double> cf_n_b, cf_n_a;
    std::optional<double> rate_n_b, rate_n_a;
    std::optional<double> lb_n_b, lb_n_a, lb_residual;
    std::optional<double> lv_n_b, lv_n_a, lv_se_n_b;
    std::optional<double> t_eff;
    std::string reason;
};

struct SweepResult {
    SweepSpec spec;
    std::vector<SweepRow> rows;
    uint64_t config_hash = 0;
    uint64_t seed = 0;
    UnitSystem unit_system = UnitSystem::Scaled;
    int failed_rows = 0;
};

namespace detail_sw {

inline SystemConfig with_parameter(SystemConfig config, SweepParameter p, double value) {
    switch (p) {
        case SweepParameter::Delta:
            config.drive.drive_frequency = config.mode_a.frequency - value;
            break;
        case SweepParameter::OmegaDrive:
            config.drive.drive_frequency = value;
            break;
        case SweepParameter::Amplitude:
        case SweepParameter::G:
            config.drive.amplitude = value;
            break;
    }
    return config;
}

inline void append_reason(std::string& reason, const std::string& add) {
    if (!reason.empty()) reason += "; ";
    reason += add;
}

// Relaxation timescales of the 2x2 c-number amplitude system.
inline std::pair<double, double> langevin_timescales(const SystemConfig& config) {
    const auto rc = RateCoefficients::from_config(config);
    const double omega = config.drive.amplitude;
    Eigen::Matrix2cd m;
    m << -rc.gamma_a, complexd(0, omega), complexd(0, omega), -rc.gamma_b;
    const Eigen::Vector2cd ev = m.eigenvalues();
    const double slowest = std::min(-ev[0].real(), -ev[1].real());
    const double fastest = std::max({std::abs(rc.gamma_a), std::abs(rc.gamma_b), omega});
    return {slowest, fastest};
}

}  // namespace detail_sw

inline SweepRow evaluate_point(const SystemConfig& config, const SweepSpec& spec, double value,
                               const RunOptions& opt, std::optional<FockDims> lindblad_dims) {
    SweepRow row;
    row.param = value;
    const SystemConfig c = detail_sw::with_parameter(config, spec.parameter, value);

    if (spec.has(Engine::ClosedForm)) {
        try {
            auto [nb, na] = steady_population(c);
            row.cf_n_b = nb;
            row.cf_n_a = na;
        } catch (const Error& e) {
            detail_sw::append_reason(row.reason, std::string("closed_form: ") + e.what());
        }
    }
    if (spec.has(Engine::Rate)) {
        try {
            const auto ss = steady_moments(c);
            row.rate_n_b = ss.n_b;
            row.rate_n_a = ss.n_a;
        } catch (const Error& e) {
            detail_sw::append_reason(row.reason, std::string("rate: ") + e.what());
        }
    }
    if (spec.has(Engine::Lindblad)) {
        try {
            const FockDims dims = lindblad_dims ? *lindblad_dims
                                                : truncation_check(c, FockDims{4, 4}, opt.tol,
                                                                   opt.capacity);
            const auto sol = steady_density(c, dims, SteadyMethod::Auto, 1e-10, opt.capacity);
            row.lb_n_b = sol.n_b;
            row.lb_n_a = sol.n_a;
            row.lb_residual = sol.residual;
        } catch (const Error& e) {
            detail_sw::append_reason(row.reason, std::string("lindblad: ") + e.what());
        }
    }
    if (spec.has(Engine::Langevin)) {
        try {
            auto [slowest, fastest] = detail_sw::langevin_timescales(c);
            const double t_final =
                opt.langevin_t_final > 0 ? opt.langevin_t_final : 8.0 / std::max(slowest, 1e-12);
            const double dt = opt.langevin_dt > 0 ? opt.langevin_dt : 0.05 / std::max(fastest, 1e-12);
            const auto est = langevin_sample(c, opt.langevin_traj, opt.seed, t_final, dt);
            row.lv_n_b = est.mean.n_b;
            row.lv_n_a = est.mean.n_a;
            row.lv_se_n_b = est.se_n_b;
        } catch (const Error& e) {
            detail_sw::append_reason(row.reason, std::string("langevin: ") + e.what());
        }
    }

    for (const auto* nb : {&row.lb_n_b, &row.rate_n_b, &row.cf_n_b, &row.lv_n_b}) {
        if (*nb && **nb > 0.0) {
            row.t_eff = effective_temperature(**nb, c.omega_b(), c.unit_system);
            break;
        }
    }
    return row;
}

inline SweepResult run_sweep(const SystemConfig& config, const SweepSpec& spec,
                             const RunOptions& opt = {}, uint64_t config_hash_value = 0) {
    spec.validate();
    config.validate();
    const auto grid = spec.grid();

    // One truncation per sweep: sized at both endpoints, reused everywhere.
    std::optional<FockDims> dims = opt.dims;
    std::string dims_failure;
    if (spec.has(Engine::Lindblad) && !dims) {
        try {
            const auto lo = truncation_check(detail_sw::with_parameter(config, spec.parameter, grid.front()),
                                             FockDims{4, 4}, opt.tol, opt.capacity);
            const auto hi = truncation_check(detail_sw::with_parameter(config, spec.parameter, grid.back()),
                                             FockDims{4, 4}, opt.tol, opt.capacity);
            dims = FockDims{std::max(lo.dim_a, hi.dim_a), std::max(lo.dim_b, hi.dim_b)};
        } catch (const Error& e) {
            dims_failure = e.what();
        }
    }

    SweepResult result;
    result.spec = spec;
    result.rows.resize(grid.size());
    result.config_hash = config_hash_value;
    result.seed = opt.seed;
    result.unit_system = config.unit_system;

    auto work = [&](size_t begin, size_t end) {
        for (size_t i = begin; i < end; ++i) {
            if (spec.has(Engine::Lindblad) && !dims) {
                // Truncation sizing failed for the whole sweep; skip the engine.
                SweepSpec reduced = spec;
                std::erase(reduced.engines, Engine::Lindblad);
                SweepRow row = evaluate_point(config, reduced, grid[i], opt, std::nullopt);
                detail_sw::append_reason(row.reason, "lindblad: " + dims_failure);
                result.rows[i] = std::move(row);
            } else {
                result.rows[i] = evaluate_point(config, spec, grid[i], opt, dims);
            }
        }
    };
    const int n_threads = std::max(1, opt.threads);
    if (n_threads == 1) {
        work(0, grid.size());
    } else {
        std::vector<std::thread> pool;
        const size_t chunk = (grid.size() + n_threads - 1) / n_threads;
        for (int t = 0; t < n_threads; ++t) {
            const size_t begin = t * chunk;
            const size_t end = std::min(grid.size(), begin + chunk);
            if (begin < end) pool.emplace_back(work, begin, end);
        }
        for (auto& th : pool) th.join();
    }

    for (const auto& row : result.rows) {
        bool any = row.cf_n_b || row.rate_n_b || row.lb_n_b || row.lv_n_b;
        if (!any) ++result.failed_rows;
    }
    return result;
}

// CSV dialect: '#'-prefixed metadata block, mandatory header, comma separator,
// '.' decimal point, "nan" for missing values. Output is byte-identical for
// identical config + seed.
inline void write_csv(std::ostream& os, const SweepResult& r) {
    char buf[64];
    auto fmt = [&](std::optional<double> v) -> std::string {
        if (!v) return "nan";
        std::snprintf(buf, sizeof buf, "%.17g", *v);
        return buf;
    };
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(r.config_hash));
    os << "# sideband-sim " << version_string << "\n";
    os << "# config_hash: " << buf << "\n";
    os << "# seed: " << r.seed << "\n";
    os << "# units: " << (r.unit_system == UnitSystem::SI ? "si" : "scaled") << "\n";
    os << "# parameter: " << parameter_name(r.spec.parameter) << "\n";

    os << "param";
    if (r.spec.has(Engine::ClosedForm)) os << ",closed_form_n_b,closed_form_n_a";
    if (r.spec.has(Engine::Rate)) os << ",rate_n_b,rate_n_a";
    if (r.spec.has(Engine::Lindblad)) os << ",lindblad_n_b,lindblad_n_a,lindblad_residual";
    if (r.spec.has(Engine::Langevin)) os << ",langevin_n_b,langevin_n_a,langevin_se_n_b";
    os << ",t_eff,reason\n";

    for (const auto& row : r.rows) {
        os << fmt(row.param);
        if (r.spec.has(Engine::ClosedForm)) os << ',' << fmt(row.cf_n_b) << ',' << fmt(row.cf_n_a);
        if (r.spec.has(Engine::Rate)) os << ',' << fmt(row.rate_n_b) << ',' << fmt(row.rate_n_a);
        if (r.spec.has(Engine::Lindblad))
            os << ',' << fmt(row.lb_n_b) << ',' << fmt(row.lb_n_a) << ',' << fmt(row.lb_residual);
        if (r.spec.has(Engine::Langevin))
            os << ',' << fmt(row.lv_n_b) << ',' << fmt(row.lv_n_a) << ',' << fmt(row.lv_se_n_b);
        os << ',' << fmt(row.t_eff) << ',' << row.reason << "\n";
    }
}

}  // namespace sideband
