#pragma once

#include <cmath>
#include <utility>

#include "sideband/model.hpp"
#include "sideband/rate_dynamics.hpp"

namespace sideband {

// Steady-state cooling efficiency of the beam-splitter model,
//   xi = Omega^2 ga (ga+gb) / [(ga+gb)^2 (Omega^2 + ga gb / 4) + ga gb (Delta - omega_b)^2],
// so that n_b^f = n_b - xi (n_b - n_a). Depends on Delta and omega_b only
// through their difference.
inline double cooling_efficiency_xi(const SystemConfig& config) {
    const double ga = config.mode_a.decay_rate;
    const double gb = config.mode_b.decay_rate;
    if (ga + gb <= 0.0)
        throw DegenerateConfigError("cooling_efficiency_xi: both decay rates are zero");
    const double omega2 = config.drive.amplitude * config.drive.amplitude;
    const double mismatch = config.detuning() - config.omega_b();
    const double gsum = ga + gb;
    return omega2 * ga * gsum /
           (gsum * gsum * (omega2 + ga * gb / 4.0) + ga * gb * mismatch * mismatch);
}

// (n_b_final, n_a_final). The paper gives only the b-mode closed form; the
// a-mode value comes from the same steady linear system.
inline std::pair<double, double> steady_population(const SystemConfig& config) {
    const double xi = cooling_efficiency_xi(config);
    const double nb = config.mode_b.bath_occupation;
    const double na = config.mode_a.bath_occupation;
    const double n_b_final = nb - xi * (nb - na);
    const auto ss = steady_moments(config);
    return {n_b_final, ss.n_a};
}

// T_eff = hbar omega_b / (k_B ln(1/n + 1)); inverse of thermal_occupation.
inline double effective_temperature(double n_b_final, double omega_b,
                                    UnitSystem units = UnitSystem::SI) {
    if (n_b_final < 0.0) throw DomainError("effective_temperature: occupation must be >= 0");
    if (n_b_final == 0.0) return 0.0;  // documented zero-temperature limit
    const double log_term = std::log1p(1.0 / n_b_final);
    if (units == UnitSystem::SI) return hbar * omega_b / (k_boltzmann * log_term);
    return omega_b / log_term;  // k_B = hbar = 1
}

// Strong-drive resonant (Delta = omega_b) limit: weighted bath average.
inline double resonant_strong_drive_population(const SystemConfig& config) {
    const double ga = config.mode_a.decay_rate;
    const double gb = config.mode_b.decay_rate;
    if (ga + gb <= 0.0)
        throw DegenerateConfigError("resonant_strong_drive_population: both decay rates are zero");
    return (gb * config.mode_b.bath_occupation + ga * config.mode_a.bath_occupation) / (ga + gb);
}

struct CoolingLimit {
    double limit = 0.0;
    bool regime_ok = false;
};

// n_b^lim = n_bar_a, reached when gamma_b nbar_b << gamma_a nbar_a.
inline CoolingLimit jc_cooling_limit(const SystemConfig& config, double ratio = 0.01) {
    CoolingLimit out;
    out.limit = config.mode_a.bath_occupation;
    const double lhs = config.mode_b.decay_rate * config.mode_b.bath_occupation;
    const double rhs = config.mode_a.decay_rate * config.mode_a.bath_occupation;
    out.regime_ok = rhs > 0.0 && lhs <= ratio * rhs;
    return out;
}

struct SidebandLimit {
    double limit = 0.0;             // n_bar_a + gamma_a^2 / (4 omega_b^2)
    double optimal_detuning = 0.0;  // sqrt(omega_b^2 + gamma_a^2)
    bool resolved_ok = false;       // gamma_a / omega_b below threshold
};

inline SidebandLimit sideband_cooling_limit(const SystemConfig& config,
                                            double resolved_threshold = 0.3) {
    const double ga = config.mode_a.decay_rate;
    const double wb = config.omega_b();
    if (!(wb > 0.0)) throw DomainError("sideband_cooling_limit: omega_b must be > 0");
    SidebandLimit out;
    out.limit = config.mode_a.bath_occupation + ga * ga / (4.0 * wb * wb);
    out.optimal_detuning = std::sqrt(wb * wb + ga * ga);
    out.resolved_ok = ga / wb < resolved_threshold;
    return out;
}

struct SteadyStateReport {
    double xi = 0.0;
    double n_b_final = 0.0;
    double n_a_final = 0.0;
    double t_eff = 0.0;
};

inline SteadyStateReport steady_state_report(const SystemConfig& config) {
    SteadyStateReport r;
    r.xi = cooling_efficiency_xi(config);
    auto [nb, na] = steady_population(config);
    r.n_b_final = nb;
    r.n_a_final = na;
    r.t_eff = effective_temperature(nb, config.omega_b(), config.unit_system);
    return r;
}

}  // namespace sideband
