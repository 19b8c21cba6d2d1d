#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "sideband/constants.hpp"
#include "sideband/errors.hpp"
#include "sideband/fspec.hpp"

namespace sideband {

enum class UnitSystem { Scaled, SI };

// One harmonic mode coupled to its own thermal bath.
struct ModeParams {
    double frequency = 1.0;       // rad/s in SI mode, arbitrary rate unit when scaled
    double decay_rate = 0.0;      // same units
    double bath_occupation = 0.0; // mean thermal quantum number

    void validate(const std::string& name) const {
        if (!(frequency > 0.0)) throw DomainError(name + ".frequency must be > 0");
        if (decay_rate < 0.0) throw DomainError(name + ".decay_rate must be >= 0");
        if (bath_occupation < 0.0) throw DomainError(name + ".bath_occupation must be >= 0");
    }
};

struct DriveParams {
    double amplitude = 0.0;        // Omega (beam-splitter) or g (full coupling)
    double drive_frequency = 0.0;  // omega_d

    void validate() const {
        if (amplitude < 0.0) throw DomainError("drive.amplitude must be >= 0 (phase is absorbed)");
    }
};

enum class CouplingType { BeamSplitter, Full, Generalized };

struct CouplingKind {
    CouplingType type = CouplingType::BeamSplitter;
    // Generalized only:
    FSpec f_spec;
    double f_drive = 0.0;
    double g_prime = 0.0;

    static CouplingKind beam_splitter() { return {CouplingType::BeamSplitter, {}, 0.0, 0.0}; }
    static CouplingKind full() { return {CouplingType::Full, {}, 0.0, 0.0}; }
    static CouplingKind generalized(FSpec spec, double f_drive, double g_prime) {
        return {CouplingType::Generalized, std::move(spec), f_drive, g_prime};
    }
};

// Bose-Einstein mean occupation at angular frequency omega (rad/s) and
// temperature T (kelvin).
inline double thermal_occupation(double omega, double temperature) {
    if (!(omega > 0.0)) throw DomainError("thermal_occupation: frequency must be > 0");
    if (!(temperature > 0.0)) throw DomainError("thermal_occupation: temperature must be > 0");
    return 1.0 / std::expm1(hbar * omega / (k_boltzmann * temperature));
}

// Same with hbar = k_B = 1 (scaled units).
inline double thermal_occupation_scaled(double omega, double temperature) {
    if (!(omega > 0.0)) throw DomainError("thermal_occupation: frequency must be > 0");
    if (!(temperature > 0.0)) throw DomainError("thermal_occupation: temperature must be > 0");
    return 1.0 / std::expm1(omega / temperature);
}

struct SystemConfig {
    ModeParams mode_a;
    ModeParams mode_b;
    DriveParams drive;
    CouplingKind coupling;
    UnitSystem unit_system = UnitSystem::Scaled;
    std::optional<double> temperature;  // kelvin; SI only

    double detuning() const { return mode_a.frequency - drive.drive_frequency; }
    double omega_b() const { return mode_b.frequency; }

    void validate() const {
        mode_a.validate("mode_a");
        mode_b.validate("mode_b");
        drive.validate();
        if (coupling.type == CouplingType::Generalized && !coupling.f_spec.is_hermitian())
            throw DomainError("coupling.f_spec must be Hermitian-symmetric");
        if (temperature) {
            if (unit_system != UnitSystem::SI)
                throw DomainError("temperature requires SI units");
            for (const auto* m : {&mode_a, &mode_b}) {
                const double want = thermal_occupation(m->frequency, *temperature);
                const double got = m->bath_occupation;
                if (std::abs(got - want) > 1e-12 * std::max(1.0, std::abs(want)))
                    throw DomainError("bath_occupation inconsistent with temperature");
            }
        }
    }

    // Convenience for scaled-unit work: specify the detuning directly. The
    // carrier frequencies only matter through Delta and the RWA check, so
    // omega_a is placed far above everything else.
    static SystemConfig scaled(double delta, double omega_b, double gamma_a, double gamma_b,
                               double n_bar_a, double n_bar_b, double amplitude,
                               CouplingKind coupling = CouplingKind::beam_splitter()) {
        SystemConfig c;
        const double omega_a = 1e4 * std::max({std::abs(delta), omega_b, amplitude, 1.0});
        c.mode_a = {omega_a, gamma_a, n_bar_a};
        c.mode_b = {omega_b, gamma_b, n_bar_b};
        c.drive = {amplitude, omega_a - delta};
        c.coupling = std::move(coupling);
        return c;
    }
};

struct Detunings {
    double delta;    // omega_a - omega_d
    double delta_c;  // anti-Stokes (cooling):  delta - omega_b
    double delta_h;  // Stokes (heating):       delta + omega_b
};

inline Detunings detunings(const SystemConfig& config) {
    const double d = config.detuning();
    return {d, d - config.omega_b(), d + config.omega_b()};
}

// RWA validity: {|omega_ab - omega_d|, |Omega|} << omega_ab + omega_d.
struct RwaReport {
    bool pass = true;
    double detuning_ratio = 0.0;  // |omega_ab - omega_d| / (omega_ab + omega_d)
    double coupling_ratio = 0.0;  // |Omega| / (omega_ab + omega_d)
    double threshold = 0.01;
    std::string message;
};

inline RwaReport validate_rwa(const SystemConfig& config, double strictness = 0.01) {
    RwaReport r;
    r.threshold = strictness;
    const double omega_ab = config.mode_a.frequency - config.mode_b.frequency;
    const double scale = omega_ab + config.drive.drive_frequency;
    if (scale <= 0.0) {
        r.pass = false;
        r.message = "omega_ab + omega_d not positive; rotating frame ill-defined";
        return r;
    }
    r.detuning_ratio = std::abs(omega_ab - config.drive.drive_frequency) / scale;
    r.coupling_ratio = std::abs(config.drive.amplitude) / scale;
    r.pass = r.detuning_ratio < strictness && r.coupling_ratio < strictness;
    if (!r.pass) {
        r.message = "RWA marginal: |omega_ab - omega_d|/(omega_ab + omega_d) = " +
                    std::to_string(r.detuning_ratio) + ", |Omega|/(omega_ab + omega_d) = " +
                    std::to_string(r.coupling_ratio) + " vs threshold " + std::to_string(strictness);
    }
    return r;
}

}  // namespace sideband
