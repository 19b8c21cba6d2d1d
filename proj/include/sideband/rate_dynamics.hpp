#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <thread>
#include <vector>

#include "sideband/model.hpp"
#include "sideband/ode.hpp"

namespace sideband {

using complexd = std::complex<double>;

// Closed second-moment state of the beam-splitter model:
// <n_a>, <n_b> and the cross coherence Sigma = <a^dag b>.
struct MomentState {
    double n_a = 0.0;
    double n_b = 0.0;
    complexd sigma = 0.0;

    // Cauchy-Schwarz with bosonic ordering slack.
    bool is_physical(double tol = 1e-8) const {
        if (n_a < -1e-12 || n_b < -1e-12) return false;
        return std::norm(sigma) <= n_a * n_b + std::min(n_a, n_b) + 1.0 + tol;
    }
};

struct RateCoefficients {
    complexd gamma_a;  // gamma_a/2 + i*Delta
    complexd gamma_b;  // gamma_b/2 + i*omega_b
    complexd zeta;     // (gamma_a+gamma_b)/2 + i*(omega_b - Delta)

    static RateCoefficients from_config(const SystemConfig& c) {
        RateCoefficients r;
        r.gamma_a = {c.mode_a.decay_rate / 2.0, c.detuning()};
        r.gamma_b = {c.mode_b.decay_rate / 2.0, c.omega_b()};
        r.zeta = std::conj(r.gamma_a) + r.gamma_b;
        return r;
    }
};

struct Trajectory {
    std::vector<double> times;
    std::vector<MomentState> states;
};

namespace detail {

inline void require_beam_splitter(const SystemConfig& config, const char* op) {
    if (config.coupling.type != CouplingType::BeamSplitter)
        throw UnsupportedModelError(std::string(op) +
                                    ": moment equations close only for beam-splitter coupling; "
                                    "use the Lindblad solver for full/generalized models");
}

// Real 4-vector layout: (n_a, n_b, Re Sigma, Im Sigma).
inline Eigen::Vector4d pack(const MomentState& s) {
    return {s.n_a, s.n_b, s.sigma.real(), s.sigma.imag()};
}

inline MomentState unpack(const Eigen::Vector4d& x) {
    return {x[0], x[1], {x[2], x[3]}};
}

// dx/dt = A x + c. The coherent exchange enters the two populations with
// opposite signs (quanta flow from b to a), which is the combination that
// reproduces the closed-form cooling efficiency.
inline void linear_system(const SystemConfig& config, Eigen::Matrix4d& A, Eigen::Vector4d& c) {
    const double ga = config.mode_a.decay_rate;
    const double gb = config.mode_b.decay_rate;
    const double omega = config.drive.amplitude;
    const auto rc = RateCoefficients::from_config(config);
    const double zr = rc.zeta.real();
    const double zi = rc.zeta.imag();
    A.setZero();
    A(0, 0) = -ga;
    A(0, 3) = 2.0 * omega;
    A(1, 1) = -gb;
    A(1, 3) = -2.0 * omega;
    A(2, 2) = -zr;
    A(2, 3) = zi;
    A(3, 0) = -omega;
    A(3, 1) = omega;
    A(3, 2) = -zi;
    A(3, 3) = -zr;
    c = {ga * config.mode_a.bath_occupation, gb * config.mode_b.bath_occupation, 0.0, 0.0};
}

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

}  // namespace detail

inline MomentState moment_derivatives(const MomentState& state, const SystemConfig& config) {
    detail::require_beam_splitter(config, "moment_derivatives");
    Eigen::Matrix4d A;
    Eigen::Vector4d c;
    detail::linear_system(config, A, c);
    return detail::unpack(A * detail::pack(state) + c);
}

inline MomentState steady_moments(const SystemConfig& config) {
    detail::require_beam_splitter(config, "steady_moments");
    const double ga = config.mode_a.decay_rate;
    const double gb = config.mode_b.decay_rate;
    if (ga + gb <= 0.0)
        throw DegenerateConfigError("steady_moments: both decay rates are zero");
    Eigen::Matrix4d A;
    Eigen::Vector4d c;
    detail::linear_system(config, A, c);
    Eigen::FullPivLU<Eigen::Matrix4d> lu(A);
    if (!lu.isInvertible())
        throw DegenerateConfigError("steady_moments: singular rate-equation system");
    return detail::unpack(lu.solve(-c));
}

inline Trajectory evolve_moments(const MomentState& initial, const SystemConfig& config,
                                 double t_final, double rel_tol = 1e-8) {
    detail::require_beam_splitter(config, "evolve_moments");
    if (!(t_final > 0.0)) throw PreconditionError("evolve_moments: t_final must be > 0");
    if (!(rel_tol > 1e-14 && rel_tol < 1e-2))
        throw PreconditionError("evolve_moments: rel_tol outside (1e-14, 1e-2)");
    Eigen::Matrix4d A;
    Eigen::Vector4d c;
    detail::linear_system(config, A, c);
    Trajectory traj;
    auto rhs = [&](double, const Eigen::Vector4d& x) -> Eigen::Vector4d { return A * x + c; };
    ode::integrate_adaptive(rhs, detail::pack(initial), 0.0, t_final, rel_tol,
                            [&](double t, const Eigen::Vector4d& x) {
                                traj.times.push_back(t);
                                traj.states.push_back(detail::unpack(x));
                            });
    return traj;
}

// Exact solution of the linear moment system via the matrix exponential.
// Used as the integrator's independent oracle.
inline MomentState evolve_moments_exact(const MomentState& initial, const SystemConfig& config,
                                        double t) {
    detail::require_beam_splitter(config, "evolve_moments_exact");
    Eigen::Matrix4d A;
    Eigen::Vector4d c;
    detail::linear_system(config, A, c);
    // x(t) = e^{At} x0 + \int_0^t e^{A s} c ds, evaluated through the 5x5
    // augmented exponential so no invertibility of A is needed.
    Eigen::Matrix<double, 5, 5> M = Eigen::Matrix<double, 5, 5>::Zero();
    M.topLeftCorner<4, 4>() = A;
    M.topRightCorner<4, 1>() = c;
    const Eigen::Matrix<double, 5, 5> E = (M * t).exp();
    Eigen::Matrix<double, 5, 1> x0;
    x0 << detail::pack(initial), 1.0;
    return detail::unpack((E * x0).head<4>());
}

struct LangevinEstimate {
    MomentState mean;
    double se_n_a = 0.0;
    double se_n_b = 0.0;
    double se_sigma = 0.0;  // std error of |sigma| components (max of re/im)
    int n_traj = 0;
};

// Fixed-step sampling of the c-number Langevin system
//   dC = (-Gamma_C C + i Omega C') dt + dW_C,   <dW_C* dW_C> = gamma_C nbar_C dt.
// The deterministic substep uses the exact 2x2 propagator exp(A dt) instead
// of the plain Euler-Maruyama increment (I + A dt): for Omega >> gamma the
// drift eigenvalues rotate at ~Omega and the explicit update is anti-damped
// (|1 + lambda dt| > 1) at every dt the precondition admits. The Gaussian
// increment is propagated a half step, which makes the stationary covariance
// exact to O(dt^2). Normal-ordered noise: sample averages of |a|^2, |b|^2,
// a* b estimate <a^dag a>, <b^dag b>, <a^dag b> directly. Deterministic given
// seed; trajectory streams are derived from (seed, index) and reduced in
// index order, so the result is independent of thread count.
inline LangevinEstimate langevin_sample(const SystemConfig& config, int n_traj, uint64_t seed,
                                        double t_final, double dt, int n_threads = 1) {
    detail::require_beam_splitter(config, "langevin_sample");
    if (n_traj < 100) throw PreconditionError("langevin_sample: n_traj must be >= 100");
    const auto rc = RateCoefficients::from_config(config);
    const double fastest =
        std::max({std::abs(rc.gamma_a), std::abs(rc.gamma_b), config.drive.amplitude});
    if (!(dt > 0.0) || dt * fastest >= 0.1)
        throw StepSizeError("langevin_sample: dt * max(|Gamma|, Omega) must be < 0.1");

    const double omega = config.drive.amplitude;
    const long n_steps = static_cast<long>(std::ceil(t_final / dt));
    const double noise_a = std::sqrt(config.mode_a.decay_rate * config.mode_a.bath_occupation * dt / 2.0);
    const double noise_b = std::sqrt(config.mode_b.decay_rate * config.mode_b.bath_occupation * dt / 2.0);

    Eigen::Matrix2cd drift;
    drift << -rc.gamma_a, complexd(0, omega), complexd(0, omega), -rc.gamma_b;
    const Eigen::Matrix2cd prop = (drift * dt).exp();
    Eigen::Matrix2cd noise_prop = (drift * (0.5 * dt)).exp();
    noise_prop.col(0) *= noise_a;
    noise_prop.col(1) *= noise_b;

    std::vector<double> na(n_traj), nb(n_traj);
    std::vector<complexd> ab(n_traj);
    auto worker = [&](int begin, int end) {
        for (int k = begin; k < end; ++k) {
            std::mt19937_64 rng(detail::splitmix64(seed ^ detail::splitmix64(uint64_t(k) + 1)));
            std::normal_distribution<double> gauss(0.0, 1.0);
            Eigen::Vector2cd v = Eigen::Vector2cd::Zero();
            for (long s = 0; s < n_steps; ++s) {
                const Eigen::Vector2cd xi(complexd(gauss(rng), gauss(rng)),
                                          complexd(gauss(rng), gauss(rng)));
                v = prop * v + noise_prop * xi;
            }
            na[k] = std::norm(v[0]);
            nb[k] = std::norm(v[1]);
            ab[k] = std::conj(v[0]) * v[1];
        }
    };
    if (n_threads <= 1) {
        worker(0, n_traj);
    } else {
        std::vector<std::thread> pool;
        const int chunk = (n_traj + n_threads - 1) / n_threads;
        for (int t = 0; t < n_threads; ++t) {
            const int begin = t * chunk;
            const int end = std::min(n_traj, begin + chunk);
            if (begin < end) pool.emplace_back(worker, begin, end);
        }
        for (auto& th : pool) th.join();
    }

    LangevinEstimate est;
    est.n_traj = n_traj;
    double sa = 0, sb = 0, sa2 = 0, sb2 = 0;
    complexd ss = 0;
    double sre2 = 0, sim2 = 0;
    for (int k = 0; k < n_traj; ++k) {
        sa += na[k];
        sb += nb[k];
        sa2 += na[k] * na[k];
        sb2 += nb[k] * nb[k];
        ss += ab[k];
        sre2 += ab[k].real() * ab[k].real();
        sim2 += ab[k].imag() * ab[k].imag();
    }
    const double n = n_traj;
    est.mean = {sa / n, sb / n, ss / n};
    auto se = [&](double sum, double sumsq) {
        const double var = std::max(0.0, (sumsq - sum * sum / n) / (n - 1.0));
        return std::sqrt(var / n);
    };
    est.se_n_a = se(sa, sa2);
    est.se_n_b = se(sb, sb2);
    est.se_sigma = std::max(se(ss.real(), sre2), se(ss.imag(), sim2));
    return est;
}

}  // namespace sideband
