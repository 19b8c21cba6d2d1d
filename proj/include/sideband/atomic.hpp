#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <vector>

#include "sideband/errors.hpp"
#include "sideband/lindblad.hpp"
#include "sideband/model.hpp"

namespace sideband {

// Exact simulation of N three-level atoms (levels g, a, b per atom) in the
// rotating frame, used to validate the bosonic two-mode reduction.
struct AtomicConfig {
    int n_atoms = 1;
    double delta = 0.0;    // omega_a - omega_d
    double omega_b = 1.0;
    double omega = 0.0;    // drive coupling Omega

    static constexpr int max_atoms = 6;  // 3^6 = 729 keeps matrices dense-friendly

    void validate() const {
        if (n_atoms < 1 || n_atoms > max_atoms)
            throw CapacityError("AtomicConfig: n_atoms must be in [1, " +
                                std::to_string(max_atoms) + "]");
    }
};

namespace atomic {

inline int pow3(int n) {
    int r = 1;
    for (int i = 0; i < n; ++i) r *= 3;
    return r;
}

// Single-atom |x><y| with levels ordered (g, a, b) = (0, 1, 2).
inline Eigen::MatrixXcd level_op(int x, int y) {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(3, 3);
    m(x, y) = 1.0;
    return m;
}

// Embed a single-atom operator at atom index i in the N-atom product space.
inline Eigen::MatrixXcd embed(const Eigen::MatrixXcd& op, int i, int n_atoms) {
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Identity(1, 1);
    for (int k = 0; k < n_atoms; ++k)
        out = fock::kron(out, k == i ? op : Eigen::MatrixXcd::Identity(3, 3));
    return out;
}

// Sum over atoms of a single-atom operator.
inline Eigen::MatrixXcd collective_sum(const Eigen::MatrixXcd& op, int n_atoms) {
    const int dim = pow3(n_atoms);
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim, dim);
    for (int i = 0; i < n_atoms; ++i) out += embed(op, i, n_atoms);
    return out;
}

}  // namespace atomic

struct CollectiveOps {
    Eigen::MatrixXcd op_a;  // sum_i sigma_ga / sqrt(N)
    Eigen::MatrixXcd op_b;  // sum_i sigma_gb / sqrt(N)
};

inline CollectiveOps collective_operators(int n_atoms) {
    AtomicConfig{n_atoms}.validate();
    const double root_n = std::sqrt(double(n_atoms));
    return {atomic::collective_sum(atomic::level_op(0, 1), n_atoms) / root_n,
            atomic::collective_sum(atomic::level_op(0, 2), n_atoms) / root_n};
}

// Rotating-frame ensemble Hamiltonian:
//   H = Delta sum_i sigma_aa + omega_b sum_i sigma_bb + Omega sum_i (sigma_ab + sigma_ba).
// Commutes with the total non-ground population.
inline Eigen::MatrixXcd build_atomic_hamiltonian(const AtomicConfig& cfg) {
    cfg.validate();
    const int n = cfg.n_atoms;
    return cfg.delta * atomic::collective_sum(atomic::level_op(1, 1), n) +
           cfg.omega_b * atomic::collective_sum(atomic::level_op(2, 2), n) +
           cfg.omega * atomic::collective_sum(atomic::level_op(1, 2) + atomic::level_op(2, 1), n);
}

// Symmetric Dicke-type state with m_a collective a-excitations and n_b
// b-excitations: normalized (a^dag)^m (b^dag)^n |vacuum>.
inline Eigen::VectorXcd symmetric_state(int n_atoms, int m_a, int n_b) {
    AtomicConfig{n_atoms}.validate();
    if (m_a < 0 || n_b < 0) throw DomainError("symmetric_state: negative excitation count");
    const auto ops = collective_operators(n_atoms);
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(atomic::pow3(n_atoms));
    psi[0] = 1.0;  // all-ground product state is index 0 (g = digit 0)
    for (int k = 0; k < m_a; ++k) psi = ops.op_a.adjoint() * psi;
    for (int k = 0; k < n_b; ++k) psi = ops.op_b.adjoint() * psi;
    const double norm = psi.norm();
    if (norm < 1e-12)
        throw PreconditionError("symmetric_state: over-excited (more excitations than atoms)");
    return psi / norm;
}

// max over C in {a, b} of ||([C, C^dag] - 1) |state>||. Vanishes exactly in
// the bosonic limit.
inline double bosonization_error(int n_atoms, const Eigen::VectorXcd& state) {
    AtomicConfig{n_atoms}.validate();
    if (std::abs(state.norm() - 1.0) > 1e-9)
        throw DomainError("bosonization_error: state must be normalized");
    const auto ops = collective_operators(n_atoms);
    auto deviation = [&](const Eigen::MatrixXcd& c) {
        const Eigen::MatrixXcd comm = c * c.adjoint() - c.adjoint() * c;
        return (comm * state - state).norm();
    };
    return std::max(deviation(ops.op_a), deviation(ops.op_b));
}

struct DynamicsComparison {
    std::vector<double> times;
    std::vector<double> n_b_atomic;
    std::vector<double> n_b_bosonic;
    double max_deviation = 0.0;
};

// Unitary evolution (exact eigendecomposition) of the atomic ensemble from a
// symmetric (m_a, n_b) state versus the bosonic two-mode model from
// |m_a>|n_b>, comparing <b^dag b>(t).
inline DynamicsComparison compare_dynamics(const AtomicConfig& cfg, int m_a, int n_b,
                                           const std::vector<double>& t_grid) {
    cfg.validate();
    if (m_a + n_b > 2) throw PreconditionError("compare_dynamics: at most two excitations");
    if (m_a + n_b > cfg.n_atoms)
        throw PreconditionError("compare_dynamics: more excitations than atoms");

    // Atomic side.
    const Eigen::MatrixXcd h_at = build_atomic_hamiltonian(cfg);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es_at(h_at);
    const Eigen::VectorXcd psi0_at = symmetric_state(cfg.n_atoms, m_a, n_b);
    const auto ops = collective_operators(cfg.n_atoms);
    const Eigen::MatrixXcd nb_at = ops.op_b.adjoint() * ops.op_b;
    const Eigen::VectorXcd coeff_at = es_at.eigenvectors().adjoint() * psi0_at;

    // Bosonic side: total excitation is conserved, so a Fock cut at
    // m_a + n_b + 1 per mode is exact.
    const int cut = m_a + n_b + 1;
    const FockDims dims{std::max(2, cut), std::max(2, cut)};
    SystemConfig bos = SystemConfig::scaled(cfg.delta, cfg.omega_b, 0.0, 0.0, 0.0, 0.0, cfg.omega);
    const Eigen::MatrixXcd h_bos = build_hamiltonian(bos, dims);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es_bos(h_bos);
    Eigen::VectorXcd psi0_bos = Eigen::VectorXcd::Zero(dims.total());
    psi0_bos[m_a * dims.dim_b + n_b] = 1.0;
    const ModeOps mode_ops(dims);
    const Eigen::MatrixXcd nb_bos = mode_ops.b.adjoint() * mode_ops.b;
    const Eigen::VectorXcd coeff_bos = es_bos.eigenvectors().adjoint() * psi0_bos;

    auto evolve = [](const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>& es,
                     const Eigen::VectorXcd& coeff, double t) -> Eigen::VectorXcd {
        const Eigen::ArrayXcd phase =
            (std::complex<double>(0, -1) * t * es.eigenvalues().array()).exp();
        return es.eigenvectors() * (phase * coeff.array()).matrix();
    };

    DynamicsComparison out;
    out.times = t_grid;
    for (double t : t_grid) {
        const Eigen::VectorXcd psi_at = evolve(es_at, coeff_at, t);
        const Eigen::VectorXcd psi_bos = evolve(es_bos, coeff_bos, t);
        const double v_at = (psi_at.adjoint() * nb_at * psi_at)(0).real();
        const double v_bos = (psi_bos.adjoint() * nb_bos * psi_bos)(0).real();
        out.n_b_atomic.push_back(v_at);
        out.n_b_bosonic.push_back(v_bos);
        out.max_deviation = std::max(out.max_deviation, std::abs(v_at - v_bos));
    }
    return out;
}

}  // namespace sideband
