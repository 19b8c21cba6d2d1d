#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "sideband/errors.hpp"
#include "sideband/fspec.hpp"

namespace sideband {

// Mean-field energy of the driven generalized model at real displacements,
//   E(a, b) = Delta0 a^2 + omega_b b^2 + 2 g' b F(a, a) + 2 f a.
// Its stationary points are the equilibrium displacements.
inline double mean_field_energy(const FSpec& spec, double g_prime, double f_drive, double delta0,
                                double omega_b, double alpha, double beta) {
    const double f_val = eval_f(spec, alpha, alpha).value.real();
    return delta0 * alpha * alpha + omega_b * beta * beta + 2.0 * g_prime * beta * f_val +
           2.0 * f_drive * alpha;
}

struct EquilibriumRoot {
    double alpha = 0.0;
    double beta = 0.0;
    double residual = 0.0;
};

struct EquilibriumResult {
    double alpha = 0.0;
    double beta = 0.0;
    double residual = 0.0;
    std::vector<EquilibriumRoot> all_roots;  // every bracketed real root
    bool multistable() const { return all_roots.size() > 1; }
};

namespace detail_lin {

inline double beta_of_alpha(const FSpec& spec, double g_prime, double omega_b, double alpha) {
    return -g_prime * eval_f(spec, alpha, alpha).value.real() / omega_b;
}

// Reduced scalar stationarity condition in alpha (beta eliminated).
inline double alpha_equation(const FSpec& spec, double g_prime, double f_drive, double delta0,
                             double omega_b, double alpha) {
    const double beta = beta_of_alpha(spec, g_prime, omega_b, alpha);
    const double dfa = eval_f(spec, alpha, alpha).d_x.real();
    return delta0 * alpha + f_drive + 2.0 * g_prime * beta * dfa;
}

inline double stationarity_residual(const FSpec& spec, double g_prime, double f_drive,
                                    double delta0, double omega_b, double alpha, double beta) {
    const auto fv = eval_f(spec, alpha, alpha);
    const double r_alpha = delta0 * alpha + f_drive + 2.0 * g_prime * beta * fv.d_x.real();
    const double r_beta = omega_b * beta + g_prime * fv.value.real();
    return std::max(std::abs(r_alpha), std::abs(r_beta));
}

}  // namespace detail_lin

// Solves beta = -g' F(alpha, alpha) / omega_b together with
// alpha = -(f + 2 beta g' dF/dalpha) / Delta0 by damped fixed-point
// iteration, with derivative-free bracketing on the reduced real equation as
// fallback and as the multistability scan. The default root is the one
// closest to the g' = 0 solution alpha = -f/Delta0.
inline EquilibriumResult equilibrium_displacements(const FSpec& spec, double g_prime,
                                                   double f_drive, double delta0, double omega_b,
                                                   double tol = 1e-12) {
    if (delta0 == 0.0) throw DomainError("equilibrium_displacements: delta0 must be nonzero");
    if (!(omega_b > 0.0)) throw DomainError("equilibrium_displacements: omega_b must be > 0");
    if (!spec.is_hermitian())
        throw DomainError("equilibrium_displacements: f_spec must be Hermitian-symmetric");

    auto eq = [&](double a) {
        return detail_lin::alpha_equation(spec, g_prime, f_drive, delta0, omega_b, a);
    };
    auto make_root = [&](double a) {
        EquilibriumRoot r;
        r.alpha = a;
        r.beta = detail_lin::beta_of_alpha(spec, g_prime, omega_b, a);
        r.residual =
            detail_lin::stationarity_residual(spec, g_prime, f_drive, delta0, omega_b, r.alpha, r.beta);
        return r;
    };

    const double alpha0 = -f_drive / delta0;

    // Damped fixed-point iteration from the decoupled solution.
    double alpha = alpha0;
    const double damping = 0.5;
    bool converged = false;
    for (int it = 0; it < 500; ++it) {
        const double beta = detail_lin::beta_of_alpha(spec, g_prime, omega_b, alpha);
        const double dfa = eval_f(spec, alpha, alpha).d_x.real();
        const double next = -(f_drive + 2.0 * beta * g_prime * dfa) / delta0;
        if (!std::isfinite(next)) break;
        const double alpha_new = (1.0 - damping) * alpha + damping * next;
        if (std::abs(alpha_new - alpha) < tol * std::max(1.0, std::abs(alpha_new))) {
            alpha = alpha_new;
            converged = true;
            break;
        }
        alpha = alpha_new;
    }

    // Bracket scan over the reduced scalar equation; catches every real root
    // within the search window (multistability at large g').
    std::vector<EquilibriumRoot> roots;
    const double radius = 10.0 * std::max({1.0, std::abs(alpha0), std::abs(alpha)});
    const int n_scan = 4000;
    double prev_a = -radius;
    double prev_v = eq(prev_a);
    for (int i = 1; i <= n_scan; ++i) {
        const double a = -radius + 2.0 * radius * i / n_scan;
        const double v = eq(a);
        if (prev_v == 0.0) {
            roots.push_back(make_root(prev_a));
        } else if (v != 0.0 && std::signbit(prev_v) != std::signbit(v)) {
            double lo = prev_a, hi = a, flo = prev_v;
            for (int b = 0; b < 200; ++b) {
                const double mid = 0.5 * (lo + hi);
                const double fm = eq(mid);
                if (fm == 0.0) {
                    lo = hi = mid;
                    break;
                }
                if (std::signbit(fm) == std::signbit(flo)) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            roots.push_back(make_root(0.5 * (lo + hi)));
        }
        prev_a = a;
        prev_v = v;
    }
    if (converged) {
        const double a_fp = alpha;
        const bool seen = std::any_of(roots.begin(), roots.end(), [&](const EquilibriumRoot& r) {
            return std::abs(r.alpha - a_fp) < 1e-6 * std::max(1.0, std::abs(a_fp));
        });
        if (!seen) roots.push_back(make_root(a_fp));
    }
    if (roots.empty())
        throw ConvergenceError("equilibrium_displacements: no real equilibrium found in bracket");

    std::sort(roots.begin(), roots.end(),
              [](const EquilibriumRoot& x, const EquilibriumRoot& y) { return x.alpha < y.alpha; });
    const auto best = std::min_element(roots.begin(), roots.end(),
                                       [&](const EquilibriumRoot& x, const EquilibriumRoot& y) {
                                           return std::abs(x.alpha - alpha0) < std::abs(y.alpha - alpha0);
                                       });
    EquilibriumResult out;
    out.alpha = best->alpha;
    out.beta = best->beta;
    out.residual = best->residual;
    out.all_roots = std::move(roots);
    return out;
}

struct LinearizedModel {
    double alpha = 0.0;
    double beta = 0.0;
    double delta_eff = 0.0;
    double g_eff = 0.0;
    double residual = 0.0;
};

// Delta = Delta0 + 2 beta g' d2F/dxdy|_(alpha,alpha),  g = g' dF/dx|_(alpha,alpha).
// The g' factors are explicit here; the displacement formulas absorb g' into
// F otherwise, and the quadratic-expansion residual below is the arbiter.
inline LinearizedModel linearized_params(const FSpec& spec, double g_prime, double alpha,
                                         double beta, double delta0) {
    const auto fv = eval_f(spec, alpha, alpha);
    LinearizedModel m;
    m.alpha = alpha;
    m.beta = beta;
    m.delta_eff = delta0 + 2.0 * beta * g_prime * fv.d_xy.real();
    m.g_eff = g_prime * fv.d_x.real();
    return m;
}

struct ExpansionResidual {
    double linear = 0.0;     // max |gradient| of E at (alpha, beta); zero at equilibrium
    double quadratic = 0.0;  // max |numerical Hessian - (delta_eff, g_eff, omega_b) form|
};

// Finite-difference expansion of the mean-field energy around (alpha, beta),
// Richardson-refined; independent of the analytic formulas above.
inline ExpansionResidual expansion_residual(const FSpec& spec, double g_prime, double f_drive,
                                            double delta0, double omega_b, double alpha,
                                            double beta) {
    auto E = [&](double a, double b) {
        return mean_field_energy(spec, g_prime, f_drive, delta0, omega_b, a, b);
    };
    const double h0 = 1e-3 * std::max(1.0, std::max(std::abs(alpha), std::abs(beta)));

    auto grad = [&](double h, int i) {
        return i == 0 ? (E(alpha + h, beta) - E(alpha - h, beta)) / (2 * h)
                      : (E(alpha, beta + h) - E(alpha, beta - h)) / (2 * h);
    };
    auto hess = [&](double h, int i, int j) {
        if (i == 0 && j == 0)
            return (E(alpha + h, beta) - 2 * E(alpha, beta) + E(alpha - h, beta)) / (h * h);
        if (i == 1 && j == 1)
            return (E(alpha, beta + h) - 2 * E(alpha, beta) + E(alpha, beta - h)) / (h * h);
        return (E(alpha + h, beta + h) - E(alpha + h, beta - h) - E(alpha - h, beta + h) +
                E(alpha - h, beta - h)) /
               (4 * h * h);
    };
    // Richardson: r(h), r(h/2) -> (4 r(h/2) - r(h)) / 3, O(h^4).
    auto refine = [&](auto&& fn) { return (4.0 * fn(h0 / 2) - fn(h0)) / 3.0; };

    ExpansionResidual out;
    out.linear = std::max(std::abs(refine([&](double h) { return grad(h, 0); })),
                          std::abs(refine([&](double h) { return grad(h, 1); })));

    const auto lin = linearized_params(spec, g_prime, alpha, beta, delta0);
    const double h_aa = refine([&](double h) { return hess(h, 0, 0); });
    const double h_bb = refine([&](double h) { return hess(h, 1, 1); });
    const double h_ab = refine([&](double h) { return hess(h, 0, 1); });
    out.quadratic = std::max({std::abs(h_aa - 2.0 * lin.delta_eff),
                              std::abs(h_bb - 2.0 * omega_b),
                              std::abs(h_ab - 4.0 * lin.g_eff)});
    return out;
}

// Full pipeline: equilibrium, effective parameters, and the residual of the
// second-order expansion, ready to feed the full-coupling solver.
inline LinearizedModel linearize(const FSpec& spec, double g_prime, double f_drive, double delta0,
                                 double omega_b, double tol = 1e-12) {
    const auto eq = equilibrium_displacements(spec, g_prime, f_drive, delta0, omega_b, tol);
    auto m = linearized_params(spec, g_prime, eq.alpha, eq.beta, delta0);
    m.residual = eq.residual;
    return m;
}

}  // namespace sideband
