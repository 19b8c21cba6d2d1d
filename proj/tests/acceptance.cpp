// Acceptance gate: one line per criterion, exit code = number of failures.
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include <sideband/sideband.hpp>

using namespace sideband;

namespace {

int g_failures = 0;

void report(int n, bool ok, const std::string& what) {
    std::printf("%s C%d: %s\n", ok ? "PASS" : "FAIL", n, what.c_str());
    if (!ok) ++g_failures;
}

SystemConfig bs(double delta, double omega_b, double ga, double gb, double na, double nb,
                double omega) {
    return SystemConfig::scaled(delta, omega_b, ga, gb, na, nb, omega);
}

SystemConfig full(double delta, double omega_b, double ga, double gb, double na, double nb,
                  double g) {
    return SystemConfig::scaled(delta, omega_b, ga, gb, na, nb, g, CouplingKind::full());
}

std::vector<double> log_grid(double lo, double hi, int n) {
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i)
        g[i] = std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * i / (n - 1));
    return g;
}

struct Physicality {
    double trace_dev = 0.0;
    double herm_dev = 0.0;
    double min_eig = 0.0;
};

Physicality physicality(const SteadySolution& sol) {
    Physicality p;
    p.trace_dev = std::abs(sol.rho.rho.trace().real() - 1.0) + std::abs(sol.rho.rho.trace().imag());
    p.herm_dev = (sol.rho.rho - sol.rho.rho.adjoint()).cwiseAbs().maxCoeff();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(sol.rho.rho);
    p.min_eig = es.eigenvalues().minCoeff();
    return p;
}

std::vector<Physicality> g_lindblad_solutions;

void record(const SteadySolution& sol) { g_lindblad_solutions.push_back(physicality(sol)); }

// --- C1: closed form vs rate-equation steady state across a parameter grid ---
void criterion1() {
    const auto gbs = log_grid(1e-4, 1.0, 5);
    const auto oms = log_grid(0.1, 100.0, 5);
    const auto nbs = log_grid(0.1, 1e4, 5);
    double worst = 0.0;
    int checked = 0;
    for (double gb : gbs)
        for (double om : oms)
            for (int k = 0; k < 5; ++k)
                for (double nb : nbs) {
                    const double dd = -10.0 + 5.0 * k;  // Delta - omega_b
                    const auto c = bs(1.0 + dd, 1.0, 1.0, gb, 0.0, nb, om);
                    const double xi = cooling_efficiency_xi(c);
                    if (!(xi >= 0.0 && xi < 1.0)) {
                        report(1, false, "xi outside [0, 1)");
                        return;
                    }
                    const double cf = steady_population(c).first;
                    const double rate = steady_moments(c).n_b;
                    worst = std::max(worst, std::abs(cf - rate) / std::max(rate, 1e-300));
                    ++checked;
                }
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "closed form vs rate steady n_b on %d-point grid, max rel err %.2e < 1e-10",
                  checked, worst);
    report(1, worst < 1e-10, buf);
}

// --- C2: resonant strong-drive limit ---
void criterion2() {
    const auto c = bs(1.0, 1.0, 1.0, 0.01, 0.0, 100.0, 100.0);
    const double limit = resonant_strong_drive_population(c);  // 1/1.01
    const double cf = steady_population(c).first;
    const double rate = steady_moments(c).n_b;
    const bool ok = std::abs(limit - 100.0 / 101.0) < 1e-12 && std::abs(cf - limit) < 1e-3 &&
                    std::abs(rate - limit) < 1e-3;
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "strong-drive limit 0.990099: closed form %.6f, rate %.6f (both within 1e-3)",
                  cf, rate);
    report(2, ok, buf);
}

// --- C3: Lindblad oracle vs closed form at a cooled reference point ---
void criterion3() {
    const auto c = bs(5.0, 5.0, 1.0, 0.05, 0.0, 1.0, 3.0);
    const FockDims dims = truncation_check(c, FockDims{4, 4}, 1e-3);
    const auto sol = steady_density(c, dims);
    record(sol);
    const double cf = steady_population(c).first;
    const double rel = std::abs(sol.n_b - cf) / cf;
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "Lindblad n_b %.5f vs closed form %.5f at dims (%d,%d), rel diff %.2e < 1e-2",
                  sol.n_b, cf, dims.dim_a, dims.dim_b, rel);
    report(3, rel < 1e-2 && sol.truncation_ok, buf);
}

// --- C4: full-coupling detuning sweep finds the sideband-cooling optimum ---
void criterion4() {
    const auto c = full(1.0, 1.0, 0.2, 1e-4, 0.0, 0.5, 0.02);
    SweepSpec spec;
    spec.parameter = SweepParameter::Delta;
    spec.start = 0.5;
    spec.stop = 1.5;
    spec.points = 41;
    spec.engines = {Engine::Lindblad};
    const auto r = run_sweep(c, spec);
    double best = 1e300, best_param = 0.0;
    for (const auto& row : r.rows) {
        if (!row.lb_n_b) {
            report(4, false, "sweep point failed: " + row.reason);
            return;
        }
        if (*row.lb_n_b < best) {
            best = *row.lb_n_b;
            best_param = row.param;
        }
    }
    const double opt = sideband_cooling_limit(c).optimal_detuning;  // sqrt(1 + 0.04)
    const double pred = sideband_cooling_limit(c).limit;            // ga^2 / (4 wb^2) = 0.01
    const bool ok = r.failed_rows == 0 && std::abs(best - pred) < 0.3 * pred &&
                    std::abs(best_param - opt) <= 2.0 * 0.025 + 1e-12;
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "sweep min n_b %.4f (limit %.4f, within 30%%) at Delta %.4f (optimum %.4f, "
                  "within 2 grid steps)",
                  best, pred, best_param, opt);
    report(4, ok, buf);
}

// --- C5: near-ground-state cooling, rate and Lindblad agree ---
void criterion5() {
    const auto c = bs(1.0, 1.0, 1.0, 5e-4, 1e-4, 0.5, 2.0);
    const double rate = steady_moments(c).n_b;
    const FockDims dims = truncation_check(c, FockDims{4, 4}, 1e-3);
    const auto sol = steady_density(c, dims);
    record(sol);
    const bool ok = rate < 2e-3 && sol.n_b < 2e-3;
    char buf[160];
    std::snprintf(buf, sizeof buf, "ground-state cooling: rate n_b %.2e, Lindblad n_b %.2e < 2e-3",
                  rate, sol.n_b);
    report(5, ok, buf);
}

// --- C6: red/blue sideband asymmetry (full coupling) and no heating (beam splitter) ---
void criterion6() {
    const FockDims dims{4, 14};
    auto solve = [&](double delta) {
        const auto sol = steady_density(full(delta, 1.0, 1.0, 0.1, 0.0, 0.5, 0.1), dims);
        record(sol);
        return sol.n_b;
    };
    const double cooled = solve(1.0);   // drive on the red sideband
    const double center = solve(1e-9);  // Delta ~ 0 (exactly 0 has omega_d = omega_a)
    const double heated = solve(-1.0);  // blue sideband
    // Red drive cools below the bath; the carrier (Delta ~ 0) already heats
    // through the counter-rotating terms; the blue sideband heats strongly.
    const bool full_ok = cooled < center && center < heated && cooled < 0.45 && center > 0.5 &&
                         center < 1.0 && heated > 0.7;

    const auto bs_sol = steady_density(bs(-1.0, 1.0, 1.0, 0.1, 0.0, 0.5, 0.1), FockDims{4, 8});
    record(bs_sol);
    const bool bs_ok = bs_sol.n_b <= 0.5 + 1e-6;
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "full coupling n_b %.3f < %.3f < %.3f across Delta = {+1, 0, -1}; beam-splitter "
                  "blue drive stays at %.4f <= bath 0.5",
                  cooled, center, heated, bs_sol.n_b);
    report(6, full_ok && bs_ok, buf);
}

// --- C7: atomic-ensemble bosonization checks ---
void criterion7() {
    std::vector<double> t(41);
    for (int i = 0; i < 41; ++i) t[i] = 20.0 * i / 40.0;

    double worst_single = 0.0, worst_comm = 0.0;
    for (int n = 1; n <= 6; ++n) {
        const auto cmp = compare_dynamics({n, 1.0, 1.0, 0.5}, 0, 1, t);
        worst_single = std::max(worst_single, cmp.max_deviation);
        const auto ops = collective_operators(n);
        Eigen::VectorXcd vac = Eigen::VectorXcd::Zero(atomic::pow3(n));
        vac[0] = 1.0;
        const Eigen::MatrixXcd comm =
            ops.op_b * ops.op_b.adjoint() - ops.op_b.adjoint() * ops.op_b;
        worst_comm = std::max(worst_comm, std::abs((vac.adjoint() * comm * vac)(0).real() - 1.0));
    }

    std::vector<double> two;
    for (int n : {3, 4, 5})
        two.push_back(compare_dynamics({n, 0.8, 1.0, 0.4}, 0, 2, t).max_deviation);
    const bool decreasing = two[0] > two[1] && two[1] > two[2] && two[0] > 1e-6;

    const bool ok = worst_single < 1e-10 && worst_comm < 1e-12 && decreasing;
    char buf[220];
    std::snprintf(buf, sizeof buf,
                  "N = 1..6: single-excitation deviation %.1e < 1e-10, vacuum commutator off by "
                  "%.1e < 1e-12; two-excitation deviation falls %.1e > %.1e > %.1e",
                  worst_single, worst_comm, two[0], two[1], two[2]);
    report(7, ok, buf);
}

// --- C8: mean-field linearization at the number-preset reference point ---
void criterion8() {
    const double gp = 0.01, f = 0.5, d0 = 1.0, wb = 0.1;
    const auto m = linearize(FSpec::number(), gp, f, d0, wb);

    // Independent fixed-point oracle.
    double a = -f / d0;
    for (int i = 0; i < 10000; ++i) {
        const double b = -gp * a * a / wb;
        a = -(f + 2.0 * b * gp * a) / d0;
    }
    const double b = -gp * a * a / wb;

    const auto res = expansion_residual(FSpec::number(), gp, f, d0, wb, m.alpha, m.beta);
    const bool ok = std::abs(m.alpha - a) < 1e-10 && std::abs(m.beta - b) < 1e-10 &&
                    std::abs(m.alpha - (-0.50025)) < 1e-5 &&
                    std::abs(m.beta - (-0.025025)) < 1e-5 &&
                    std::abs(m.delta_eff - 0.99950) < 1e-5 &&
                    std::abs(m.g_eff - (-0.0050025)) < 1e-6 && res.linear < 1e-8 &&
                    res.quadratic < 1e-6;
    char buf[220];
    std::snprintf(buf, sizeof buf,
                  "alpha %.6f, beta %.6f, delta_eff %.5f, g_eff %.7f match the oracle to 1e-10; "
                  "expansion residuals %.1e / %.1e",
                  m.alpha, m.beta, m.delta_eff, m.g_eff, res.linear, res.quadratic);
    report(8, ok, buf);
}

// --- C9: Langevin sampling converges on the rate steady state ---
void criterion9() {
    const auto c = bs(1.0, 1.0, 1.0, 1.0, 0.5, 2.0, 100.0);
    const double target = steady_moments(c).n_b;
    const double t_final = 16.0, dt = 8e-4;
    const uint64_t seed = 12345;

    std::vector<double> lns, lnse;
    LangevinEstimate last;
    for (int n : {100, 1000, 10000}) {
        last = langevin_sample(c, n, seed, t_final, dt);
        lns.push_back(std::log(double(n)));
        lnse.push_back(std::log(last.se_n_b));
    }
    const bool agree = std::abs(last.mean.n_b - target) <= 3.0 * last.se_n_b;

    double mx = 0, my = 0;
    for (size_t i = 0; i < 3; ++i) {
        mx += lns[i] / 3.0;
        my += lnse[i] / 3.0;
    }
    double num = 0, den = 0;
    for (size_t i = 0; i < 3; ++i) {
        num += (lns[i] - mx) * (lnse[i] - my);
        den += (lns[i] - mx) * (lns[i] - mx);
    }
    const double slope = num / den;
    const bool scaling = slope > -0.6 && slope < -0.4;
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "10000-trajectory n_b %.4f vs rate %.4f (|diff| %.4f <= 3 s.e. = %.4f); "
                  "s.e. scaling exponent %.3f in (-0.6, -0.4)",
                  last.mean.n_b, target, std::abs(last.mean.n_b - target), 3.0 * last.se_n_b,
                  slope);
    report(9, agree && scaling, buf);
}

// --- C10: physicality of every Lindblad solution + bitwise-reproducible sweeps ---
void criterion10() {
    double worst_trace = 0.0, worst_herm = 0.0, worst_eig = 0.0;
    for (const auto& p : g_lindblad_solutions) {
        worst_trace = std::max(worst_trace, p.trace_dev);
        worst_herm = std::max(worst_herm, p.herm_dev);
        worst_eig = std::min(worst_eig, p.min_eig);
    }
    const bool physical = !g_lindblad_solutions.empty() && worst_trace < 1e-10 &&
                          worst_herm < 1e-10 && worst_eig >= -1e-8;

    const auto c = bs(1.0, 1.0, 1.0, 0.2, 0.1, 0.5, 0.8);
    SweepSpec spec;
    spec.parameter = SweepParameter::Delta;
    spec.start = 0.5;
    spec.stop = 1.5;
    spec.points = 3;
    spec.engines = {Engine::ClosedForm, Engine::Rate, Engine::Lindblad, Engine::Langevin};
    auto render = [&](int threads) {
        RunOptions opt;
        opt.seed = 99;
        opt.threads = threads;
        std::ostringstream os;
        write_csv(os, run_sweep(c, spec, opt, 0xabcdefull));
        return os.str();
    };
    const std::string one = render(1);
    const bool deterministic = one == render(1) && one == render(3);

    char buf[220];
    std::snprintf(buf, sizeof buf,
                  "%zu Lindblad solutions: trace dev %.1e, herm dev %.1e < 1e-10, min eig %.1e >= "
                  "-1e-8; sweep CSV byte-identical across reruns and thread counts",
                  g_lindblad_solutions.size(), worst_trace, worst_herm, worst_eig);
    report(10, physical && deterministic, buf);
}

}  // namespace

int main() {
    struct Item {
        int n;
        void (*fn)();
    };
    const Item items[] = {{1, criterion1}, {2, criterion2}, {3, criterion3}, {4, criterion4},
                          {5, criterion5}, {6, criterion6}, {7, criterion7}, {8, criterion8},
                          {9, criterion9}, {10, criterion10}};
    for (const auto& it : items) {
        try {
            it.fn();
        } catch (const std::exception& e) {
            report(it.n, false, std::string("unexpected exception: ") + e.what());
        }
    }
    return g_failures;
}
