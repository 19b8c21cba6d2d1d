#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "sideband/errors.hpp"

namespace sideband::ode {

// Dormand-Prince 5(4) embedded pair with PI step-size control. State is any
// Eigen-like vector type supporting +, scalar *, norm().
template <typename State>
struct StepResult {
    State y;
    double error = 0.0;  // scaled error estimate (<= 1 means accepted)
};

template <typename State, typename Rhs>
StepResult<State> dopri5_step(const Rhs& f, double t, const State& y, double h, double atol,
                              double rtol) {
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    const State k1 = f(t, y);
    const State k2 = f(t + 0.2 * h, State(y + h * (a21 * k1)));
    const State k3 = f(t + 0.3 * h, State(y + h * (a31 * k1 + a32 * k2)));
    const State k4 = f(t + 0.8 * h, State(y + h * (a41 * k1 + a42 * k2 + a43 * k3)));
    const State k5 = f(t + 8.0 / 9.0 * h, State(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4)));
    const State k6 = f(t + h, State(y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5)));
    StepResult<State> out;
    out.y = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const State k7 = f(t + h, out.y);
    const State err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    const double scale = atol + rtol * std::max(y.norm(), out.y.norm());
    out.error = err.norm() / scale;
    return out;
}

// Integrate to t_final; invokes observer(t, y) at every accepted step
// (including t = 0 and exactly at t_final).
template <typename State, typename Rhs, typename Observer>
State integrate_adaptive(const Rhs& f, State y, double t0, double t_final, double rtol,
                         Observer&& observer, double atol_factor = 1e-3) {
    if (!(t_final > t0)) throw PreconditionError("integrate_adaptive: t_final must exceed t0");
    const double atol = atol_factor * rtol;
    double t = t0;
    double h = (t_final - t0) * 1e-3;
    const double h_min = (t_final - t0) * 1e-14;
    observer(t, y);
    while (t < t_final) {
        h = std::min(h, t_final - t);
        auto step = dopri5_step(f, t, y, h, atol, rtol);
        if (step.error <= 1.0) {
            t += h;
            y = step.y;
            observer(t, y);
        }
        const double factor =
            std::clamp(0.9 * std::pow(std::max(step.error, 1e-10), -0.2), 0.2, 5.0);
        h *= factor;
        if (h < h_min)
            throw StepSizeError("integrate_adaptive: step size underflow (stiff system; "
                                "reduce the fastest rate times dt)");
    }
    return y;
}

template <typename State, typename Rhs>
State integrate_adaptive(const Rhs& f, State y, double t0, double t_final, double rtol) {
    return integrate_adaptive(f, std::move(y), t0, t_final, rtol, [](double, const State&) {});
}

}  // namespace sideband::ode
