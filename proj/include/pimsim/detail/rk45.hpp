#pragma once

#include <algorithm>
#include <cmath>

#include "pimsim/errors.hpp"

namespace pimsim::detail {

// Dormand-Prince 5(4) embedded pair, adaptive step size, PI-free control.
// State is any Eigen-like type with +, scalar *, and .norm().
template <class State, class Rhs>
class Rk45 {
public:
    Rk45(Rhs rhs, double rtol, double atol) : rhs_(rhs), rtol_(rtol), atol_(atol) {}

    // One accepted step from (t, y); h_ is adapted in place. Returns the
    // accepted step size. The step never crosses t_end.
    double step(double t, double t_end, State& y) {
        if (h_ <= 0.0) h_ = initial_step(t, t_end, y);
        int rejects = 0;
        for (;;) {
            const double h = std::min(h_, t_end - t);
            State k1 = rhs_(t, y);
            State k2 = rhs_(t + c2 * h, y + (h * a21) * k1);
            State k3 = rhs_(t + c3 * h, y + h * (a31 * k1 + a32 * k2));
            State k4 = rhs_(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
            State k5 = rhs_(t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
            State k6 = rhs_(t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
            State y5 = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
            State k7 = rhs_(t + h, y5);
            State err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
            const double scale = atol_ + rtol_ * std::max(y.norm(), y5.norm());
            const double errnorm = err.norm() / scale;
            if (errnorm <= 1.0) {
                const double grow = (errnorm > 0.0)
                                        ? 0.9 * std::pow(errnorm, -0.2)
                                        : 5.0;
                h_ = h * std::clamp(grow, 0.2, 5.0);
                y = std::move(y5);
                return h;
            }
            h_ = h * std::clamp(0.9 * std::pow(errnorm, -0.2), 0.1, 0.9);
            if (++rejects > 60 || h_ < 1e-14 * std::max(1.0, std::abs(t)))
                throw IntegrationError("rk45: step control failed");
        }
    }

    void integrate(double t0, double t1, State& y) {
        double t = t0;
        long steps = 0;
        while (t < t1 - 1e-14 * std::max(1.0, t1)) {
            t += step(t, t1, y);
            if (++steps > 100'000'000L) throw IntegrationError("rk45: step budget exceeded");
        }
    }

    void reset() { h_ = 0.0; }

private:
    double initial_step(double t, double t_end, const State& y) {
        State f = rhs_(t, y);
        const double d0 = y.norm(), d1 = f.norm();
        double h = (d1 > 1e-30) ? 0.01 * std::max(d0, 1.0) / d1 : 1e-6;
        return std::min(h, t_end - t);
    }

    Rhs rhs_;
    double rtol_, atol_;
    double h_ = 0.0;

    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                            a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 35.0 / 384 - 5179.0 / 57600,
                            e3 = 500.0 / 1113 - 7571.0 / 16695,
                            e4 = 125.0 / 192 - 393.0 / 640,
                            e5 = -2187.0 / 6784 + 92097.0 / 339200,
                            e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;
};

template <class State, class Rhs>
void rk45_integrate(Rhs rhs, double t0, double t1, State& y, double rtol,
                    double atol) {
    Rk45<State, Rhs> solver(rhs, rtol, atol);
    solver.integrate(t0, t1, y);
}

}  // namespace pimsim::detail
