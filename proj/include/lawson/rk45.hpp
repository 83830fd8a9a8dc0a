#pragma once

// Embedded Dormand-Prince 5(4) integrator with proportional step control.
// Steps are capped by max_step and land exactly on caller-requested targets,
// so output rows are genuine solution points rather than dense-output
// interpolants.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "lawson/core.hpp"

namespace lawson {

struct RKOptions {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double max_step = std::numeric_limits<double>::infinity();
    double initial_step = 0.0;  // 0: derive from max_step / span
    long max_steps = 200'000'000L;
};

template <std::size_t N>
using State = std::array<double, N>;

namespace detail {

// Dormand-Prince coefficients
inline constexpr double dp_c[7] = {0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
inline constexpr double dp_a[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}};
inline constexpr double dp_b5[7] = {35.0 / 384,      0.0,        500.0 / 1113, 125.0 / 192,
                                    -2187.0 / 6784, 11.0 / 84, 0.0};
inline constexpr double dp_b4[7] = {5179.0 / 57600,    0.0,          7571.0 / 16695, 393.0 / 640,
                                    -92097.0 / 339200, 187.0 / 2100, 1.0 / 40};

}  // namespace detail

// Integrates y' = f(t, y) from t0 to t1 (t1 > t0). The observer is called
// after every accepted step as observer(t, y) and may return false to stop
// early (e.g. on convergence to a fixed point).
template <std::size_t N, class RHS, class Observer>
void rk45_integrate(RHS&& f, double t0, double t1, State<N>& y, const RKOptions& opt,
                    Observer&& observer) {
    using detail::dp_a;
    using detail::dp_b4;
    using detail::dp_b5;
    using detail::dp_c;

    double t = t0;
    double h = opt.initial_step > 0 ? opt.initial_step : std::min(opt.max_step, (t1 - t0) / 100.0);
    h = std::min(h, t1 - t0);
    std::array<State<N>, 7> k;
    long steps = 0;

    while (t < t1) {
        if (++steps > opt.max_steps) throw solve_error("rk45: step budget exhausted");
        h = std::min({h, opt.max_step, t1 - t});

        k[0] = f(t, y);
        for (int stage = 1; stage < 7; ++stage) {
            State<N> ys;
            for (std::size_t i = 0; i < N; ++i) {
                double acc = 0;
                for (int m = 0; m < stage; ++m) acc += dp_a[stage][m] * k[m][i];
                ys[i] = y[i] + h * acc;
            }
            k[stage] = f(t + dp_c[stage] * h, ys);
        }

        State<N> y5, y4;
        for (std::size_t i = 0; i < N; ++i) {
            double a5 = 0, a4 = 0;
            for (int m = 0; m < 7; ++m) {
                a5 += dp_b5[m] * k[m][i];
                a4 += dp_b4[m] * k[m][i];
            }
            y5[i] = y[i] + h * a5;
            y4[i] = y[i] + h * a4;
        }

        double err = 0;
        for (std::size_t i = 0; i < N; ++i) {
            const double scale =
                opt.abs_tol + opt.rel_tol * std::max(std::fabs(y[i]), std::fabs(y5[i]));
            err += sq((y5[i] - y4[i]) / scale);
        }
        err = std::sqrt(err / N);

        if (err <= 1.0 || h <= 1e-14 * std::fabs(t)) {
            t += h;
            y = y5;
            if (!observer(t, y)) return;
        }
        const double factor = (err > 0) ? 0.9 * std::pow(err, -0.2) : 5.0;
        h *= std::clamp(factor, 0.2, 5.0);
        if (!(h > 0) || !std::isfinite(h)) throw solve_error("rk45: step size collapsed");
    }
}

}  // namespace lawson
