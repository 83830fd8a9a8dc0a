#pragma once

// Small quadrature toolbox: fixed Gauss-Legendre panels and Richardson-refined
// composite Simpson integration.

#include <array>
#include <cmath>
#include <functional>

namespace lawson {

// 6-point Gauss-Legendre nodes/weights on [-1, 1] (exact through degree 11)
inline constexpr std::array<double, 6> kGL6Nodes = {
    -0.9324695142031520278123016, -0.6612093864662645136613996, -0.2386191860831969086305017,
    0.2386191860831969086305017,  0.6612093864662645136613996,  0.9324695142031520278123016};
inline constexpr std::array<double, 6> kGL6Weights = {
    0.1713244923791703450402961, 0.3607615730481386075698335, 0.4679139345726910473898703,
    0.4679139345726910473898703, 0.3607615730481386075698335, 0.1713244923791703450402961};

template <class F>
double gauss6(F&& f, double a, double b) {
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double acc = 0;
    for (int i = 0; i < 6; ++i) acc += kGL6Weights[i] * f(mid + half * kGL6Nodes[i]);
    return half * acc;
}

// 16-point Gauss-Legendre (used in composite form by the Fourier analysis)
inline constexpr std::array<double, 16> kGL16Nodes = {
    -0.9894009349916499325961542, -0.9445750230732325760779884, -0.8656312023878317438804679,
    -0.7554044083550030338951012, -0.6178762444026437484466718, -0.4580167776572273863424194,
    -0.2816035507792589132304605, -0.0950125098376374401853193, 0.0950125098376374401853193,
    0.2816035507792589132304605,  0.4580167776572273863424194,  0.6178762444026437484466718,
    0.7554044083550030338951012,  0.8656312023878317438804679,  0.9445750230732325760779884,
    0.9894009349916499325961542};
inline constexpr std::array<double, 16> kGL16Weights = {
    0.0271524594117540948517806, 0.0622535239386478928628438, 0.0951585116824927848099251,
    0.1246289712555338720524763, 0.1495959888165767320815017, 0.1691565193950025381893121,
    0.1826034150449235888667637, 0.1894506104550684962853967, 0.1894506104550684962853967,
    0.1826034150449235888667637, 0.1691565193950025381893121, 0.1495959888165767320815017,
    0.1246289712555338720524763, 0.0951585116824927848099251, 0.0622535239386478928628438,
    0.0271524594117540948517806};

template <class F>
double gauss16(F&& f, double a, double b) {
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double acc = 0;
    for (int i = 0; i < 16; ++i) acc += kGL16Weights[i] * f(mid + half * kGL16Nodes[i]);
    return half * acc;
}

template <class F>
double simpson(F&& f, double a, double b, int n) {
    // n subintervals, n even
    const double h = (b - a) / n;
    double acc = f(a) + f(b);
    for (int i = 1; i < n; i += 2) acc += 4.0 * f(a + i * h);
    for (int i = 2; i < n; i += 2) acc += 2.0 * f(a + i * h);
    return acc * h / 3.0;
}

struct QuadratureResult {
    double value = 0;
    double error_estimate = 0;
    int intervals = 0;
};

// Composite Simpson doubled until the Richardson error estimate meets the
// tolerance; returns the extrapolated value.
template <class F>
QuadratureResult simpson_refined(F&& f, double a, double b, double rel_tol = 1e-10,
                                 double abs_tol = 1e-14, int n0 = 64, int n_max = 1 << 20) {
    if (a == b) return {0.0, 0.0, 0};
    double prev = simpson(f, a, b, n0);
    for (int n = 2 * n0; n <= n_max; n *= 2) {
        const double cur = simpson(f, a, b, n);
        const double err = std::fabs(cur - prev) / 15.0;
        if (err <= abs_tol + rel_tol * std::fabs(cur)) {
            return {(16.0 * cur - prev) / 15.0, err, n};
        }
        prev = cur;
    }
    return {prev, std::nan(""), n_max};
}

}  // namespace lawson
