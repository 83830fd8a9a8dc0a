#pragma once

// C-infinity cutoff used by profile gluing. S(x) = E(x)/(E(x)+E(1-x)) with
// E(x) = exp(-1/x): identically 0 for x <= 0, identically 1 for x >= 1,
// strictly increasing in between, with all derivatives vanishing at both ends.
// Closed-form jets to third order; m-th derivatives scale like C_m * delta^-m
// once rescaled to a transition window of width delta.

#include <cmath>

#include "lawson/core.hpp"
#include "lawson/jet.hpp"

namespace lawson {

namespace detail {

// jet of E(x) = exp(-1/x) for x > 0
inline Jet3 expm_inv_jet(double x) {
    const double e = std::exp(-1.0 / x);
    const double x2 = x * x, x3 = x2 * x, x4 = x2 * x2;
    return {e, e / x2, e * (1.0 / x4 - 2.0 / x3), e * (1.0 / (x4 * x2) - 6.0 / (x4 * x) + 6.0 / x4)};
}

}  // namespace detail

// jet of the smoothstep S at x (derivatives w.r.t. x)
inline Jet3 smoothstep_jet(double x) {
    if (x <= 0) return Jet3::constant(0.0);
    if (x >= 1) return Jet3::constant(1.0);
    const Jet3 n = detail::expm_inv_jet(x);
    Jet3 m = detail::expm_inv_jet(1.0 - x);
    m.d1 = -m.d1;  // chain rule for the reflected argument
    m.d3 = -m.d3;
    return n / (n + m);
}

inline double smoothstep(double x) { return smoothstep_jet(x).v; }

// Transition data for gluing two profiles near s = 1.
struct GluingParams {
    double delta = 0.05;  // transition happens on [1-2*delta, 1-delta]

    GluingParams() = default;
    explicit GluingParams(double d) : delta(d) {
        if (!(d > 0.0 && d < 0.25)) {
            throw std::invalid_argument("GluingParams: delta must lie in (0, 1/4)");
        }
    }
};

// eta_delta(x) for x = |s| >= 0: equals 1 on [0, 1-2*delta], 0 on [1-delta, inf),
// monotone nonincreasing in between. Jet w.r.t. x.
inline Jet3 cutoff_jet(double x, const GluingParams& g) {
    const double d = g.delta;
    const Jet3 s = smoothstep_jet((1.0 - d - x) / d);
    // inner derivative is -1/d per order
    return {s.v, -s.d1 / d, s.d2 / (d * d), -s.d3 / (d * d * d)};
}

}  // namespace lawson
