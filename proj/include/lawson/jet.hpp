#pragma once

// Value-plus-derivatives arithmetic up to third order. Profiles report
// (f, f', f'', f''') at a point; reflected and glued profiles are built by
// combining such jets with product/quotient/composition rules, which keeps
// every derivative exact instead of falling back to differencing.

#include <cmath>

namespace lawson {

struct Jet3 {
    double v = 0, d1 = 0, d2 = 0, d3 = 0;

    static Jet3 constant(double c) { return {c, 0, 0, 0}; }
    // the identity jet at s
    static Jet3 variable(double s) { return {s, 1, 0, 0}; }
};

inline Jet3 operator+(const Jet3& a, const Jet3& b) {
    return {a.v + b.v, a.d1 + b.d1, a.d2 + b.d2, a.d3 + b.d3};
}

inline Jet3 operator-(const Jet3& a, const Jet3& b) {
    return {a.v - b.v, a.d1 - b.d1, a.d2 - b.d2, a.d3 - b.d3};
}

inline Jet3 operator*(double c, const Jet3& a) { return {c * a.v, c * a.d1, c * a.d2, c * a.d3}; }

// Leibniz rule through third order.
inline Jet3 operator*(const Jet3& a, const Jet3& b) {
    return {a.v * b.v,
            a.d1 * b.v + a.v * b.d1,
            a.d2 * b.v + 2 * a.d1 * b.d1 + a.v * b.d2,
            a.d3 * b.v + 3 * a.d2 * b.d1 + 3 * a.d1 * b.d2 + a.v * b.d3};
}

inline Jet3 recip(const Jet3& a) {
    const double iv = 1.0 / a.v;
    const double iv2 = iv * iv;
    return {iv,
            -a.d1 * iv2,
            (2 * a.d1 * a.d1 - a.v * a.d2) * iv2 * iv,
            (-6 * a.d1 * a.d1 * a.d1 + 6 * a.v * a.d1 * a.d2 - a.v * a.v * a.d3) * iv2 * iv2};
}

inline Jet3 operator/(const Jet3& a, const Jet3& b) { return a * recip(b); }

// Faa di Bruno: jet of f(u(s)) given the jet of f at u.v and the jet of u at s.
inline Jet3 compose(const Jet3& f_at_u, const Jet3& u) {
    return {f_at_u.v,
            f_at_u.d1 * u.d1,
            f_at_u.d2 * u.d1 * u.d1 + f_at_u.d1 * u.d2,
            f_at_u.d3 * u.d1 * u.d1 * u.d1 + 3 * f_at_u.d2 * u.d1 * u.d2 + f_at_u.d1 * u.d3};
}

// Even extension: given the jet of g at x = |s|, the jet of s -> g(|s|).
inline Jet3 even_extend(const Jet3& g, double s) {
    if (s >= 0) return g;
    return {g.v, -g.d1, g.d2, -g.d3};
}

}  // namespace lawson
