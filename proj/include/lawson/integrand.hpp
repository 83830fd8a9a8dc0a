#pragma once

// The two-sided integrand F(u, v) on the reduced (|x|, |y|) quadrant:
//   F(u, v) = v * phi(u/v)  for v >= u,
//   F(u, v) = u * psi(v/u)  for u > v,
// extended one-homogeneously. build_integrand enforces the second-order jet
// match of the two sides across the diagonal.

#include <cmath>
#include <optional>
#include <utility>

#include "lawson/core.hpp"
#include "lawson/profile.hpp"
#include "lawson/rootfind.hpp"

namespace lawson {

// exponent pairing l(p-1) = k(q-1) that makes the raw two-sided integrand
// C^{2,1} across the diagonal
inline double compat_q(const ConeParams& kl, double p) {
    if (!(p > 2.0)) throw construction_error("compat_q: p must exceed 2");
    const double q = 1.0 + kl.l * (p - 1.0) / kl.k;
    if (!(q > 2.0)) throw construction_error("compat_q: resulting q <= 2 is inadmissible");
    return q;
}

// (f*)'(xi): inverts f' by safeguarded root finding. This is the derivative
// of the Legendre transform of f by convex duality.
inline double legendre_slope(const Profile& f, double xi, double s_max = 1.25) {
    if (xi == 0.0) return 0.0;
    const double hi_val = f(s_max, 1);
    const double lo_val = f(-s_max, 1);
    if (!(xi > lo_val && xi < hi_val)) {
        throw std::domain_error("legendre_slope: xi outside the range of f' on the working interval");
    }
    const double a = (xi > 0) ? 0.0 : -s_max;
    const double b = (xi > 0) ? s_max : 0.0;
    auto g = [&](double s) { return f(s, 1) - xi; };
    auto dg = [&](double s) { return f(s, 2); };
    // drive to interval collapse: a residual-only stop leaves s-errors of
    // order ftol/f'' that differentiate into visible noise downstream
    return newton_bisect(g, dg, a, b, g(a), g(b), 1e-16, 0.0);
}

struct Integrand {
    ConeParams params;
    Profile phi;  // used where |y| >= |x|
    Profile psi;  // used where |x| > |y|
    double p = std::nan(""), q = std::nan("");
    double b_phi = std::nan(""), b_psi = std::nan("");
    std::optional<double> delta;          // present when the phi side was glued
    std::optional<FourierProfileData> fourier;  // present for Fourier-derived integrands
    double diagonal_jet_mismatch = 0;     // measured |jet(phi) - jet(reflect(psi))| at s=1
};

// Builds the pair, checking that phi and the reflection of psi share a
// second-order jet at the diagonal. Without gluing the exponents must in
// addition satisfy the compatibility relation; with gluing the phi side is
// replaced by the transition profile near s=1.
inline Integrand build_integrand(const ConeParams& kl, double p, double q, double b_phi,
                                 double b_psi, std::optional<GluingParams> gluing = std::nullopt,
                                 double jet_tol = 1e-8) {
    Integrand I;
    I.params = kl;
    I.p = p;
    I.q = q;
    I.b_phi = b_phi;
    I.b_psi = b_psi;
    Profile phi = power_profile(kl, ProfileSide::phi, p, b_phi);
    Profile psi = power_profile(kl, ProfileSide::psi, q, b_psi);
    const Profile phi_tilde = reflect_profile(psi);
    const double mism = jet_mismatch_at_one(phi, phi_tilde);
    I.diagonal_jet_mismatch = mism;
    if (!gluing) {
        const double compat_gap = std::fabs(kl.l * (p - 1.0) - kl.k * (q - 1.0));
        if (compat_gap > 1e-12 || mism > jet_tol) {
            throw construction_error(
                "build_integrand: exponents fail the compatibility relation l(p-1)=k(q-1) "
                "(diagonal jet mismatch " +
                std::to_string(mism) + "); glue or fix (p, q)");
        }
        I.phi = phi;
    } else {
        I.phi = glue_profiles(phi, phi_tilde, *gluing, jet_tol);
        I.delta = gluing->delta;
    }
    I.psi = psi;
    return I;
}

inline Integrand make_area_integrand(const ConeParams& kl) {
    Integrand I;
    I.params = kl;
    I.phi = area_profile();
    I.psi = area_profile();
    I.diagonal_jet_mismatch = 0.0;  // the area profile is its own reflection
    return I;
}

struct IntegrandValue {
    double value;
    double du;
    double dv;
};

// F and its gradient at (u, v) != (0, 0), u, v >= 0.
inline IntegrandValue phi_full(const Integrand& I, double u, double v) {
    if (u == 0.0 && v == 0.0) throw std::domain_error("phi_full: the origin is excluded");
    if (v >= u) {
        const double s = u / v;
        const double f = I.phi(s), f1 = I.phi(s, 1);
        return {v * f, f1, f - s * f1};
    }
    const double s = v / u;
    const double g = I.psi(s), g1 = I.psi(s, 1);
    return {u * g, g - s * g1, g1};
}

}  // namespace lawson
