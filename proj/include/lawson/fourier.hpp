#pragma once

// Analytic approximation of a smooth integrand: expand f(theta) =
// F(cos theta, sin theta) in cos(2 j theta) harmonics (f is automatically even
// and pi-periodic because F depends on |x|, |y|), truncate, and patch the
// truncation with a small corrector a + b cos(2 theta) + c cos(4 theta) chosen
// so the approximation agrees with F to second order on the diagonal. The new
// profiles are the one-homogeneous extension restricted to the tangent lines
// {v = 1} and {u = 1}.

#include <cmath>
#include <numbers>
#include <vector>

#include "lawson/core.hpp"
#include "lawson/integrand.hpp"
#include "lawson/quadrature.hpp"

namespace lawson {

inline double integrand_on_circle(const Integrand& I, double theta) {
    const double u = std::fabs(std::cos(theta)), v = std::fabs(std::sin(theta));
    if (v >= u) return v * I.phi(u / v);
    return u * I.psi(v / u);
}

// Corrector coefficients (a, b, c) so that a + b cos(2t) + c cos(4t) has the
// prescribed (value, d/dt, d2/dt2) at t = pi/4. The system is triangular:
// basis values (1, 0, -1), first derivatives (0, -2, 0), second (0, 0, 16).
struct CorrectorCoeffs {
    double a, b, c;
};

inline CorrectorCoeffs solve_corrector(double dv, double dp, double dpp) {
    const double c = dpp / 16.0;
    const double b = -dp / 2.0;
    const double a = dv + c;
    return {a, b, c};
}

struct FourierCheck {
    double min_radial_convexity = 0;  // min over the circle of T + T''
    CorrectorCoeffs corrector{0, 0, 0};
};

// Replace the integrand by its corrected Fourier truncation with harmonics
// cos(2 j theta), j = 0..terms. Throws if the truncation loses the reduced
// convexity T + T'' > 0 (increase the number of terms).
inline Integrand fourier_approximate(const Integrand& I, int terms, FourierCheck* check = nullptr,
                                     int panels_per_term = 16) {
    if (terms < 4 || terms % 2 != 0) {
        throw std::invalid_argument("fourier_approximate: need an even number of terms, >= 4");
    }
    if (!(I.diagonal_jet_mismatch <= 1e-8)) {
        throw construction_error("fourier_approximate: integrand is not smooth across the diagonal");
    }
    const double half_pi = std::numbers::pi / 2.0;

    // composite Gauss-Legendre: `terms` panels of 16 nodes on [0, pi/2]
    const int n_panels = std::max(terms * panels_per_term / 16, 8);
    std::vector<double> alpha(static_cast<size_t>(terms) + 1, 0.0);
    for (int j = 0; j <= terms; ++j) {
        auto fj = [&](double t) { return integrand_on_circle(I, t) * std::cos(2.0 * j * t); };
        double acc = 0;
        for (int m = 0; m < n_panels; ++m) {
            acc += gauss16(fj, half_pi * m / n_panels, half_pi * (m + 1) / n_panels);
        }
        alpha[static_cast<size_t>(j)] = (j == 0 ? 2.0 : 4.0) / std::numbers::pi * acc;
    }

    // jets of f and of the truncation at theta = pi/4, from the phi side:
    // f = sin(t) phi(cot t) gives f' = cos(t) phi - phi'/sin(t) and
    // f'' = -f + phi''/sin^3(t).
    const Jet3 pj = I.phi.jet(1.0);
    const double rt2 = std::numbers::sqrt2;
    const double f_v = pj.v / rt2;
    const double f_p = pj.v / rt2 - pj.d1 * rt2;
    const double f_pp = -f_v + pj.d2 * 2.0 * rt2;

    FourierProfileData base;
    base.terms = terms;
    base.coeffs = alpha;
    base.horizontal_tangent = true;
    const Jet3 sn = base.angular_jet(std::numbers::pi / 4.0);
    const CorrectorCoeffs corr = solve_corrector(f_v - sn.v, f_p - sn.d1, f_pp - sn.d2);
    base.corr_a = corr.a;
    base.corr_b = corr.b;
    base.corr_c = corr.c;

    // reduced-plane convexity of the one-homogeneous extension: T + T'' > 0
    double min_conv = HUGE_VAL;
    const int n_check = 8192;
    for (int i = 0; i < n_check; ++i) {
        const Jet3 tj = base.angular_jet(half_pi * i / (n_check - 1));
        min_conv = std::min(min_conv, tj.v + tj.d2);
    }
    if (check) {
        check->min_radial_convexity = min_conv;
        check->corrector = corr;
    }
    if (!(min_conv > 0)) {
        throw construction_error(
            "fourier_approximate: truncation is not radially convex (T + T'' <= 0); "
            "increase the number of terms");
    }

    Integrand out = I;
    FourierProfileData psi_side = base;
    psi_side.horizontal_tangent = false;
    out.phi = fourier_profile(base);
    out.psi = fourier_profile(psi_side);
    out.fourier = base;
    out.diagonal_jet_mismatch = jet_mismatch_at_one(out.phi, reflect_profile(out.psi));
    return out;
}

}  // namespace lawson
