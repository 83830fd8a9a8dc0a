#pragma once

// Analytic certification of a profile: the trapping quantity E_kl, its kappa
// margin, the second-derivative threshold at s=1, convexity/monotonicity
// margins, and the exponent inequalities for raw power profiles. These are
// exactly the hypotheses under which the phase-plane trajectory of the leaf
// ODE stays trapped and converges to the cone.

#include <algorithm>
#include <cmath>

#include "lawson/core.hpp"
#include "lawson/profile.hpp"

namespace lawson {

// E_kl(f)(s) = l (k+l-1)/(k+l+1) f
//              - (k + (l - 2(k+l)/(k+l+1)) s) f'
//              - ((k+l+1)/2 - s)(1 - s) f''
inline double trapping_quantity(const Profile& f, const ConeParams& kl, double s) {
    const double k = kl.k, l = kl.l;
    const Jet3 j = f.jet(s);
    const double n1 = k + l + 1.0;
    return l * (k + l - 1.0) / n1 * j.v - (k + (l - 2.0 * (k + l) / n1) * s) * j.d1 -
           (0.5 * n1 - s) * (1.0 - s) * j.d2;
}

// threshold from the quantitative trapping remark: f''(1) must exceed this
inline double second_deriv_threshold(const ConeParams& kl) {
    const double k = kl.k, l = kl.l;
    return 4.0 * k * l / ((k + l) * sq(k + l - 1.0));
}

// exponent inequality p-1 > 4k/(k+l-1)^2 for raw power profiles
inline bool first_order_inequality(const ConeParams& kl, double p) {
    return p - 1.0 > 4.0 * kl.k / sq(kl.k + kl.l - 1.0);
}

// (p-1)^2 - ((k+2l+2)/(k+l) + 4/((k+l)(k+l-1)))(p-1) + 4k/((k+l)(k+l-1)) >= 0
inline bool second_order_inequality(const ConeParams& kl, double p) {
    const double k = kl.k, l = kl.l, pm = p - 1.0;
    const double mid = (k + 2 * l + 2) / (k + l) + 4.0 / ((k + l) * (k + l - 1.0));
    return pm * pm - mid * pm + 4.0 * k / ((k + l) * (k + l - 1.0)) >= 0.0;
}

struct CertificationReport {
    bool one_jet_ok = false;          // f(1) = 1 and f'(1) = l/(k+l)
    double kappa_estimate = 0;        // min over grid of E_kl(f)(s)/(1-s)
    double second_deriv_margin = 0;   // f''(1) - 4kl/((k+l)(k+l-1)^2)
    double convexity_margin = 0;      // min f'' on [-1,1]
    double monotonicity_margin = 0;   // min (f - s f') on [0,1]
    bool p_inequalities_ok = true;    // raw power profiles only
    bool first_order_ok = true;
    bool second_order_ok = true;
    int sample_count = 0;
    bool verdict = false;
};

// Dense-grid certification. Failures are recorded in the report, not thrown.
// Near s=1 the kappa ratio uses the limit value -E'(1) via a one-sided
// difference; everywhere else the raw ratio E(s)/(1-s).
inline CertificationReport certify_profile(const Profile& f, const ConeParams& kl,
                                           int sample_count = 10001) {
    CertificationReport rep;
    rep.sample_count = sample_count;
    const double k = kl.k, l = kl.l;

    const Jet3 j1 = f.jet(1.0);
    rep.one_jet_ok = std::fabs(j1.v - 1.0) <= 1e-9 && std::fabs(j1.d1 - l / (k + l)) <= 1e-9;
    rep.second_deriv_margin = j1.d2 - second_deriv_threshold(kl);

    const int n = sample_count;
    double kappa = HUGE_VAL;
    for (int i = 0; i + 1 < n; ++i) {
        const double s = double(i) / (n - 1);
        kappa = std::min(kappa, trapping_quantity(f, kl, s) / (1.0 - s));
    }
    {
        const double h = 1e-6;  // limit -E'(1), forced to 0/0 at s=1 by the one-jet condition
        const double lim = (trapping_quantity(f, kl, 1.0 - h) - trapping_quantity(f, kl, 1.0)) / h;
        kappa = std::min(kappa, lim);
    }
    rep.kappa_estimate = kappa;

    double conv = HUGE_VAL, mono = HUGE_VAL;
    for (int i = 0; i < n; ++i) {
        const double s = -1.0 + 2.0 * i / (n - 1);
        conv = std::min(conv, f(s, 2));
    }
    for (int i = 0; i < n; ++i) {
        const double s = double(i) / (n - 1);
        mono = std::min(mono, f(s) - s * f(s, 1));
    }
    rep.convexity_margin = conv;
    rep.monotonicity_margin = mono;

    if (const PowerProfileParams* pp = f.power_params()) {
        rep.first_order_ok = first_order_inequality(kl, pp->p);
        rep.second_order_ok = second_order_inequality(kl, pp->p);
        rep.p_inequalities_ok = rep.first_order_ok && rep.second_order_ok;
    }

    rep.verdict = rep.one_jet_ok && rep.kappa_estimate > 0 && rep.second_deriv_margin > 0 &&
                  rep.convexity_margin > 0 && rep.monotonicity_margin > 0 && rep.p_inequalities_ok;
    return rep;
}

}  // namespace lawson
