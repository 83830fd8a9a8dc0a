#pragma once

// Tail behavior of computed leaves: log-log regression of the excess
// sigma(t) - t against the closed-form decay exponent, the supremum of that
// exponent over raw power integrands, and the quartic supersolution check for
// the area integrand.

#include <cmath>
#include <vector>

#include "lawson/core.hpp"
#include "lawson/foliation.hpp"
#include "lawson/ode.hpp"

namespace lawson {

struct AsymptoticFit {
    double a_hat = 0;
    double mu_hat = 0;
    double mu_theory = 0;
    double rel_err = 0;
    double t_min = 0, t_max = 0;
    double residual_norm = 0;
    int samples = 0;
};

// closed-form decay exponent from the linearization at the fixed point:
// mu = (k+l-1)/2 - sqrt(((k+l-1)/2)^2 - kl/(f''(1)(k+l)))
inline double mu_theory(const Profile& f, const ConeParams& kl) {
    const double k = kl.k, l = kl.l;
    const double half = 0.5 * (k + l - 1.0);
    const double disc = half * half - k * l / (f(1.0, 2) * (k + l));
    if (!(disc > 0)) throw construction_error("mu_theory: nonpositive discriminant");
    return half - std::sqrt(disc);
}

// supremum of the decay exponent over raw power integrands with compatible
// exponents p, q >= 6: the binding side approaches exponent 6, leaving
// min{k,l}/5 inside the discriminant
inline double mu_max(const ConeParams& kl) {
    const double half = 0.5 * (kl.k + kl.l - 1.0);
    return half - std::sqrt(half * half - std::min(kl.k, kl.l) / 5.0);
}

// Least-squares line fit of log(sigma - t) against log t over log-spaced
// samples in the window; slope = -mu_hat, intercept = log a_hat.
inline AsymptoticFit fit_tail(const DenseLeaf& leaf, double t_min, double t_max,
                              double mu_th = 0.0, int samples = 200) {
    if (!(t_min >= leaf.t_min() && t_max <= leaf.t_max() && t_min < t_max)) {
        throw std::domain_error("fit_tail: window outside the table range");
    }
    AsymptoticFit fit;
    fit.t_min = t_min;
    fit.t_max = t_max;
    fit.samples = samples;
    fit.mu_theory = mu_th;

    std::vector<double> X(samples), Y(samples);
    for (int i = 0; i < samples; ++i) {
        const double t = t_min * std::pow(t_max / t_min, double(i) / (samples - 1));
        const double excess = leaf.sigma(t) - t;
        if (!(excess > 0)) throw std::domain_error("fit_tail: nonpositive excess sigma - t");
        X[i] = std::log(t);
        Y[i] = std::log(excess);
    }
    double mx = 0, my = 0;
    for (int i = 0; i < samples; ++i) {
        mx += X[i];
        my += Y[i];
    }
    mx /= samples;
    my /= samples;
    double sxx = 0, sxy = 0;
    for (int i = 0; i < samples; ++i) {
        sxx += (X[i] - mx) * (X[i] - mx);
        sxy += (X[i] - mx) * (Y[i] - my);
    }
    const double slope = sxy / sxx;
    const double intercept = my - slope * mx;
    fit.mu_hat = -slope;
    fit.a_hat = std::exp(intercept);
    double rss = 0;
    for (int i = 0; i < samples; ++i) rss += sq(Y[i] - (slope * X[i] + intercept));
    fit.residual_norm = std::sqrt(rss);
    if (mu_th != 0.0) fit.rel_err = std::fabs(fit.mu_hat - mu_th) / std::fabs(mu_th);
    return fit;
}

// L(t) for the quartic barrier sigma_0 = (1 + t^4)^{1/4} under the area
// integrand with k = l: supersolution means L <= 0, which holds from k >= 3.
inline double area_supersolution_L(int k, double t) {
    const double t4 = std::pow(t, 4.0);
    const double s0 = std::pow(1.0 + t4, 0.25);
    const double sp = t * t * t / std::pow(1.0 + t4, 0.75);
    const double spp = 3.0 * t * t / std::pow(1.0 + t4, 1.75);
    const double P = 1.0 + sp * sp;  // area-profile P at sp
    return spp + k * P * sp / t - k * P / s0;
}

struct SupersolutionReport {
    int k = 0;
    double max_L = -HUGE_VAL;
    double max_L_t = 0;
    std::vector<double> t;
    std::vector<double> L;
    bool supersolution = false;  // max L <= 0
};

inline SupersolutionReport area_supersolution_check(int k, const std::vector<double>& t_samples) {
    SupersolutionReport rep;
    rep.k = k;
    rep.t = t_samples;
    rep.L.reserve(t_samples.size());
    for (double t : t_samples) {
        const double L = area_supersolution_L(k, t);
        rep.L.push_back(L);
        if (L > rep.max_L) {
            rep.max_L = L;
            rep.max_L_t = t;
        }
    }
    rep.supersolution = rep.max_L <= 0.0;
    return rep;
}

inline std::vector<double> log_spaced(double lo, double hi, int n) {
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) out[i] = lo * std::pow(hi / lo, double(i) / (n - 1));
    return out;
}

}  // namespace lawson
