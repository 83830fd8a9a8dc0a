#pragma once

// The leaf ODE
//     sigma'' + k P(sigma') sigma'/t + l Q(sigma')/sigma = 0,
//     P(s) = f'(s)/(s f''(s)),  Q(s) = (s f'(s) - f(s))/f''(s),
// solved from the regular start sigma(0)=1, sigma'(0)=0, continued in the
// phase variables w = sigma(t)/t, z = sigma'(t), tau = log t, where it
// becomes the autonomous system
//     (w', z') = (-w + z, -l Q(z)/w - k z P(z)),
// whose only fixed point in the closed half-strip {w >= 1, 0 <= z <= 1} is
// (1,1). The trajectory is monitored against the trapping region bounded by
// {z = 0}, the zero set of the second field component, and a line (or, for
// the area integrand, a supersolution curve) through the fixed point.

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lawson/certify.hpp"
#include "lawson/core.hpp"
#include "lawson/integrand.hpp"
#include "lawson/profile.hpp"
#include "lawson/quadrature.hpp"
#include "lawson/rk45.hpp"

namespace lawson {

struct ODECoefficients {
    double P, Q;
};

// P and Q at s; P takes its analytic limit 1 at s = 0 (even profile).
inline ODECoefficients coefficients(const Profile& f, double s) {
    const Jet3 j = f.jet(s);
    if (!(j.d2 > 0)) throw std::domain_error("coefficients: profile is not convex at s");
    const double P = (s == 0.0) ? 1.0 : j.d1 / (s * j.d2);
    const double Q = (s * j.d1 - j.v) / j.d2;
    return {P, Q};
}

struct FieldValue {
    double V1, V2;
};

// the autonomous phase field V(w, z)
inline FieldValue phase_field(const Profile& f, const ConeParams& kl, double w, double z) {
    if (!(w > 0)) throw std::domain_error("phase_field: w must be positive");
    const ODECoefficients c = coefficients(f, z);
    return {-w + z, -kl.l * c.Q / w - kl.k * z * c.P};
}

struct SolverOptions {
    double t_switch = 1e-3;     // series/fixed-point start is used on [0, t_switch]
    double rk_tol = 1e-10;      // relative tolerance of the embedded pair
    double converge_tol = 1e-10;  // stop when ||(w,z)-(1,1)|| drops below this
    double region_tol = 1e-8;   // allowed overshoot of the trapping boundaries
    double tau_max = 40.0;
    double table_dt = 2e-5;     // row spacing of the t-part of the table
    double table_dtau = 5e-4;   // row spacing (in log t) of the phase part
    double table_t_max = 2e4;   // keep tabulating past convergence up to here
    double picard_tol = 1e-13;
    bool force = false;         // skip the certification gate
};

struct TableRow {
    double t, sigma, dsigma;
};

struct ProfileTable {
    std::vector<TableRow> rows;
    std::string profile_id;
    ConeParams params;
    SolverOptions opts;
};

enum class Termination { converged, tau_max, region_exit };

inline const char* to_string(Termination t) {
    switch (t) {
        case Termination::converged: return "converged";
        case Termination::tau_max: return "tau_max";
        default: return "region_exit";
    }
}

struct PhaseSample {
    double tau, w, z;
    double d1, d2, d3;  // signed distances to the region boundaries, positive inside
};

struct PhaseTrajectory {
    std::vector<PhaseSample> samples;
    Termination termination = Termination::tau_max;
    double final_distance = HUGE_VAL;   // ||(w,z)-(1,1)|| at the last sample
    double min_region_margin = HUGE_VAL;
};

// ---------------------------------------------------------------------------
// trapping region

struct RegionDistances {
    double d1, d2, d3;
    double min() const { return std::min({d1, d2, d3}); }
};

struct TrappingRegion {
    ConeParams params;
    Profile profile;
    bool area_variant = false;  // area integrand: third boundary is the
                                // supersolution curve z = w^{-3} instead of a line

    // second boundary: w = (l/k)(f(z)/f'(z) - z), the zero set of V^2
    double gamma2(double z) const {
        const Jet3 j = profile.jet(z);
        return (double(params.l) / params.k) * (j.v / j.d1 - z);
    }

    // third boundary (standard variant): the line through (1,1) of slope
    // (1 + (lambda_+ + lambda_-)/2) = -(k+l-1)/2 in the (w, z) plane
    double gamma3_slope() const { return -0.5 * (params.k + params.l - 1.0); }
    double gamma3_w(double z) const {
        const double n = params.k + params.l;
        return (n + 1.0 - 2.0 * z) / (n - 1.0);
    }
};

inline TrappingRegion trapping_region(const Profile& f, const ConeParams& kl) {
    TrappingRegion r;
    r.params = kl;
    r.profile = f;
    r.area_variant = (f.variant() == ProfileVariant::area && kl.k == kl.l);
    return r;
}

// signed distances, positive inside: d1 to {z=0}, d2 horizontal distance to
// the gamma2 graph, d3 normal distance to the gamma3 line (or vertical
// distance to the supersolution curve in the area variant)
inline RegionDistances membership(const TrappingRegion& r, double w, double z) {
    RegionDistances d;
    d.d1 = z;
    d.d2 = (z > 0) ? r.gamma2(z) - w : HUGE_VAL;
    if (r.area_variant) {
        d.d3 = z - 1.0 / (w * w * w);
    } else {
        const double m = r.gamma3_slope();
        d.d3 = ((z - 1.0) - m * (w - 1.0)) / std::sqrt(1.0 + m * m);
    }
    return d;
}

// Inward-flow margin on the third boundary: V^2 - m V^1 evaluated on
// gamma3 at height z, which must be strictly positive for z in (0,1).
// This is the inequality the trapping hypothesis reduces to.
inline double gamma3_flow_margin(const TrappingRegion& r, double z) {
    const double w = r.gamma3_w(z);
    const FieldValue V = phase_field(r.profile, r.params, w, z);
    return V.V2 - r.gamma3_slope() * V.V1;
}

// ---------------------------------------------------------------------------
// linearization at the fixed point (1,1)

struct LinearizationData {
    double M[2][2];
    double lambda_plus, lambda_minus;
    double mu;           // -(1 + lambda_plus) > 0, the leaf decay exponent
    double slope_plus;   // eigenvector slopes 1 + lambda_{+/-}
    double slope_minus;
};

inline LinearizationData linearization(const Profile& f, const ConeParams& kl) {
    const double k = kl.k, l = kl.l;
    const double fpp1 = f(1.0, 2);
    const double half = 0.5 * (k + l - 1.0);
    const double disc = half * half - k * l / (fpp1 * (k + l));
    if (!(disc > 0)) {
        throw construction_error("linearization: nonpositive discriminant (second-derivative "
                                 "threshold at s=1 violated)");
    }
    LinearizationData d;
    d.M[0][0] = -1.0;
    d.M[0][1] = 1.0;
    d.M[1][0] = -k * l / (fpp1 * (k + l));
    d.M[1][1] = -(k + l);
    const double s = std::sqrt(disc);
    d.lambda_plus = -0.5 * (k + l + 1.0) + s;
    d.lambda_minus = -0.5 * (k + l + 1.0) - s;
    d.mu = -(1.0 + d.lambda_plus);
    d.slope_plus = 1.0 + d.lambda_plus;
    d.slope_minus = 1.0 + d.lambda_minus;
    return d;
}

// Plain QR iteration on a 2x2 matrix; used as the numeric cross-check of the
// closed-form eigenvalues. Returns (lambda_plus, lambda_minus) sorted
// descending plus eigenvector slopes.
struct Eigen2 {
    double lambda_plus, lambda_minus;
    double slope_plus, slope_minus;
};

inline Eigen2 eigen2_numeric(const double M[2][2], int iterations = 200) {
    double a = M[0][0], b = M[0][1], c = M[1][0], d = M[1][1];
    for (int it = 0; it < iterations && std::fabs(c) > 1e-300; ++it) {
        // Givens QR: A = QR, then A <- RQ
        const double r = std::hypot(a, c);
        const double cs = a / r, sn = c / r;
        const double r11 = cs * a + sn * c, r12 = cs * b + sn * d;
        const double r22 = -sn * b + cs * d;
        a = r11 * cs + r12 * sn;
        b = -r11 * sn + r12 * cs;
        c = r22 * sn;
        d = r22 * cs;
    }
    Eigen2 e;
    e.lambda_plus = std::max(a, d);
    e.lambda_minus = std::min(a, d);
    // eigenvector of the original matrix for lambda: (M00 - lambda) v1 + M01 v2 = 0
    e.slope_plus = (e.lambda_plus - M[0][0]) / M[0][1];
    e.slope_minus = (e.lambda_minus - M[0][0]) / M[0][1];
    return e;
}

// ---------------------------------------------------------------------------
// regular start at t = 0

// second-order jet start from sigma''(0) = l f(0) / ((k+1) f''(0))
inline std::pair<double, double> taylor_start(const Profile& f, const ConeParams& kl, double t0) {
    const double f0 = f(0.0), fpp0 = f(0.0, 2);
    if (!(fpp0 > 0)) {
        throw std::domain_error("taylor_start: f''(0) <= 0, jet start undefined (use picard_start)");
    }
    const double c2 = kl.l * f0 / ((kl.k + 1) * fpp0);
    return {1.0 + 0.5 * c2 * t0 * t0, c2 * t0};
}

// Fixed-point iteration of the divergence-form operator
//   G(g)(t) = (f*)'( l / (t^k (1+I[g])^l) * Int_0^t s^k (1+I[g])^{l-1} f(g) ds ),
// I[g](t) = Int_0^t g. Contracts on [0, t0] for t0 small; divergence of the
// iteration is detected and reported. Returns the table (t, 1 + I[g], g).
inline ProfileTable picard_start(const Profile& f, const ConeParams& kl, double t0, double tol) {
    const int n = 129;
    const int k = kl.k, l = kl.l;
    std::vector<double> ts(n), g(n, 0.0), I1(n, 0.0), I2(n, 0.0);
    for (int i = 0; i < n; ++i) ts[i] = t0 * i / (n - 1);

    double prev_diff = HUGE_VAL;
    int rising = 0;
    bool converged = false;
    for (int iter = 0; iter < 200; ++iter) {
        // cumulative integrals with linear interpolation of g inside panels;
        // the s^k factor is handled by per-panel Gauss nodes
        for (int i = 1; i < n; ++i) {
            I1[i] = I1[i - 1] + 0.5 * (g[i - 1] + g[i]) * (ts[i] - ts[i - 1]);
        }
        for (int i = 1; i < n; ++i) {
            const double ta = ts[i - 1], tb = ts[i];
            auto integrand = [&](double s) {
                const double u = (s - ta) / (tb - ta);
                const double gs = g[i - 1] + u * (g[i] - g[i - 1]);
                const double Is = I1[i - 1] + u * (I1[i] - I1[i - 1]);
                return std::pow(s, k) * std::pow(1.0 + Is, l - 1) * f(gs);
            };
            I2[i] = I2[i - 1] + gauss6(integrand, ta, tb);
        }
        double diff = 0;
        std::vector<double> gn(n, 0.0);
        for (int i = 1; i < n; ++i) {
            const double arg = l * I2[i] / (std::pow(ts[i], k) * std::pow(1.0 + I1[i], l));
            gn[i] = legendre_slope(f, arg);
            diff = std::max(diff, std::fabs(gn[i] - g[i]));
        }
        g = std::move(gn);
        if (diff <= tol) {
            converged = true;
            break;
        }
        if (diff > prev_diff) {
            if (++rising >= 3) {
                throw solve_error("picard_start: iteration is not contracting (reduce t_switch)");
            }
        } else {
            rising = 0;
        }
        prev_diff = diff;
    }
    if (!converged) throw solve_error("picard_start: no convergence within iteration budget");

    for (int i = 1; i < n; ++i) I1[i] = I1[i - 1] + 0.5 * (g[i - 1] + g[i]) * (ts[i] - ts[i - 1]);
    ProfileTable table;
    table.params = kl;
    table.rows.reserve(n);
    for (int i = 0; i < n; ++i) table.rows.push_back({ts[i], 1.0 + I1[i], g[i]});
    return table;
}

// ---------------------------------------------------------------------------
// full leaf integration

struct LeafResult {
    ProfileTable table;
    PhaseTrajectory trajectory;
    bool converged = false;
    bool region_ok = true;
};

namespace detail {

inline std::array<double, 2> el_rhs(const Profile& f, const ConeParams& kl, double t,
                                    const std::array<double, 2>& y) {
    const ODECoefficients c = coefficients(f, y[1]);
    return {y[1], -kl.k * c.P * y[1] / t - kl.l * c.Q / y[0]};
}

}  // namespace detail

// Solves the leaf from the regular start: fixed-point start on [0, t_switch],
// adaptive embedded RK in t up to t = 1, then in phase coordinates until the
// trajectory lands on the fixed point. Each phase sample is checked against
// the trapping region; an excursion beyond region_tol is a hard failure
// unless opts.force is set. The returned table covers [0, t_switch] from the
// fixed-point grid, [t_switch, 1] on a uniform grid, and t > 1 on a log grid
// reconstructed through sigma(t) = t w(log t).
inline LeafResult integrate_leaf(const Profile& f, const ConeParams& kl,
                                 const SolverOptions& opts = {}) {
    if (!opts.force) {
        if (f.variant() == ProfileVariant::area) {
            if (kl.k != kl.l) {
                throw construction_error("integrate_leaf: area integrand requires k == l");
            }
            // supersolution barrier (valid from k >= 3): L(t) <= 0 on a log grid
            for (int i = 0; i < 200; ++i) {
                const double t = std::pow(10.0, -2.0 + 5.0 * i / 199.0);
                const double s0 = std::pow(1.0 + std::pow(t, 4.0), 0.25);
                const double sp = t * t * t / std::pow(1.0 + std::pow(t, 4.0), 0.75);
                const double spp = 3.0 * t * t / std::pow(1.0 + std::pow(t, 4.0), 1.75);
                const double L = spp + kl.k * (1.0 + sp * sp) * sp / t - kl.k * (1.0 + sp * sp) / s0;
                // far out L decays below double roundoff; 1e-14 is numerical zero
                if (!(L <= 1e-14)) {
                    throw construction_error(
                        "integrate_leaf: area supersolution barrier fails (k < 3); "
                        "no trapping certificate");
                }
            }
        } else {
            const CertificationReport rep = certify_profile(f, kl);
            if (!rep.verdict) {
                throw construction_error(
                    "integrate_leaf: certification verdict is false; fix the profile or force");
            }
        }
    }

    LeafResult res;
    ProfileTable& table = res.table;
    table.params = kl;
    table.opts = opts;

    // stage 1: fixed-point start on [0, t_switch]
    {
        ProfileTable start = picard_start(f, kl, opts.t_switch, opts.picard_tol);
        table.rows = std::move(start.rows);
    }

    // stage 2: t-integration on [t_switch, 1] with rows on a uniform grid
    RKOptions rko;
    rko.rel_tol = opts.rk_tol;
    rko.abs_tol = 1e-13;
    rko.max_step = opts.table_dt;
    rko.initial_step = opts.table_dt;
    std::array<double, 2> y = {table.rows.back().sigma, table.rows.back().dsigma};
    {
        auto rhs = [&](double t, const std::array<double, 2>& s) { return detail::el_rhs(f, kl, t, s); };
        const long n_rows = std::lround((1.0 - opts.t_switch) / opts.table_dt);
        double t_prev = opts.t_switch;
        for (long i = 1; i <= n_rows; ++i) {
            const double t_target = (i == n_rows) ? 1.0 : opts.t_switch + i * opts.table_dt;
            rk45_integrate<2>(rhs, t_prev, t_target, y, rko,
                              [](double, const std::array<double, 2>&) { return true; });
            table.rows.push_back({t_target, y[0], y[1]});
            t_prev = t_target;
        }
    }

    // stage 3: phase coordinates from tau = 0 (t = 1)
    PhaseTrajectory& traj = res.trajectory;
    const TrappingRegion region = trapping_region(f, kl);
    std::array<double, 2> wz = {y[0], y[1]};
    bool region_violated = false;

    auto record = [&](double tau, const std::array<double, 2>& s) {
        const RegionDistances d = membership(region, s[0], s[1]);
        traj.samples.push_back({tau, s[0], s[1], d.d1, d.d2, d.d3});
        traj.min_region_margin = std::min(traj.min_region_margin, d.min());
        if (d.min() < -opts.region_tol) region_violated = true;
        // append the reconstructed sigma row while the excess is resolvable
        if (tau > 0 && s[0] - 1.0 > 1e-13) {
            const double t = std::exp(tau);
            table.rows.push_back({t, t * s[0], s[1]});
        }
        return std::hypot(s[0] - 1.0, s[1] - 1.0);
    };

    traj.final_distance = record(0.0, wz);
    {
        auto rhs = [&](double, const std::array<double, 2>& s) -> std::array<double, 2> {
            const FieldValue V = phase_field(f, kl, s[0], s[1]);
            return {V.V1, V.V2};
        };
        RKOptions rkop = rko;
        rkop.max_step = opts.table_dtau;
        rkop.initial_step = opts.table_dtau;
        const long n_tau = std::lround(opts.tau_max / opts.table_dtau);
        const double tau_table = std::log(std::max(opts.table_t_max, 1.0));
        double tau_prev = 0.0;
        bool converged = false;
        for (long i = 1; i <= n_tau; ++i) {
            const double tau = i * opts.table_dtau;
            rk45_integrate<2>(rhs, tau_prev, tau, wz, rkop,
                              [](double, const std::array<double, 2>&) { return true; });
            traj.final_distance = record(tau, wz);
            tau_prev = tau;
            if (region_violated && !opts.force) {
                traj.termination = Termination::region_exit;
                throw solve_error("integrate_leaf: trajectory left the trapping region by more "
                                  "than region_tol at tau = " + std::to_string(tau));
            }
            if (traj.final_distance <= opts.converge_tol) converged = true;
            // once on the fixed point, keep going only until the table spans
            // its tail window (fast-decaying leaves converge before that)
            if (converged && tau >= tau_table) break;
        }
        if (converged) {
            traj.termination = Termination::converged;
        } else {
            traj.termination = region_violated ? Termination::region_exit : Termination::tau_max;
        }
    }

    res.converged = (traj.termination == Termination::converged);
    res.region_ok = !region_violated;
    return res;
}

// Finite-difference residual of the leaf ODE over a table: sigma'' is taken
// from five-point divided differences of the dsigma column (Lagrange
// derivative weights, arbitrary spacing), independent of how the table was
// produced. Near the knee of the solution sigma'''' reaches ~1e5, so a
// three-point stencil would be truncation-limited; the five-point one is
// fourth order and stays far below the solver error.
inline double el_residual_max(const ProfileTable& table, const Profile& f, const ConeParams& kl) {
    double worst = 0;
    for (size_t i = 2; i + 2 < table.rows.size(); ++i) {
        const TableRow* n = &table.rows[i - 2];
        const double xc = n[2].t;
        double spp = 0;
        for (int j = 0; j < 5; ++j) {
            // w_j = d/dx of the j-th Lagrange basis at the middle node
            double denom = 1, dsum = 0;
            for (int m = 0; m < 5; ++m) {
                if (m == j) continue;
                denom *= n[j].t - n[m].t;
                double prod = 1;
                for (int r = 0; r < 5; ++r) {
                    if (r == j || r == m) continue;
                    prod *= xc - n[r].t;
                }
                dsum += prod;
            }
            spp += dsum / denom * n[j].dsigma;
        }
        const ODECoefficients pq = coefficients(f, n[2].dsigma);
        const double resid = spp + kl.k * pq.P * n[2].dsigma / n[2].t + kl.l * pq.Q / n[2].sigma;
        worst = std::max(worst, std::fabs(resid));
    }
    return worst;
}

// structural invariants of a solution table; returns an explanation or empty
inline std::string validate_table(const ProfileTable& table) {
    if (table.rows.empty()) return "empty table";
    const TableRow& first = table.rows.front();
    if (first.t != 0.0 || std::fabs(first.sigma - 1.0) > 1e-12 || first.dsigma != 0.0) {
        return "first row must be (0, 1, 0)";
    }
    for (size_t i = 0; i < table.rows.size(); ++i) {
        const TableRow& r = table.rows[i];
        if (i > 0) {
            if (!(r.t > table.rows[i - 1].t)) return "t not strictly increasing";
            if (r.dsigma < table.rows[i - 1].dsigma - 1e-12) return "dsigma decreasing";
        }
        if (!(r.sigma > r.t)) return "sigma <= t";
        if (!(r.dsigma >= 0.0 && r.dsigma < 1.0)) return "dsigma outside [0, 1)";
    }
    return {};
}

}  // namespace lawson
