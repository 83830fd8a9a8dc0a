#pragma once

// Leaves, their dilations, and the verification machinery built on top of a
// solved profile table: unit normals, the calibration field grad F(nu), a
// grid divergence check of that field, the reduced one-dimensional energy,
// and random second-variation (perturbation) tests.

#include <cmath>
#include <functional>
#include <memory>
#include <random>
#include <vector>

#include "lawson/core.hpp"
#include "lawson/integrand.hpp"
#include "lawson/ode.hpp"
#include "lawson/quadrature.hpp"
#include "lawson/rootfind.hpp"

namespace lawson {

// ---------------------------------------------------------------------------
// dense evaluation of a solved table

// Quintic-Hermite evaluator over a solution table. Second derivatives at the
// rows come from the ODE right-hand side (they are exact there), so between
// rows both sigma and sigma' carry interpolation errors far below the solver
// tolerance.
class DenseLeaf {
  public:
    static DenseLeaf from_solution(const ProfileTable& table, const Profile& f,
                                   const ConeParams& kl) {
        DenseLeaf d;
        d.init(table);
        const size_t n = d.t_.size();
        d.spp_.resize(n);
        d.sppp_.resize(n);
        for (size_t i = 0; i < n; ++i) {
            const double t = d.t_[i], sig = d.s_[i], z = d.ds_[i];
            if (t == 0.0) {
                const double fpp0 = f(0.0, 2);
                d.spp_[i] = (fpp0 > 1e-12) ? kl.l * f(0.0) / ((kl.k + 1) * fpp0)
                                           : (d.ds_[1] - d.ds_[0]) / (d.t_[1] - d.t_[0]);
                d.sppp_[i] = 0.0;  // sigma is even
                continue;
            }
            const Jet3 j = f.jet(z);
            if (!(j.d2 > 0)) {  // degenerate-origin profiles: fall back locally
                d.spp_[i] = (d.ds_[std::min(i + 1, n - 1)] - d.ds_[i - 1]) /
                            (d.t_[std::min(i + 1, n - 1)] - d.t_[i - 1]);
                d.sppp_[i] = 0.0;
                continue;
            }
            const double P = (z == 0.0) ? 1.0 : j.d1 / (z * j.d2);
            const double Q = (z * j.d1 - j.v) / j.d2;
            const double spp = -kl.k * P * z / t - kl.l * Q / sig;
            // d/ds of the coefficients, for sigma''' via the chain rule
            const double Pp = (z == 0.0)
                                  ? 0.0
                                  : (j.d2 * z * j.d2 - j.d1 * (j.d2 + z * j.d3)) / sq(z * j.d2);
            const double Qp = z - Q * j.d3 / j.d2;
            d.spp_[i] = spp;
            d.sppp_[i] = -kl.k * ((Pp * spp * z + P * spp) / t - P * z / (t * t)) -
                         kl.l * (Qp * spp / sig - Q * z / (sig * sig));
        }
        return d;
    }

    // synthetic tables (non-solutions) supply their own second derivative
    static DenseLeaf from_rows(const std::vector<TableRow>& rows,
                               const std::vector<double>& sigma_pp) {
        DenseLeaf d;
        ProfileTable t;
        t.rows = rows;
        d.init(t);
        d.spp_ = sigma_pp;
        return d;
    }

    double t_min() const { return t_.front(); }
    double t_max() const { return t_.back(); }

    double sigma(double t) const { return eval(t).first; }
    double dsigma(double t) const { return eval(t).second; }

    std::pair<double, double> eval(double t) const {
        const size_t i = locate(t);
        if (t == t_[i]) return {s_[i], ds_[i]};
        if (t == t_[i + 1]) return {s_[i + 1], ds_[i + 1]};
        // sigma from its own Hermite data and sigma' from (sigma', sigma'',
        // sigma'''), both through the shifted value form. Differentiating the
        // sigma interpolant instead would floor sigma' noise at ulp(sigma)/h.
        const double v = hermite_value(t, i, s_, ds_, spp_);
        const double dv = sppp_.empty() ? hermite_cubic_value(t, i, ds_, spp_)
                                        : hermite_value(t, i, ds_, spp_, sppp_);
        return {v, dv};
    }

  private:
    void init(const ProfileTable& table) {
        if (table.rows.size() < 2) throw std::invalid_argument("DenseLeaf: need >= 2 rows");
        t_.reserve(table.rows.size());
        for (const TableRow& r : table.rows) {
            t_.push_back(r.t);
            s_.push_back(r.sigma);
            ds_.push_back(r.dsigma);
        }
    }

    // quintic Hermite in shifted form: y0 plus O(h)-small increments, so the
    // evaluation roundoff stays at ulp(y) instead of ulp(sum of large terms)
    double hermite_value(double t, size_t i, const std::vector<double>& y,
                         const std::vector<double>& yp, const std::vector<double>& ypp) const {
        const double h = t_[i + 1] - t_[i];
        const double x = (t - t_[i]) / h;
        const double delta = y[i + 1] - y[i];
        const double m0 = yp[i] * h, m1 = yp[i + 1] * h;
        const double a0 = ypp[i] * h * h, a1 = ypp[i + 1] * h * h;
        const double x2 = x * x, x3 = x2 * x, x4 = x3 * x, x5 = x4 * x;
        const double h1 = x - 6 * x3 + 8 * x4 - 3 * x5;
        const double h2 = 0.5 * x2 - 1.5 * x3 + 1.5 * x4 - 0.5 * x5;
        const double h3 = 10 * x3 - 15 * x4 + 6 * x5;
        const double h4 = -4 * x3 + 7 * x4 - 3 * x5;
        const double h5 = 0.5 * x3 - x4 + 0.5 * x5;
        return y[i] + (delta * h3 + m0 * h1 + a0 * h2 + m1 * h4 + a1 * h5);
    }

    double hermite_cubic_value(double t, size_t i, const std::vector<double>& y,
                               const std::vector<double>& yp) const {
        const double h = t_[i + 1] - t_[i];
        const double x = (t - t_[i]) / h;
        const double delta = y[i + 1] - y[i];
        const double m0 = yp[i] * h, m1 = yp[i + 1] * h;
        const double x2 = x * x, x3 = x2 * x;
        return y[i] + (delta * (3 * x2 - 2 * x3) + m0 * (x - 2 * x2 + x3) + m1 * (x3 - x2));
    }

    size_t locate(double t) const {
        if (!(t >= t_.front() && t <= t_.back())) {
            throw std::domain_error("DenseLeaf: evaluation outside the table range");
        }
        size_t i = static_cast<size_t>(std::upper_bound(t_.begin(), t_.end(), t) - t_.begin());
        if (i == 0) i = 1;
        if (i >= t_.size()) i = t_.size() - 1;
        return i - 1;
    }

    std::vector<double> t_, s_, ds_, spp_, sppp_;
};

// ---------------------------------------------------------------------------
// leaves and the foliation by dilations

enum class LeafSide { y_side, x_side };

struct Leaf {
    LeafSide side = LeafSide::y_side;
    double scale = 1.0;
    std::shared_ptr<const DenseLeaf> unit;

    // point samples of the scaled graph: (t, sigma) -> (scale*t, scale*sigma)
};

inline Leaf make_unit_leaf(const DenseLeaf& dense, LeafSide side = LeafSide::y_side) {
    Leaf l;
    l.side = side;
    l.unit = std::make_shared<DenseLeaf>(dense);
    return l;
}

inline Leaf dilate_leaf(const Leaf& leaf, double lambda) {
    if (!(lambda > 0)) throw std::invalid_argument("dilate_leaf: lambda must be positive");
    Leaf out = leaf;
    out.scale = leaf.scale * lambda;
    return out;
}

// The unique lambda with v = lambda * sigma(u / lambda): the leaf of the
// dilation family through (u, v). Monotone in lambda since
// d/dlambda [lambda sigma(u/lambda)] = sigma(s) - s sigma'(s) > 0.
inline double leaf_through_point(const Leaf& unit_leaf, double u, double v) {
    if (unit_leaf.side == LeafSide::x_side) std::swap(u, v);
    if (!(v > u && u >= 0)) {
        throw std::domain_error("leaf_through_point: point is not strictly inside the leaf's side");
    }
    const DenseLeaf& leaf = *unit_leaf.unit;
    auto g = [&](double lam) { return lam * leaf.sigma(u / lam) - v; };
    auto dg = [&](double lam) {
        const double s = u / lam;
        auto [sv, sd] = leaf.eval(s);
        return sv - s * sd;
    };
    // bracket: g(v) >= 0 since sigma >= 1; shrink the lower end until g < 0
    double hi = v, lo = v;
    double ghi = g(hi);
    if (ghi == 0.0) return hi;
    for (int it = 0; it < 200; ++it) {
        lo *= 0.5;
        if (u / lo > leaf.t_max()) {
            throw std::domain_error("leaf_through_point: point too close to the cone for the "
                                    "table range");
        }
        if (g(lo) < 0) break;
    }
    // converge to interval collapse; the residual guarantee 1e-12*v is met
    // with large margin, and downstream difference quotients need lambda
    // smooth to machine precision
    const double lam = newton_bisect(g, dg, lo, hi, g(lo), ghi, 4e-16, 0.0);
    return lam;
}

// Euclidean unit normal of {v = sigma(u)} reduced to the (u, v) plane,
// oriented toward increasing v: (-sigma'(t), 1)/sqrt(1 + sigma'^2).
struct ReducedVector {
    double cu, cv;
};

inline ReducedVector normal_at(const Leaf& leaf, double t) {
    const double z = leaf.unit->dsigma(t);
    const double n = std::sqrt(1.0 + z * z);
    return {-z / n, 1.0 / n};
}

// grad F at the unit normal of the leaf through (u, v), reduced components.
// F is even in each radial argument, so the u-component carries the sign of
// the normal's u-component.
inline ReducedVector calibration_field(const Integrand& I, const Leaf& unit_leaf, double u,
                                       double v) {
    const bool swapped = (unit_leaf.side == LeafSide::x_side);
    const double lambda = leaf_through_point(unit_leaf, u, v);
    const double t = (swapped ? v : u) / lambda;
    const double z = unit_leaf.unit->dsigma(t);
    const double n = std::sqrt(1.0 + z * z);
    // evaluate the gradient at |nu| = (z, 1)/n, then restore the sign
    const IntegrandValue g = swapped ? phi_full(I, 1.0 / n, z / n) : phi_full(I, z / n, 1.0 / n);
    if (swapped) return {g.du, -g.dv};
    return {-g.du, g.dv};
}

// ---------------------------------------------------------------------------
// divergence check of the calibration field

struct GridSpec {
    double u_min, u_max, v_min, v_max;
    double h;
};

struct CalibrationReport {
    GridSpec grid{};
    std::array<double, 3> h_values{};             // h, h/2, h/4
    std::array<double, 3> max_abs_divergence{};
    std::array<double, 2> empirical_orders{};     // log2 ratios
    double extrapolated_limit = 0;                // Richardson limit of max |div|
    double euler_identity_max_error = 0;
    int support_inequality_violations = 0;
};

namespace detail {

// max |div grad F(nu)| over the interior of the lattice with spacing h, using
// the symmetry-reduced divergence d_u g1 + k g1/u + d_v g2 + l g2/v
inline double divergence_on_grid(const Integrand& I, const Leaf& leaf, const GridSpec& g,
                                 double h) {
    const size_t nu = static_cast<size_t>(std::lround((g.u_max - g.u_min) / h)) + 1;
    const size_t nv = static_cast<size_t>(std::lround((g.v_max - g.v_min) / h)) + 1;
    std::vector<double> g1(nu * nv), g2(nu * nv);
    const DenseLeaf& dense = *leaf.unit;
    for (size_t j = 0; j < nv; ++j) {
        const double v = g.v_min + j * h;
        double lam = v;  // warm start along the row
        for (size_t i = 0; i < nu; ++i) {
            const double u = g.u_min + i * h;
            // Newton with warm start; fall back to the bracketed solver.
            // Iterate to machine precision: leftover lambda error turns into
            // noise under the difference quotients below.
            double t = u / lam;
            bool ok = false;
            double prev_step = HUGE_VAL;
            for (int it = 0; it < 40; ++it) {
                if (t < dense.t_min() || t > dense.t_max()) break;
                auto [sv, sd] = dense.eval(t);
                const double val = lam * sv - v;
                const double der = sv - t * sd;
                const double step = val / der;
                lam -= step;
                t = u / lam;
                if (std::fabs(step) <= 4e-16 * lam ||
                    (std::fabs(step) >= prev_step && std::fabs(step) <= 1e-12 * lam)) {
                    ok = true;
                    break;
                }
                prev_step = std::fabs(step);
            }
            if (!ok) lam = leaf_through_point(leaf, u, v);
            const double z = dense.dsigma(u / lam);
            const double n = std::sqrt(1.0 + z * z);
            const IntegrandValue val = phi_full(I, z / n, 1.0 / n);
            g1[j * nu + i] = -val.du;
            g2[j * nu + i] = val.dv;
        }
    }
    double worst = 0;
    for (size_t j = 1; j + 1 < nv; ++j) {
        const double v = g.v_min + j * h;
        for (size_t i = 1; i + 1 < nu; ++i) {
            const double u = g.u_min + i * h;
            const double div = (g1[j * nu + i + 1] - g1[j * nu + i - 1]) / (2 * h) +
                               I.params.k * g1[j * nu + i] / u +
                               (g2[(j + 1) * nu + i] - g2[(j - 1) * nu + i]) / (2 * h) +
                               I.params.l * g2[j * nu + i] / v;
            worst = std::max(worst, std::fabs(div));
        }
    }
    return worst;
}

}  // namespace detail

// Runs the divergence check at spacings h, h/2, h/4, plus the Euler identity
// <grad F(nu), nu> = F(nu) and convexity support-inequality spot checks.
inline CalibrationReport divergence_check(const Integrand& I, const Leaf& unit_leaf,
                                          const GridSpec& grid, unsigned long seed = 0) {
    if (!(grid.v_min - grid.u_max >= 10.0 * grid.h)) {
        throw std::invalid_argument("divergence_check: grid must stay >= 10h away from the cone");
    }
    CalibrationReport rep;
    rep.grid = grid;
    for (int m = 0; m < 3; ++m) {
        const double h = grid.h / (1 << m);
        rep.h_values[m] = h;
        rep.max_abs_divergence[m] = detail::divergence_on_grid(I, unit_leaf, grid, h);
    }
    rep.empirical_orders[0] = std::log2(rep.max_abs_divergence[0] / rep.max_abs_divergence[1]);
    rep.empirical_orders[1] = std::log2(rep.max_abs_divergence[1] / rep.max_abs_divergence[2]);
    // Richardson limit of the second-order sequence; zero for an exactly
    // divergence-free field
    rep.extrapolated_limit =
        std::fabs((4.0 * rep.max_abs_divergence[2] - rep.max_abs_divergence[1]) / 3.0);

    // Euler identity and support inequality on a subsample
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uu(grid.u_min, grid.u_max), vv(grid.v_min, grid.v_max),
        ang(0.0, 2.0 * 3.14159265358979323846);
    double euler_worst = 0;
    int violations = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const double u = uu(rng), v = vv(rng);
        const ReducedVector X = calibration_field(I, unit_leaf, u, v);
        const double lam = leaf_through_point(unit_leaf, u, v);
        const double z = unit_leaf.unit->dsigma(u / lam);
        const double n = std::sqrt(1.0 + z * z);
        const double F_nu = phi_full(I, z / n, 1.0 / n).value;
        euler_worst = std::max(euler_worst, std::fabs(X.cu * (-z / n) + X.cv * (1.0 / n) - F_nu));
        const double a = ang(rng);
        const double wu = std::cos(a), wv = std::sin(a);
        const double F_w = phi_full(I, std::fabs(wu), std::fabs(wv)).value;
        if (X.cu * wu + X.cv * wv > F_w + 1e-12) ++violations;
    }
    rep.euler_identity_max_error = euler_worst;
    rep.support_inequality_violations = violations;
    return rep;
}

// ---------------------------------------------------------------------------
// reduced energy and second-variation tests

// Int_{ta}^{tb} t^k sigma^l f(sigma') dt over the table, Simpson-refined.
inline double reduced_energy(const Profile& f, const ConeParams& kl, const DenseLeaf& leaf,
                             double ta, double tb, double* error_estimate = nullptr) {
    if (!(ta >= leaf.t_min() && tb <= leaf.t_max() && ta <= tb)) {
        throw std::domain_error("reduced_energy: interval outside the table range");
    }
    auto integrand = [&](double t) {
        auto [s, ds] = leaf.eval(t);
        return std::pow(t, kl.k) * std::pow(s, kl.l) * f(ds);
    };
    const QuadratureResult q = simpson_refined(integrand, ta, tb, 1e-10, 1e-14, 128);
    if (error_estimate) *error_estimate = q.error_estimate;
    return q.value;
}

struct PerturbationTrial {
    double center, width, amplitude;
    double min_delta_e;   // min over the tested epsilons
    double quad_coeff;    // fitted c in  Delta E ~ c eps^2
};

struct PerturbationReport {
    std::vector<PerturbationTrial> trials;
    double min_delta_e = HUGE_VAL;
    double min_quad_coeff = HUGE_VAL;
    int violations = 0;  // trials with Delta E < -q_tol
    double q_tol = 1e-10;
};

namespace detail {

// smooth compactly supported bump exp(1 - 1/(1-x^2)) on |x| < 1
inline double bump(double x) {
    if (std::fabs(x) >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - x * x));
}

inline double bump_deriv(double x) {
    if (std::fabs(x) >= 1.0) return 0.0;
    const double d = 1.0 - x * x;
    return bump(x) * (-2.0 * x / (d * d));
}

}  // namespace detail

// Second-variation falsification test: random smooth bumps eta vanishing at
// the interval ends, Delta E(eps) = E(sigma + eps eta) - E(sigma) evaluated
// for eps in {+-eps, +-eps/2} as a single quadrature of the difference
// integrand. Criticality kills the linear term, so Delta E must be
// nonnegative up to q_tol with a positive quadratic coefficient.
inline PerturbationReport perturbation_test(const Profile& f, const ConeParams& kl,
                                            const DenseLeaf& leaf, double ta, double tb,
                                            int trials, double eps, unsigned long seed = 0) {
    if (!(eps > 0 && eps <= 0.01)) {
        throw std::invalid_argument("perturbation_test: eps must lie in (0, 0.01]");
    }
    PerturbationReport rep;
    std::mt19937_64 rng(seed);
    const double span = tb - ta;
    std::uniform_real_distribution<double> centers(ta + 0.2 * span, tb - 0.2 * span);
    std::uniform_real_distribution<double> widths(0.08 * span, 0.2 * span);
    std::uniform_real_distribution<double> amps(0.1, 0.5);
    std::bernoulli_distribution signs;

    for (int trial = 0; trial < trials; ++trial) {
        double center = 0, width = 0, amp = 0;
        bool admissible = false;
        for (int attempt = 0; attempt < 100 && !admissible; ++attempt) {
            center = centers(rng);
            width = widths(rng);
            amp = amps(rng) * (signs(rng) ? 1.0 : -1.0);
            if (center - width <= ta || center + width >= tb) continue;
            // reject draws that would push the slope out of the certified range
            admissible = true;
            for (int i = 0; i <= 50 && admissible; ++i) {
                const double t = center - width + 2.0 * width * i / 50;
                const double slope =
                    leaf.dsigma(t) + eps * std::fabs(amp) * std::fabs(detail::bump_deriv(
                                         (t - center) / width)) / width;
                if (!(slope < 1.0)) admissible = false;
            }
        }
        if (!admissible) throw solve_error("perturbation_test: could not draw an admissible bump");

        auto eta = [&](double t) { return amp * detail::bump((t - center) / width); };
        auto eta_d = [&](double t) { return amp * detail::bump_deriv((t - center) / width) / width; };
        auto delta_integrand = [&](double t, double e) {
            auto [s, ds] = leaf.eval(t);
            return std::pow(t, kl.k) *
                   (std::pow(s + e * eta(t), kl.l) * f(ds + e * eta_d(t)) -
                    std::pow(s, kl.l) * f(ds));
        };

        PerturbationTrial tr{center, width, amp, HUGE_VAL, 0.0};
        double se2 = 0, sde = 0;  // least squares of Delta E against eps^2
        for (const double e : {eps, -eps, eps / 2, -eps / 2}) {
            auto g = [&](double t) { return delta_integrand(t, e); };
            const double dE =
                simpson_refined(g, center - width, center + width, 1e-12, 1e-15, 256).value;
            tr.min_delta_e = std::min(tr.min_delta_e, dE);
            se2 += sq(e * e);
            sde += dE * e * e;
        }
        tr.quad_coeff = sde / se2;
        if (tr.min_delta_e < -rep.q_tol) ++rep.violations;
        rep.min_delta_e = std::min(rep.min_delta_e, tr.min_delta_e);
        rep.min_quad_coeff = std::min(rep.min_quad_coeff, tr.quad_coeff);
        rep.trials.push_back(tr);
    }
    return rep;
}

}  // namespace lawson
