// Acceptance suite: one checkable criterion per function, each printing a
// single [PASS]/[FAIL] line (plus detail lines when a sub-check fails).
// Run all criteria with no arguments or a single one with --criterion N.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <random>
#include <string>
#include <vector>

#include "lawson/lawson.hpp"

using namespace lawson;

namespace {

struct Suite {
    ConeParams kl;
    double p, q;
    Profile phi, psi;
};

// the standard verification suite: (k,l) in {1,2,3}^2, p = 6 raised to the
// smallest even value making the compatible q >= 6, b = 0.01 on both sides
std::vector<Suite> standard_suite() {
    std::vector<Suite> out;
    for (int k = 1; k <= 3; ++k) {
        for (int l = 1; l <= 3; ++l) {
            const ConeParams kl{k, l};
            double p = 6.0, q = compat_q(kl, p);
            while (q < 6.0) {
                p += 2.0;
                q = compat_q(kl, p);
            }
            out.push_back({kl, p, q, power_profile(kl, ProfileSide::phi, p, 0.01),
                           power_profile(kl, ProfileSide::psi, q, 0.01)});
        }
    }
    return out;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

bool check(bool ok, const char* what, double got, double want) {
    if (!ok) std::printf("       failed: %s (got %.9g, bound %.9g)\n", what, got, want);
    return ok;
}

// 1. certification suite: margins positive on both sides, E(1) = 0 to 1e-9,
//    under 5 seconds total
bool criterion_1() {
    const auto t0 = std::chrono::steady_clock::now();
    bool ok = true;
    for (const Suite& s : standard_suite()) {
        const CertificationReport a = certify_profile(s.phi, s.kl);
        const CertificationReport b = certify_profile(s.psi, s.kl.swapped());
        for (const CertificationReport* r : {&a, &b}) {
            ok &= check(r->one_jet_ok, "one_jet_ok", r->one_jet_ok, 1);
            ok &= check(r->kappa_estimate > 0, "kappa_estimate > 0", r->kappa_estimate, 0);
            ok &= check(r->second_deriv_margin > 0, "second_deriv_margin > 0",
                        r->second_deriv_margin, 0);
            ok &= check(r->monotonicity_margin > 0, "monotonicity_margin > 0",
                        r->monotonicity_margin, 0);
        }
        const double e1_phi = std::fabs(trapping_quantity(s.phi, s.kl, 1.0));
        const double e1_psi = std::fabs(trapping_quantity(s.psi, s.kl.swapped(), 1.0));
        ok &= check(e1_phi <= 1e-9, "|E(1)| phi side", e1_phi, 1e-9);
        ok &= check(e1_psi <= 1e-9, "|E(1)| psi side", e1_psi, 1e-9);
    }
    const double dt = seconds_since(t0);
    ok &= check(dt < 5.0, "runtime < 5 s", dt, 5.0);
    return ok;
}

// 2. exponent-inequality anchors for the raw k=l=1 power profile
bool criterion_2() {
    const ConeParams kl{1, 1};
    const CertificationReport p6 =
        certify_profile(power_profile(kl, ProfileSide::phi, 6.0, 0.0), kl);
    const CertificationReport p5 =
        certify_profile(power_profile(kl, ProfileSide::phi, 5.0, 0.0), kl);
    bool ok = true;
    ok &= check(p6.p_inequalities_ok, "p=6 passes both inequalities", p6.p_inequalities_ok, 1);
    ok &= check(!p5.first_order_ok, "p=5 fails the first-order inequality", p5.first_order_ok, 0);
    return ok;
}

// 3. leaf integration over the suite: convergence to the fixed point,
//    no trapping excursions, small ODE residual, bounded runtime per leaf
bool criterion_3() {
    bool ok = true;
    for (const Suite& s : standard_suite()) {
        for (int side = 0; side < 2; ++side) {
            const Profile& prof = side == 0 ? s.phi : s.psi;
            const ConeParams kl = side == 0 ? s.kl : s.kl.swapped();
            const auto t0 = std::chrono::steady_clock::now();
            const LeafResult res = integrate_leaf(prof, kl);
            const double dt = seconds_since(t0);
            const double resid = el_residual_max(res.table, prof, kl);
            ok &= check(res.converged, "converged", res.converged, 1);
            ok &= check(res.trajectory.final_distance <= 1e-10, "final distance",
                        res.trajectory.final_distance, 1e-10);
            ok &= check(res.trajectory.min_region_margin > -1e-8, "region margin",
                        res.trajectory.min_region_margin, -1e-8);
            ok &= check(resid <= 1e-6, "EL residual", resid, 1e-6);
            ok &= check(dt < 10.0, "runtime per leaf < 10 s", dt, 10.0);
        }
    }
    return ok;
}

// 4. tail-rate anchors on the window [1e2, 1e4]
bool criterion_4() {
    bool ok = true;
    {
        const ConeParams kl{1, 1};
        const Profile f = power_profile(kl, ProfileSide::phi, 6.0, 0.01);
        const LeafResult res = integrate_leaf(f, kl);
        const AsymptoticFit fit =
            fit_tail(DenseLeaf::from_solution(res.table, f, kl), 1e2, 1e4, 0.291702);
        ok &= check(fit.rel_err <= 0.02, "k=l=1 b=0.01 rate vs 0.291702 (2%)", fit.mu_hat,
                    0.291702);
    }
    {
        const ConeParams kl{3, 3};
        const LeafResult res = integrate_leaf(area_profile(), kl);
        const AsymptoticFit fit =
            fit_tail(DenseLeaf::from_solution(res.table, area_profile(), kl), 1e2, 1e4, 1.083187);
        ok &= check(fit.rel_err <= 0.02, "area k=l=3 rate vs 1.083187 (2%)", fit.mu_hat, 1.083187);
    }
    {
        // raw compatible pair: the shared-rate invariant across the two sides
        const ConeParams kl{1, 2};
        SolverOptions opts;
        opts.force = true;  // raw profiles fail the strict-convexity margin at s=0 only
        const Profile phi = power_profile(kl, ProfileSide::phi, 6.0, 0.0);
        const Profile psi = power_profile(kl, ProfileSide::psi, 11.0, 0.0);
        const LeafResult ra = integrate_leaf(phi, kl, opts);
        const LeafResult rb = integrate_leaf(psi, kl.swapped(), opts);
        const AsymptoticFit fa = fit_tail(DenseLeaf::from_solution(ra.table, phi, kl), 1e2, 1e4);
        const AsymptoticFit fb =
            fit_tail(DenseLeaf::from_solution(rb.table, psi, kl.swapped()), 1e2, 1e4);
        const double gap = std::fabs(fa.mu_hat - fb.mu_hat) / fb.mu_hat;
        ok &= check(gap <= 0.02, "shared rate across sides (2%)", gap, 0.02);
    }
    return ok;
}

// 5. supremum of the decay rate over raw admissible integrands
bool criterion_5() {
    bool ok = true;
    ok &= check(std::fabs(mu_max({1, 1}) - 0.2763932) <= 1e-6, "mu_max(1,1)", mu_max({1, 1}),
                0.2763932);
    ok &= check(std::fabs(mu_max({3, 3}) - 0.1230266) <= 1e-6, "mu_max(3,3)", mu_max({3, 3}),
                0.1230266);
    std::mt19937_64 rng(0);
    std::uniform_int_distribution<int> ks(1, 5);
    std::uniform_real_distribution<double> ps(6.0, 24.0);
    int tested = 0;
    while (tested < 20) {
        const int k = ks(rng), l = ks(rng);
        const double p = ps(rng);
        const double q = 1.0 + l * (p - 1.0) / k;
        if (q < 6.0) continue;
        ++tested;
        const double mu = mu_theory(power_profile({k, l}, ProfileSide::phi, p, 0.0), {k, l});
        ok &= check(mu <= mu_max({k, l}) + 1e-12, "raw rate below the supremum", mu,
                    mu_max({k, l}));
    }
    return ok;
}

// 6. quartic supersolution of the area leaf equation
bool criterion_6() {
    bool ok = true;
    const SupersolutionReport rep = area_supersolution_check(3, log_spaced(1e-2, 1e3, 400));
    // L decays below double roundoff far out; 1e-14 is the numerical zero
    ok &= check(rep.max_L <= 1e-14, "k=3: L <= 0 at 400 samples", rep.max_L, 0.0);
    const double L1 = area_supersolution_L(3, 1.0);
    ok &= check(std::fabs(L1 - (-0.1082)) <= 1e-3, "k=3: L(1) = -0.1082 +- 1e-3", L1, -0.1082);
    const SupersolutionReport rep1 = area_supersolution_check(1, log_spaced(0.5, 2.0, 50));
    ok &= check(rep1.max_L > 0, "k=1: a positive L value exists", rep1.max_L, 0.0);
    return ok;
}

// 7. divergence of the calibration field on the standard grid
bool criterion_7() {
    const auto t0 = std::chrono::steady_clock::now();
    const ConeParams kl{1, 1};
    const Profile f = power_profile(kl, ProfileSide::phi, 6.0, 0.01);
    const Integrand I = build_integrand(kl, 6.0, 6.0, 0.01, 0.01);
    const LeafResult res = integrate_leaf(f, kl);
    const Leaf unit = make_unit_leaf(DenseLeaf::from_solution(res.table, f, kl));
    const CalibrationReport rep = divergence_check(I, unit, GridSpec{0.2, 0.8, 1.2, 2.0, 1e-3}, 0);
    const double dt = seconds_since(t0);
    bool ok = true;
    ok &= check(rep.empirical_orders[0] >= 1.8, "order h -> h/2", rep.empirical_orders[0], 1.8);
    ok &= check(rep.empirical_orders[1] >= 1.8, "order h/2 -> h/4", rep.empirical_orders[1], 1.8);
    ok &= check(rep.extrapolated_limit <= 1e-6, "extrapolated limit", rep.extrapolated_limit, 1e-6);
    ok &= check(rep.euler_identity_max_error <= 1e-10, "euler identity",
                rep.euler_identity_max_error, 1e-10);
    ok &= check(dt < 60.0, "runtime < 60 s", dt, 60.0);
    std::printf("       max|div| = {%.3e, %.3e, %.3e}\n", rep.max_abs_divergence[0],
                rep.max_abs_divergence[1], rep.max_abs_divergence[2]);
    return ok;
}

// 8. reduced-energy minimality: seeded perturbations on every certified leaf
//    plus the non-solution control
bool criterion_8() {
    bool ok = true;
    for (const Suite& s : standard_suite()) {
        const LeafResult res = integrate_leaf(s.phi, s.kl);
        const DenseLeaf dense = DenseLeaf::from_solution(res.table, s.phi, s.kl);
        const PerturbationReport rep =
            perturbation_test(s.phi, s.kl, dense, 0.1, 0.9, 20, 0.01, /*seed=*/0);
        ok &= check(rep.min_delta_e >= -1e-10, "Delta E >= -1e-10", rep.min_delta_e, -1e-10);
        ok &= check(rep.min_quad_coeff > 0, "positive quadratic coefficient", rep.min_quad_coeff,
                    0.0);
    }
    {
        // non-solution control: sigma = 1 + t^2/2
        std::vector<TableRow> rows;
        std::vector<double> spp;
        for (int i = 0; i <= 20000; ++i) {
            const double t = 1.0 * i / 20000.0;
            rows.push_back({t, 1.0 + 0.5 * t * t, t});
            spp.push_back(1.0);
        }
        const DenseLeaf control = DenseLeaf::from_rows(rows, spp);
        const Profile f = power_profile({1, 1}, ProfileSide::phi, 6.0, 0.01);
        const PerturbationReport rep = perturbation_test(f, {1, 1}, control, 0.1, 0.9, 20, 0.01, 0);
        ok &= check(rep.min_delta_e < -1e-6, "control violates by < -1e-6", rep.min_delta_e,
                    -1e-6);
    }
    return ok;
}

// 9. numeric eigen-decomposition matches the closed forms over the suite
bool criterion_9() {
    bool ok = true;
    for (const Suite& s : standard_suite()) {
        for (int side = 0; side < 2; ++side) {
            const LinearizationData d = linearization(side == 0 ? s.phi : s.psi,
                                                      side == 0 ? s.kl : s.kl.swapped());
            const Eigen2 e = eigen2_numeric(d.M);
            ok &= check(std::fabs(e.lambda_plus - d.lambda_plus) <= 1e-10, "lambda_plus",
                        e.lambda_plus, d.lambda_plus);
            ok &= check(std::fabs(e.lambda_minus - d.lambda_minus) <= 1e-10, "lambda_minus",
                        e.lambda_minus, d.lambda_minus);
            ok &= check(std::fabs(e.slope_plus - d.slope_plus) <= 1e-10, "slope_plus",
                        e.slope_plus, d.slope_plus);
            ok &= check(std::fabs(e.slope_minus - d.slope_minus) <= 1e-10, "slope_minus",
                        e.slope_minus, d.slope_minus);
        }
    }
    return ok;
}

// 10. analytic-approximation path at 64 harmonics on the glued (1,2) integrand
bool criterion_10() {
    bool ok = true;
    // corrector anchor
    const CorrectorCoeffs c = solve_corrector(0.01, -0.02, 0.16);
    ok &= check(std::fabs(c.a - 0.02) <= 1e-14 && std::fabs(c.b - 0.01) <= 1e-14 &&
                    std::fabs(c.c - 0.01) <= 1e-14,
                "corrector solve reproduces (0.02, 0.01, 0.01)", c.a, 0.02);

    const ConeParams kl{1, 2};
    const double p = 6.0, q = compat_q(kl, p);
    const Integrand I = build_integrand(kl, p, q, 0.01, 0.01 * (p - 2) / (q - 2),
                                        GluingParams(0.05));
    try {
        const Integrand F = fourier_approximate(I, 64);
        const CertificationReport a = certify_profile(F.phi, kl);
        const CertificationReport b = certify_profile(F.psi, kl.swapped());
        ok &= check(a.verdict && b.verdict, "restricted profiles certify", a.verdict && b.verdict,
                    1);
        double worst = 0;
        for (int i = 0; i <= 1000; ++i) {
            const double s = double(i) / 1000;
            for (int ord = 0; ord <= 2; ++ord) {
                worst = std::max(worst, std::fabs(F.phi(s, ord) - I.phi(s, ord)));
            }
        }
        ok &= check(worst <= 1e-6, "max |phi_N - phi| orders 0-2 on [0,1]", worst, 1e-6);
    } catch (const std::exception& e) {
        std::printf("       failed: fourier_approximate at 64 terms: %s\n", e.what());
        ok = false;
    }
    return ok;
}

}  // namespace

int main(int argc, char** argv) {
    int only = 0;
    for (int i = 1; i + 1 < argc + 1; ++i) {
        if (i + 1 < argc && std::strcmp(argv[i], "--criterion") == 0) only = std::atoi(argv[i + 1]);
    }
    bool (*criteria[])() = {criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
                            criterion_6, criterion_7, criterion_8, criterion_9, criterion_10};
    const char* names[] = {
        "certification suite margins and E(1) cancellation",
        "exponent inequality anchors (p=6 passes, p=5 fails)",
        "leaf integration: convergence, trapping, residual",
        "tail-rate anchors on [1e2, 1e4]",
        "rate supremum values and dominance",
        "area supersolution barrier",
        "calibration divergence check",
        "reduced-energy minimality under perturbations",
        "linearization eigen consistency",
        "analytic approximation path at 64 harmonics",
    };
    bool all = true;
    for (int i = 1; i <= 10; ++i) {
        if (only != 0 && only != i) continue;
        bool ok = false;
        try {
            ok = criteria[i - 1]();
        } catch (const std::exception& e) {
            std::printf("       exception: %s\n", e.what());
        }
        std::printf("[%s] criterion %d: %s\n", ok ? "PASS" : "FAIL", i, names[i - 1]);
        all = all && ok;
    }
    return all ? 0 : 1;
}
