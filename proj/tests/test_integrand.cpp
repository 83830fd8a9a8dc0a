#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "lawson/integrand.hpp"

using namespace lawson;
using Catch::Approx;

TEST_CASE("compatibility relation") {
    CHECK(compat_q({1, 2}, 6.0) == Approx(11.0).margin(1e-15));   // 2*5 = 1*(q-1)
    CHECK(compat_q({2, 2}, 6.0) == Approx(6.0).margin(1e-15));    // symmetric case: q = p
    CHECK(compat_q({2, 1}, 6.0) == Approx(3.5).margin(1e-15));    // 1*5 = 2*(q-1)
    CHECK_THROWS_AS(compat_q({5, 1}, 6.0), construction_error);   // q = 2 <= 2
}

TEST_CASE("build_integrand with compatible exponents matches diagonal jets") {
    const Integrand I = build_integrand({1, 2}, 6.0, 11.0, 0.0, 0.0);
    CHECK(I.diagonal_jet_mismatch < 1e-12);
    // symmetric case: phi and psi coincide
    const Integrand S = build_integrand({1, 1}, 6.0, 6.0, 0.01, 0.01);
    for (double s : {0.2, 0.7, 1.0}) CHECK(S.phi(s) == S.psi(s));
}

TEST_CASE("build_integrand rejects incompatible exponents without gluing") {
    CHECK_THROWS_AS(build_integrand({1, 2}, 6.0, 7.0, 0.0, 0.0), construction_error);
}

TEST_CASE("build_integrand with gluing produces a smooth diagonal") {
    const ConeParams kl{1, 2};
    const double p = 6.0, q = compat_q(kl, p);
    const double b_phi = 0.01, b_psi = b_phi * (p - 2) / (q - 2);
    const Integrand I = build_integrand(kl, p, q, b_phi, b_psi, GluingParams(0.05));
    CHECK(I.phi.variant() == ProfileVariant::glued);
    CHECK(I.delta.has_value());
    // near the diagonal the phi side is literally the reflected psi side
    const Profile refl = reflect_profile(I.psi);
    for (double s : {0.96, 0.98, 1.0}) {
        CHECK(I.phi(s) == Approx(refl(s)).margin(1e-15));
        CHECK(I.phi(s, 2) == Approx(refl(s, 2)).margin(1e-13));
    }
}

TEST_CASE("two-sided values at the axes and the diagonal") {
    const Integrand I = build_integrand({1, 2}, 6.0, 11.0, 0.0, 0.0);
    CHECK(phi_full(I, 0.0, 1.0).value == Approx(I.phi(0.0)).margin(1e-15));
    CHECK(phi_full(I, 1.0, 0.0).value == Approx(I.psi(0.0)).margin(1e-15));
    CHECK(phi_full(I, 1.0, 1.0).value == Approx(1.0).margin(1e-14));
    CHECK_THROWS_AS(phi_full(I, 0.0, 0.0), std::domain_error);
}

TEST_CASE("one-homogeneity: Euler identity and scaling") {
    const Integrand I = build_integrand({2, 3}, 6.0, compat_q({2, 3}, 6.0), 0.0, 0.0);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> uv(0.05, 2.0), lam(0.1, 5.0);
    for (int i = 0; i < 300; ++i) {
        const double u = uv(rng), v = uv(rng), c = lam(rng);
        const IntegrandValue f = phi_full(I, u, v);
        CHECK(u * f.du + v * f.dv == Approx(f.value).margin(1e-12));
        CHECK(phi_full(I, c * u, c * v).value == Approx(c * f.value).epsilon(1e-13));
    }
}

TEST_CASE("gradient matches centered differences at second order") {
    const Integrand I = build_integrand({1, 2}, 6.0, 11.0, 0.01, 0.01 * 4.0 / 9.0,
                                        GluingParams(0.05));
    auto gradient_error = [&](double h) {
        double worst = 0;
        for (double u : {0.3, 0.6, 0.9}) {
            for (double v : {1.1, 1.5}) {
                const IntegrandValue f = phi_full(I, u, v);
                const double fdu = (phi_full(I, u + h, v).value - phi_full(I, u - h, v).value) / (2 * h);
                const double fdv = (phi_full(I, u, v + h).value - phi_full(I, u, v - h).value) / (2 * h);
                worst = std::max({worst, std::fabs(fdu - f.du), std::fabs(fdv - f.dv)});
            }
        }
        return worst;
    };
    const double e4 = gradient_error(1e-4), e5 = gradient_error(1e-5);
    CHECK(e4 < 1e-6);
    // O(h^2): two orders of magnitude smaller at a tenth of the step
    CHECK(e4 / e5 > 30.0);
    CHECK(e4 / e5 < 300.0);
}

TEST_CASE("one-sided second derivatives agree across the diagonal when compatible") {
    const Integrand I = build_integrand({1, 2}, 6.0, 11.0, 0.0, 0.0);
    // second derivative of F along the segment u+v=2 crossing the diagonal;
    // one-sided stencils are centered at -+2h, so extrapolate the O(h) term away
    auto F = [&](double x) { return phi_full(I, 1.0 + x, 1.0 - x).value; };
    auto left_at = [&](double h) { return (F(-3 * h) - 2 * F(-2 * h) + F(-h)) / (h * h); };
    auto right_at = [&](double h) { return (F(h) - 2 * F(2 * h) + F(3 * h)) / (h * h); };
    const double h = 1e-4;
    const double left = 2 * left_at(h / 2) - left_at(h);
    const double right = 2 * right_at(h / 2) - right_at(h);
    CHECK(left == Approx(right).margin(1e-5));  // C^{2,1}: second jets match
}
