#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "lawson/certify.hpp"
#include "lawson/ode.hpp"
#include "lawson/profile.hpp"

using namespace lawson;
using Catch::Approx;

TEST_CASE("trapping quantity vanishes at s=1 whenever the jet condition holds") {
    // forced symbolically: the f'' term carries (1-s) and the other two cancel
    for (int k = 1; k <= 3; ++k) {
        for (int l = 1; l <= 3; ++l) {
            const ConeParams kl{k, l};
            const Profile f = power_profile(kl, ProfileSide::phi, 6.0, 0.01);
            CHECK(std::fabs(trapping_quantity(f, kl, 1.0)) < 1e-12);
        }
    }
}

TEST_CASE("trapping quantity at s=0 has the hand value") {
    // k=l=1, p=6, b=0.01: E(0) = l (k+l-1)/(k+l+1) a - (k+l+1)/2 * 2b
    const Profile f = power_profile({1, 1}, ProfileSide::phi, 6.0, 0.01);
    CHECK(trapping_quantity(f, {1, 1}, 0.0) == Approx(0.91 / 3.0 - 1.5 * 0.02).margin(1e-14));
}

TEST_CASE("raw area profile fails the jet condition") {
    const Profile area = area_profile();
    const CertificationReport rep = certify_profile(area, {1, 1});
    CHECK_FALSE(rep.one_jet_ok);  // area value at 1 is sqrt(2), slope 1/sqrt(2)
    CHECK_FALSE(rep.verdict);
    // E(1) itself still vanishes for k=l: at s=1 the expression only sees the
    // scale-invariant ratio f'(1)/f(1) = 1/2, which the area profile satisfies
    CHECK(std::fabs(trapping_quantity(area, {1, 1}, 1.0)) < 1e-12);
    // for k != l the ratio is wrong and E(1) is genuinely nonzero
    CHECK(std::fabs(trapping_quantity(area, {1, 2}, 1.0)) > 1e-3);
}

TEST_CASE("certification of the regularized k=l=1 profile") {
    const Profile f = power_profile({1, 1}, ProfileSide::phi, 6.0, 0.01);
    const CertificationReport rep = certify_profile(f, {1, 1});
    CHECK(rep.one_jet_ok);
    CHECK(rep.second_deriv_margin == Approx(0.42).margin(1e-12));
    CHECK(rep.kappa_estimate > 0.0);
    CHECK(rep.convexity_margin == Approx(0.02).margin(1e-14));
    CHECK(rep.monotonicity_margin > 0.0);
    CHECK(rep.p_inequalities_ok);
    CHECK(rep.verdict);
}

TEST_CASE("exponent inequalities: p=6 passes, p=5 fails the first-order bound") {
    const ConeParams kl{1, 1};
    CHECK(first_order_inequality(kl, 6.0));
    CHECK_FALSE(first_order_inequality(kl, 5.0));  // needs p - 1 > 4
    // (p-1)^2 - 4.5 (p-1) + 2 at p=6 equals 4.5 >= 0
    CHECK(second_order_inequality(kl, 6.0));

    const CertificationReport rep6 =
        certify_profile(power_profile(kl, ProfileSide::phi, 6.0, 0.0), kl);
    CHECK(rep6.p_inequalities_ok);
    const CertificationReport rep5 =
        certify_profile(power_profile(kl, ProfileSide::phi, 5.0, 0.0), kl);
    CHECK_FALSE(rep5.first_order_ok);
    CHECK_FALSE(rep5.p_inequalities_ok);
    CHECK_FALSE(rep5.verdict);
}

TEST_CASE("b = 0.1 keeps the construction but breaks the curvature threshold") {
    // f''(1) = 2.5 - 8b = 1.7 < 2, the threshold value for k=l=1
    const Profile f = power_profile({1, 1}, ProfileSide::phi, 6.0, 0.1);
    const CertificationReport rep = certify_profile(f, {1, 1});
    CHECK(rep.second_deriv_margin == Approx(1.7 - 2.0).margin(1e-12));
    CHECK_FALSE(rep.verdict);
}

TEST_CASE("kappa estimate survives a 10x finer grid") {
    const Profile f = power_profile({2, 3}, ProfileSide::phi, 6.0, 0.01);
    const ConeParams kl{2, 3};
    const CertificationReport rep = certify_profile(f, kl);
    REQUIRE(rep.kappa_estimate > 0.0);
    const CertificationReport fine = certify_profile(f, kl, 100001);
    CHECK(fine.kappa_estimate >= 0.9 * rep.kappa_estimate);
    // and E >= kappa (1 - s) holds at each fine sample
    for (int i = 0; i + 1 < 100001; i += 97) {
        const double s = double(i) / 100000;
        CHECK(trapping_quantity(f, kl, s) >= 0.9 * rep.kappa_estimate * (1.0 - s));
    }
}

TEST_CASE("exchange duality: the psi side certifies against swapped parameters") {
    const ConeParams kl{1, 2};
    const Profile psi = power_profile(kl, ProfileSide::psi, 11.0, 0.01);
    const CertificationReport rep = certify_profile(psi, kl.swapped());
    CHECK(rep.one_jet_ok);  // psi(1) = 1, psi'(1) = k/(k+l)
    CHECK(rep.verdict);

    // symmetric case: both sides produce the identical report
    const ConeParams sym{2, 2};
    const Profile a = power_profile(sym, ProfileSide::phi, 6.0, 0.01);
    const Profile b = power_profile(sym, ProfileSide::psi, 6.0, 0.01);
    const CertificationReport ra = certify_profile(a, sym), rb = certify_profile(b, sym.swapped());
    CHECK(ra.kappa_estimate == rb.kappa_estimate);
    CHECK(ra.second_deriv_margin == rb.second_deriv_margin);
}

TEST_CASE("positive monotonicity margin forces Q(0) < 0") {
    for (double b : {0.005, 0.01, 0.02}) {
        const Profile f = power_profile({1, 2}, ProfileSide::phi, 6.0, b);
        const CertificationReport rep = certify_profile(f, {1, 2});
        REQUIRE(rep.monotonicity_margin > 0.0);
        CHECK(coefficients(f, 0.0).Q < 0.0);
    }
}

TEST_CASE("raw power profile has zero convexity margin at the origin") {
    const Profile f = power_profile({1, 2}, ProfileSide::phi, 6.0, 0.0);
    const CertificationReport rep = certify_profile(f, {1, 2});
    CHECK(rep.convexity_margin == 0.0);
    CHECK(rep.kappa_estimate > 0.0);  // trapping itself is fine for raw p = 6
    CHECK_FALSE(rep.verdict);         // strict uniform convexity is what fails
}

TEST_CASE("certification suite: all (k,l) in {1,2,3}^2 with raised exponents") {
    for (int k = 1; k <= 3; ++k) {
        for (int l = 1; l <= 3; ++l) {
            const ConeParams kl{k, l};
            double p = 6.0, q = compat_q(kl, p);
            while (q < 6.0) {
                p += 2.0;
                q = compat_q(kl, p);
            }
            const CertificationReport phi_rep =
                certify_profile(power_profile(kl, ProfileSide::phi, p, 0.01), kl);
            const CertificationReport psi_rep =
                certify_profile(power_profile(kl, ProfileSide::psi, q, 0.01), kl.swapped());
            INFO("k=" << k << " l=" << l << " p=" << p << " q=" << q);
            CHECK(phi_rep.verdict);
            CHECK(psi_rep.verdict);
        }
    }
}
