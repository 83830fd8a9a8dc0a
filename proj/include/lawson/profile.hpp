#pragma once

// One-variable integrand profiles. A Profile is an immutable, even function
// s -> f(s), positive on [-1,1], with exact derivative access to third order.
// The two-sided integrand Phi on R^{k+l+2} is assembled from a (phi, psi)
// pair of these in integrand.hpp.

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lawson/core.hpp"
#include "lawson/jet.hpp"
#include "lawson/smoothstep.hpp"

namespace lawson {

enum class ProfileVariant { power, area, reflected, glued, fourier, tabulated };

// coefficients of f(s) = a + b s^2 + c |s|^p
struct PowerProfileParams {
    double p = 6.0;
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    double slope_at_one = 0.0;  // the enforced f'(1), r = l/(k+l) or k/(k+l)
};

// cosine-series data for profiles obtained by restricting a one-homogeneous
// Fourier approximation to a tangent line of the unit circle
struct FourierProfileData {
    int terms = 0;                      // highest harmonic index j in cos(2 j theta)
    std::vector<double> coeffs;         // alpha_j, j = 0..terms
    double corr_a = 0, corr_b = 0, corr_c = 0;  // corrector a + b cos(2t) + c cos(4t)
    bool horizontal_tangent = true;     // true: f(s) = T(s,1); false: f(s) = T(1,s)

    // trig-polynomial jet of T at angle theta (uses the Chebyshev recurrence)
    Jet3 angular_jet(double theta) const {
        double c1 = std::cos(2 * theta), s1 = std::sin(2 * theta);
        double ck = 1.0, sk = 0.0;  // cos(0), sin(0)
        Jet3 out = Jet3::constant(0.0);
        for (int j = 0; j <= terms; ++j) {
            double alpha = coeffs[static_cast<size_t>(j)];
            if (j == 1) alpha += corr_b;
            if (j == 2) alpha += corr_c;
            if (j == 0) alpha += corr_a;
            const double w = 2.0 * j;
            out.v += alpha * ck;
            out.d1 += -alpha * w * sk;
            out.d2 += -alpha * w * w * ck;
            out.d3 += alpha * w * w * w * sk;
            const double cn = ck * c1 - sk * s1;
            sk = sk * c1 + ck * s1;
            ck = cn;
        }
        return out;
    }
};

namespace detail {

struct ProfileImpl {
    virtual ~ProfileImpl() = default;
    // jet at x = |s| >= 0
    virtual Jet3 jet_abs(double x) const = 0;
    virtual ProfileVariant variant() const = 0;
};

struct PowerImpl final : ProfileImpl {
    PowerProfileParams par;
    explicit PowerImpl(PowerProfileParams p_) : par(p_) {}
    Jet3 jet_abs(double x) const override {
        const double p = par.p;
        const double xp2 = std::pow(x, p - 2.0);
        const double xp3 = (x > 0) ? std::pow(x, p - 3.0) : ((p > 3.0) ? 0.0 : HUGE_VAL);
        return {par.a + par.b * x * x + par.c * xp2 * x * x,
                2 * par.b * x + p * par.c * xp2 * x,
                2 * par.b + p * (p - 1) * par.c * xp2,
                p * (p - 1) * (p - 2) * par.c * xp3};
    }
    ProfileVariant variant() const override { return ProfileVariant::power; }
};

struct AreaImpl final : ProfileImpl {
    Jet3 jet_abs(double x) const override {
        const double r2 = 1.0 + x * x;
        const double r = std::sqrt(r2);
        return {r, x / r, 1.0 / (r2 * r), -3.0 * x / (r2 * r2 * r)};
    }
    ProfileVariant variant() const override { return ProfileVariant::area; }
};

struct GluedData {
    std::shared_ptr<const ProfileImpl> base;    // phi, used below 1-2*delta
    std::shared_ptr<const ProfileImpl> target;  // phi~, used above 1-delta
    GluingParams gluing;
};

}  // namespace detail

class Profile {
  public:
    Profile() = default;

    Jet3 jet(double s) const {
        return even_extend(impl_->jet_abs(std::fabs(s)), s);
    }

    // order-th derivative at s, order in {0,1,2,3}
    double operator()(double s, int order = 0) const {
        const Jet3 j = jet(s);
        switch (order) {
            case 0: return j.v;
            case 1: return j.d1;
            case 2: return j.d2;
            case 3: return j.d3;
            default: throw std::invalid_argument("Profile: derivative order must be 0..3");
        }
    }

    ProfileVariant variant() const { return impl_->variant(); }
    bool valid() const { return impl_ != nullptr; }

    const PowerProfileParams* power_params() const;
    const FourierProfileData* fourier_data() const;
    double glue_delta() const;  // NaN unless glued

    explicit Profile(std::shared_ptr<const detail::ProfileImpl> impl) : impl_(std::move(impl)) {}
    const detail::ProfileImpl& impl() const { return *impl_; }
    std::shared_ptr<const detail::ProfileImpl> impl_ptr() const { return impl_; }

  private:
    std::shared_ptr<const detail::ProfileImpl> impl_;
};

enum class ProfileSide { phi, psi };

// f(s) = a + b s^2 + c |s|^p with f(1) = 1 and f'(1) = r, where r = l/(k+l)
// on the phi side and k/(k+l) on the psi side. b = 0 gives the raw power
// profile (degenerately convex at the origin); b > 0 makes it uniformly
// convex with f'' >= 2b everywhere.
inline Profile power_profile(const ConeParams& kl, ProfileSide side, double p, double b) {
    if (!(p > 2.0)) throw construction_error("power_profile: exponent p must exceed 2");
    if (b < 0.0) throw construction_error("power_profile: b must be nonnegative");
    const double r =
        (side == ProfileSide::phi) ? double(kl.l) / (kl.k + kl.l) : double(kl.k) / (kl.k + kl.l);
    const double c = (r - 2 * b) / p;
    const double a = 1.0 - b - c;
    if (!(c > 0.0)) throw construction_error("power_profile: b too large, |s|^p coefficient c <= 0");
    if (!(a > 0.0)) throw construction_error("power_profile: constant coefficient a <= 0");
    PowerProfileParams par{p, a, b, c, r};
    return Profile(std::make_shared<detail::PowerImpl>(par));
}

inline Profile area_profile() { return Profile(std::make_shared<detail::AreaImpl>()); }

namespace detail {

struct ReflectedImplT final : ProfileImpl {
    std::shared_ptr<const ProfileImpl> base;
    double eps;
    ReflectedImplT(std::shared_ptr<const ProfileImpl> b, double e) : base(std::move(b)), eps(e) {}
    Jet3 jet_abs(double x) const override {
        if (x <= eps) {
            throw std::domain_error("reflected profile: evaluation at s <= eps (singular at 0)");
        }
        const Jet3 u = recip(Jet3::variable(x));        // u = 1/x
        const Jet3 psi_at_u = base->jet_abs(u.v);       // u > 0
        return Jet3::variable(x) * compose(psi_at_u, u);  // x * psi(1/x)
    }
    ProfileVariant variant() const override { return ProfileVariant::reflected; }
};

struct GluedImplT final : ProfileImpl {
    GluedData d;
    explicit GluedImplT(GluedData g) : d(std::move(g)) {}
    Jet3 jet_abs(double x) const override {
        const double lo = 1.0 - 2 * d.gluing.delta;
        if (x <= lo) return d.base->jet_abs(x);
        if (x >= 1.0 - d.gluing.delta) return d.target->jet_abs(x);
        const Jet3 eta = cutoff_jet(x, d.gluing);
        const Jet3 one_minus = Jet3::constant(1.0) - eta;
        return eta * d.base->jet_abs(x) + one_minus * d.target->jet_abs(x);
    }
    ProfileVariant variant() const override { return ProfileVariant::glued; }
};

struct FourierImplT final : ProfileImpl {
    FourierProfileData d;
    explicit FourierImplT(FourierProfileData f) : d(std::move(f)) {}
    Jet3 jet_abs(double x) const override {
        // One-homogeneous extension restricted to a tangent line of the unit
        // circle: f(x) = r * T(theta(x)), r = sqrt(1+x^2). The angular
        // derivative enters with opposite signs on the two tangent lines.
        const double r2 = 1.0 + x * x;
        const double r = std::sqrt(r2);
        const double theta = d.horizontal_tangent ? std::atan2(1.0, x) : std::atan2(x, 1.0);
        Jet3 f = d.angular_jet(theta);
        if (d.horizontal_tangent) {  // d theta / dx = -1/r^2
            f.d1 = -f.d1;
            f.d3 = -f.d3;
        }
        const double r3 = r2 * r, r5 = r2 * r3;
        return {r * f.v,
                (x * f.v + f.d1) / r,
                (f.v + f.d2) / r3,
                ((f.d1 + f.d3) - 3 * x * (f.v + f.d2)) / r5};
    }
    ProfileVariant variant() const override { return ProfileVariant::fourier; }
};

struct TabulatedImplT final : ProfileImpl {
    // samples on [0, s_max] with finite-difference slopes; cubic Hermite pieces
    std::vector<double> xs, fs, ms;
    explicit TabulatedImplT(std::vector<std::pair<double, double>> samples) {
        if (samples.size() < 4) throw construction_error("tabulated profile: need >= 4 samples");
        for (auto& [x, f] : samples) {
            xs.push_back(x);
            fs.push_back(f);
        }
        const size_t n = xs.size();
        ms.resize(n);
        for (size_t i = 0; i < n; ++i) {
            if (i == 0)
                ms[i] = (fs[1] - fs[0]) / (xs[1] - xs[0]);
            else if (i + 1 == n)
                ms[i] = (fs[n - 1] - fs[n - 2]) / (xs[n - 1] - xs[n - 2]);
            else
                ms[i] = (fs[i + 1] - fs[i - 1]) / (xs[i + 1] - xs[i - 1]);
        }
        ms[0] = 0.0;  // even function
    }
    Jet3 jet_abs(double x) const override {
        if (x < xs.front() || x > xs.back()) {
            throw std::domain_error("tabulated profile: evaluation outside sample range");
        }
        size_t i = static_cast<size_t>(std::upper_bound(xs.begin(), xs.end(), x) - xs.begin());
        if (i == 0) i = 1;
        if (i >= xs.size()) i = xs.size() - 1;
        const double h = xs[i] - xs[i - 1];
        const double u = (x - xs[i - 1]) / h;
        const double f0 = fs[i - 1], f1 = fs[i], m0 = ms[i - 1] * h, m1 = ms[i] * h;
        const double h00 = 2 * u * u * u - 3 * u * u + 1, h10 = u * u * u - 2 * u * u + u;
        const double h01 = -2 * u * u * u + 3 * u * u, h11 = u * u * u - u * u;
        const double d00 = 6 * u * u - 6 * u, d10 = 3 * u * u - 4 * u + 1;
        const double d01 = -6 * u * u + 6 * u, d11 = 3 * u * u - 2 * u;
        const double dd00 = 12 * u - 6, dd10 = 6 * u - 4, dd01 = -12 * u + 6, dd11 = 6 * u - 2;
        return {h00 * f0 + h10 * m0 + h01 * f1 + h11 * m1,
                (d00 * f0 + d10 * m0 + d01 * f1 + d11 * m1) / h,
                (dd00 * f0 + dd10 * m0 + dd01 * f1 + dd11 * m1) / (h * h),
                (12 * f0 + 6 * m0 - 12 * f1 + 6 * m1) / (h * h * h)};
    }
    ProfileVariant variant() const override { return ProfileVariant::tabulated; }
};

}  // namespace detail

// s -> s * psi(1/s). Valid for s in (eps, 1] and by even extension; the
// reflection is singular at 0, so evaluation below eps is rejected.
inline Profile reflect_profile(const Profile& psi, double eps = 0.05) {
    return Profile(std::make_shared<detail::ReflectedImplT>(psi.impl_ptr(), eps));
}

// second-order jet difference at s = 1 between two profiles
inline double jet_mismatch_at_one(const Profile& a, const Profile& b) {
    const Jet3 ja = a.jet(1.0), jb = b.jet(1.0);
    return std::max({std::fabs(ja.v - jb.v), std::fabs(ja.d1 - jb.d1), std::fabs(ja.d2 - jb.d2)});
}

// phibar = eta * phi + (1 - eta) * phi_tilde: equal to phi below 1-2*delta
// and to phi_tilde above 1-delta. Requires the two profiles to agree to
// second order at s = 1 so that the trapping inequality survives the gluing.
inline Profile glue_profiles(const Profile& phi, const Profile& phi_tilde, const GluingParams& g,
                             double jet_tol = 1e-8) {
    const double mism = jet_mismatch_at_one(phi, phi_tilde);
    if (!(mism <= jet_tol)) {
        throw construction_error("glue_profiles: second-order jets at s=1 differ by " +
                                 std::to_string(mism) + " (tolerance " + std::to_string(jet_tol) +
                                 ")");
    }
    detail::GluedData d{phi.impl_ptr(), phi_tilde.impl_ptr(), g};
    return Profile(std::make_shared<detail::GluedImplT>(std::move(d)));
}

inline Profile fourier_profile(FourierProfileData data) {
    return Profile(std::make_shared<detail::FourierImplT>(std::move(data)));
}

inline Profile tabulated_profile(std::vector<std::pair<double, double>> samples) {
    return Profile(std::make_shared<detail::TabulatedImplT>(std::move(samples)));
}

inline const PowerProfileParams* Profile::power_params() const {
    if (auto* p = dynamic_cast<const detail::PowerImpl*>(impl_.get())) return &p->par;
    return nullptr;
}

inline const FourierProfileData* Profile::fourier_data() const {
    if (auto* p = dynamic_cast<const detail::FourierImplT*>(impl_.get())) return &p->d;
    return nullptr;
}

inline double Profile::glue_delta() const {
    if (auto* p = dynamic_cast<const detail::GluedImplT*>(impl_.get())) return p->d.gluing.delta;
    return std::nan("");
}

}  // namespace lawson
