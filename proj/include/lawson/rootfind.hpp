#pragma once

// Safeguarded scalar root finding: Newton steps inside a maintained bracket,
// bisection whenever Newton leaves it or stalls.

#include <cmath>
#include <functional>
#include <stdexcept>

#include "lawson/core.hpp"

namespace lawson {

// Find x in [lo, hi] with f(x) = 0, given f(lo) and f(hi) of opposite sign.
// fd is the derivative (may return 0; bisection takes over).
template <class F, class DF>
double newton_bisect(F&& f, DF&& fd, double lo, double hi, double flo, double fhi,
                     double xtol = 1e-15, double ftol = 1e-13, int max_iter = 200) {
    if (flo == 0) return lo;
    if (fhi == 0) return hi;
    if ((flo > 0) == (fhi > 0)) throw std::invalid_argument("newton_bisect: root not bracketed");
    double x = 0.5 * (lo + hi);
    double fx = f(x);
    for (int it = 0; it < max_iter; ++it) {
        if (std::fabs(fx) <= ftol) return x;
        if ((fx > 0) == (fhi > 0)) {
            hi = x;
            fhi = fx;
        } else {
            lo = x;
            flo = fx;
        }
        if (hi - lo <= xtol * (1.0 + std::fabs(x))) return x;
        const double d = fd(x);
        double xn = (d != 0) ? x - fx / d : lo;
        if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
        x = xn;
        fx = f(x);
    }
    return x;
}

}  // namespace lawson
