#pragma once

#include <cmath>
#include <limits>
#include <utility>

namespace nflow::detail {

struct RootResult {
    double x = 0.0;
    double fx = 0.0;
    int iterations = 0;
    bool collapsed = false;  // bracket shrank to a few ulps
};

/// Brent's bracketing method (inverse quadratic / secant steps with bisection
/// fallback). Requires f(lo) and f(hi) of opposite sign. Stops when
/// |f| <= ftol or the bracket is below a few ulps.
template <class F>
RootResult brent(F&& f, double lo, double hi, double flo, double fhi, double ftol,
                 int max_iter = 200) {
    constexpr double eps = std::numeric_limits<double>::epsilon();
    double a = lo, b = hi, fa = flo, fb = fhi;
    double c = a, fc = fa, d = b - a, e = d;
    RootResult out;
    for (int it = 0; it < max_iter; ++it) {
        out.iterations = it;
        if ((fb > 0.0) == (fc > 0.0)) {
            c = a;
            fc = fa;
            d = e = b - a;
        }
        if (std::abs(fc) < std::abs(fb)) {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        const double tol1 = 2.0 * eps * std::abs(b);
        const double xm = 0.5 * (c - b);
        if (std::abs(xm) <= tol1) out.collapsed = true;
        if (std::abs(fb) <= ftol || out.collapsed || fb == 0.0) break;
        if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb) && std::isfinite(fa)) {
            const double s = fb / fa;
            double p, q;
            if (a == c) {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                const double qq = fa / fc;
                const double r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0.0) q = -q;
            p = std::abs(p);
            const double min1 = 3.0 * xm * q - std::abs(tol1 * q);
            const double min2 = std::abs(e * q);
            if (2.0 * p < std::min(min1, min2)) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += (std::abs(d) > tol1) ? d : (xm > 0.0 ? tol1 : -tol1);
        fb = f(b);
    }
    out.x = b;
    out.fx = fb;
    return out;
}

}  // namespace nflow::detail
