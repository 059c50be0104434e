#pragma once

#include <cmath>
#include <utility>
#include <vector>

namespace nflow::detail {

struct GaussRule {
    std::vector<double> nodes;    // on [-1, 1]
    std::vector<double> weights;
};

/// Gauss-Legendre rule by Newton iteration on P_n.
inline GaussRule gauss_legendre(int n) {
    GaussRule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(3.14159265358979323846 * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        r.nodes[i] = -x;
        r.nodes[n - 1 - i] = x;
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        r.weights[i] = r.weights[n - 1 - i] = w;
    }
    return r;
}

inline const GaussRule& gauss24() {
    static const GaussRule rule = gauss_legendre(24);
    return rule;
}

template <class F>
double gauss_panel(F&& f, double lo, double hi) {
    const GaussRule& g = gauss24();
    const double c = 0.5 * (lo + hi);
    const double h = 0.5 * (hi - lo);
    double s = 0.0;
    for (std::size_t i = 0; i < g.nodes.size(); ++i) s += g.weights[i] * f(c + h * g.nodes[i]);
    return s * h;
}

/// Composite rule on [0, L] with panels refined geometrically toward 0:
/// [0, L 2^-depth], ..., [L/4, L/2], [L/2, L].
template <class F>
double graded_toward_zero(F&& f, double L, int depth) {
    double s = 0.0;
    double hi = L;
    for (int j = 0; j < depth; ++j) {
        const double lo = 0.5 * hi;
        s += gauss_panel(f, lo, hi);
        hi = lo;
    }
    return s + gauss_panel(f, 0.0, hi);
}

}  // namespace nflow::detail
