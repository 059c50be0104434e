#pragma once

#include <cmath>
#include <span>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>

namespace oracle {

inline constexpr double pi = 3.14159265358979323846;

// Cosine coefficients of nodal values on x_j = a j/(n-1) by direct summation.
inline std::vector<double> direct_dct(std::span<const double> u) {
    const int n = static_cast<int>(u.size());
    const int m = n - 1;
    std::vector<double> c(n, 0.0);
    for (int k = 0; k < n; ++k) {
        double s = 0.0;
        for (int j = 0; j < n; ++j) {
            const double w = (j == 0 || j == m) ? 0.5 : 1.0;
            s += w * u[j] * std::cos(pi * static_cast<double>(k) * j / m);
        }
        const double norm = (k == 0 || k == m) ? m : 0.5 * m;
        c[k] = s / norm;
    }
    return c;
}

inline std::vector<double> direct_idct(std::span<const double> c, int n) {
    std::vector<double> u(n, 0.0);
    for (int j = 0; j < n; ++j) {
        for (std::size_t k = 0; k < c.size(); ++k) {
            u[j] += c[k] * std::cos(pi * static_cast<double>(k) * j / (n - 1));
        }
    }
    return u;
}

template <class F>
double adaptive(F f, double lo, double hi, double tol = 1e-13) {
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, lo, hi, 20, tol);
}

template <class F>
double double_exponential(F f, double lo, double hi) {
    static boost::math::quadrature::tanh_sinh<double> ts(15);
    return ts.integrate(f, lo, hi);
}

// k * integral over [0, pi] of (|A| cos x + B)^q after x = pi - 2s.
inline double family_integral(double A, double B, double q, int k) {
    const double alpha = std::abs(A);
    const double delta = B - alpha;
    auto g = [=](double s) {
        const double sn = std::sin(s);
        return std::pow(delta + 2.0 * alpha * sn * sn, q);
    };
    if (delta == 0.0) {
        // The endpoint s = 0 itself carries no mass.
        auto gs = [&](double s) {
            return s == 0.0 ? 0.0 : std::pow(2.0 * alpha, q) * std::pow(std::sin(s), 2.0 * q);
        };
        return 2.0 * k * double_exponential(gs, 0.0, 0.5 * pi);
    }
    // s = w sinh t stretches the layer of width w = sqrt(delta / 2 alpha) at s = 0.
    const double w = std::sqrt(delta / (2.0 * alpha + 1e-300));
    if (w >= 0.5) return 2.0 * k * adaptive(g, 0.0, 0.5 * pi);
    auto gt = [=](double t) { return w * std::cosh(t) * g(w * std::sinh(t)); };
    return 2.0 * k * adaptive(gt, 0.0, std::asinh(0.5 * pi / w));
}

// integral over [0, k pi] of (1 + cos x)^q = k 2^q sqrt(pi) Gamma(q + 1/2) / Gamma(q + 1).
inline double degenerate_beta(double q, int k) {
    return k * std::pow(2.0, q) * std::sqrt(pi) * boost::math::tgamma(q + 0.5) /
           boost::math::tgamma(q + 1.0);
}

// integral over [0, pi] of dx / (B + cos x).
inline double reciprocal_cosine(double B) { return pi / std::sqrt((B - 1.0) * (B + 1.0)); }

}  // namespace oracle
