#include "nflow/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "nflow/errors.hpp"

namespace nflow {

namespace {

constexpr double kUnitEigenvalueTol = 1e-12;

}  // namespace

double energy(const Field& f) {
    const Grid& g = f.grid();
    const auto c = f.coeffs();
    double e = 0.0;
    for (int k = 1; k < g.size(); ++k) {
        const double w = g.wavenumber(k);
        e += c[k] * c[k] * g.mode_norm(k) * (w * w - 1.0);
    }
    return e;
}

double energy_quadrature(const Field& f) {
    const Grid& g = f.grid();
    const int n = g.size();
    const int m = n - 1;
    const auto c = f.coeffs();
    const auto u = f.values();
    const double ubar = mean(f);
    std::vector<double> integrand(n);
    for (int j = 0; j < n; ++j) {
        double ux = 0.0;
        for (int k = 1; k < n; ++k) {
            const long r = (static_cast<long>(k) * j) % (2 * m);
            ux -= c[k] * g.wavenumber(k) * std::sin(kPi * static_cast<double>(r) / m);
        }
        const double d = u[j] - ubar;
        integrand[j] = ux * ux - d * d;
    }
    return g.integrate(integrand);
}

double conserved_integral(const Field& f, double p) { return integrate_power(f, 1.0 - p); }

double dissipation_rate(const Field& f, const Field& f_t, double p) {
    const auto u = f.values();
    const auto ut = f_t.values();
    if (ut.size() != u.size()) throw InvalidArgument("dissipation_rate: size mismatch");
    require_positive(u);
    std::vector<double> integrand(u.size());
    for (std::size_t j = 0; j < u.size(); ++j) integrand[j] = ut[j] * ut[j] / std::pow(u[j], p);
    return -2.0 * f.grid().integrate(integrand);
}

double lyapunov(const Field& f, double p) {
    if (p == 2.0) {
        const auto u = f.values();
        require_positive(u);
        std::vector<double> logs(u.size());
        std::transform(u.begin(), u.end(), logs.begin(), [](double v) { return std::log(v); });
        return f.grid().integrate(logs);
    }
    return integrate_power(f, 2.0 - p);
}

Field residual(const Field& f) {
    const Grid& g = f.grid();
    std::vector<double> c(f.coeffs().begin(), f.coeffs().end());
    // Constants cancel against the mean; mode k is scaled by 1 - (k pi/a)^2.
    c[0] = 0.0;
    for (int k = 1; k < g.size(); ++k) {
        const double w = g.wavenumber(k);
        c[k] *= 1.0 - w * w;
    }
    return Field::from_coeffs(f.grid_ptr(), std::move(c));
}

int ls_extremal_mode(double a) {
    if (!(a > 0.0)) throw InvalidArgument("ls_constant: interval length must be positive");
    for (int k = 1;; ++k) {
        const double w = k * kPi / a;
        if (w * w - 1.0 > kUnitEigenvalueTol) return k;
    }
}

double ls_constant(double a) {
    const double w = ls_extremal_mode(a) * kPi / a;
    return 1.0 / (w * w - 1.0);
}

LsCheck ls_check(const Field& f) {
    LsCheck out;
    out.lhs = energy(f);
    const Field r = residual(f);
    std::vector<double> sq(r.values().begin(), r.values().end());
    for (double& v : sq) v *= v;
    out.rhs = f.grid().integrate(sq);
    out.holds = out.lhs <= ls_constant(f.grid().length()) * out.rhs + kLsTolerance;
    return out;
}

double closure_integral(const Field& f, double p, double tol) {
    const Grid& g = f.grid();
    const auto k = pi_multiple(g.length(), tol);
    if (!k) throw DomainNotMultipleOfPi(g.length());
    const auto u = f.values();
    require_positive(u);
    std::vector<double> integrand(u.size());
    for (int j = 0; j < g.size(); ++j) {
        integrand[j] = g.mode_value(*k, j) * std::pow(u[j], 1.0 - p);
    }
    return g.integrate(integrand);
}

DiagnosticsRecord make_record(const Field& f, double p, double t, const Field* u_t) {
    DiagnosticsRecord r;
    r.t = t;
    r.energy = energy(f);
    r.conserved = conserved_integral(f, p);
    r.mean = mean(f);
    r.min_u = f.min();
    r.max_u = f.max();
    const Field res = residual(f);
    double rinf = 0.0;
    for (double v : res.values()) rinf = std::max(rinf, std::abs(v));
    r.residual_inf = rinf;
    if (u_t != nullptr) r.dissipation = dissipation_rate(f, *u_t, p);
    r.lyapunov = lyapunov(f, p);
    if (pi_multiple(f.grid().length())) r.closure = closure_integral(f, p);
    return r;
}

}  // namespace nflow
