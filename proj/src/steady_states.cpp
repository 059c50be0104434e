#include "nflow/steady_states.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "nflow/diagnostics.hpp"
#include "nflow/errors.hpp"
#include "quadrature.hpp"
#include "roots.hpp"

namespace nflow {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// 2 * integral over [0, pi/2] of (delta + 2 alpha sin^2 s)^q, which is the integral of
// (alpha cos x + alpha + delta)^q over [0, pi] after x = pi - 2s. The only possible
// singularity sits at s = 0.
double half_angle_integral(double alpha, double delta, double q) {
    constexpr double half_pi = 0.5 * kPi;
    if (alpha == 0.0) return kPi * std::pow(delta, q);

    if (delta == 0.0) {
        if (q <= -0.5) return kInf;
        // s = v^m with m (1 + 2q) = 1 absorbs the s^(2q) endpoint behaviour:
        // (2 alpha sin^2 s)^q ds = m (2 alpha)^q sinc(s)^(2q) dv.
        const double m = 1.0 / (1.0 + 2.0 * q);
        const double vmax = std::pow(half_pi, 1.0 / m);
        auto g = [m, q](double v) {
            const double s = std::pow(v, m);
            const double sinc = (s == 0.0) ? 1.0 : std::sin(s) / s;
            return m * std::pow(sinc, 2.0 * q);
        };
        return 2.0 * std::pow(2.0 * alpha, q) * detail::graded_toward_zero(g, vmax, 30);
    }

    auto h = [alpha, delta, q](double s) {
        const double sn = std::sin(s);
        return std::pow(delta + 2.0 * alpha * sn * sn, q);
    };
    // Width of the near-singular layer at s = 0.
    const double sw = std::sqrt(delta / (2.0 * alpha));
    double total = 0.0;
    if (sw >= 0.125 * kPi) {
        constexpr int panels = 8;
        for (int i = 0; i < panels; ++i) {
            total += detail::gauss_panel(h, half_pi * i / panels, half_pi * (i + 1) / panels);
        }
    } else {
        total = detail::gauss_panel(h, 0.0, sw);
        double lo = sw;
        while (lo < half_pi) {
            const double hi = std::min(2.0 * lo, half_pi);
            total += detail::gauss_panel(h, lo, hi);
            lo = hi;
        }
    }
    return 2.0 * total;
}

}  // namespace

std::string kind_name(const SteadyState& s) {
    return std::visit(overloaded{[](const ConstantState&) { return std::string("constant"); },
                                 [](const CosineState&) { return std::string("cosine"); },
                                 [](const DegenerateState&) { return std::string("degenerate"); }},
                      s);
}

double cosine_amplitude(const SteadyState& s) {
    return std::visit(overloaded{[](const ConstantState&) { return 0.0; },
                                 [](const CosineState& c) { return c.A; },
                                 [](const DegenerateState& d) {
                                     return d.phase == 0.0 ? d.A : -d.A;
                                 }},
                      s);
}

double cosine_offset(const SteadyState& s) {
    return std::visit(overloaded{[](const ConstantState& c) { return c.c; },
                                 [](const CosineState& c) { return c.B; },
                                 [](const DegenerateState& d) { return d.A; }},
                      s);
}

double phase_of(const SteadyState& s) {
    if (const auto* d = std::get_if<DegenerateState>(&s)) return d->phase;
    return 0.0;
}

double evaluate(const SteadyState& s, double x) {
    return cosine_amplitude(s) * std::cos(x) + cosine_offset(s);
}

Field sample(const SteadyState& s, GridPtr grid) {
    const double A = cosine_amplitude(s);
    const double B = cosine_offset(s);
    if (A == 0.0) return Field::constant(std::move(grid), B);
    const auto k = pi_multiple(grid->length());
    if (!k) throw DomainNotMultipleOfPi(grid->length());
    if (*k >= grid->size()) throw InvalidArgument("grid too coarse for cos x on this interval");
    // cos x = cos(k pi x / a) exactly on the grid when a = k pi.
    std::vector<double> v(grid->size());
    for (int j = 0; j < grid->size(); ++j) v[j] = A * grid->mode_value(*k, j) + B;
    return Field::from_values(std::move(grid), std::move(v));
}

SteadySet classify(double a, double p, double tol_api) {
    if (!(a > 0.0)) throw InvalidArgument("classify: interval length must be positive");
    if (!(p > 1.0)) throw InvalidArgument("classify: exponent must exceed 1");
    SteadySet s;
    s.a = a;
    s.p = p;
    s.k = pi_multiple(a, tol_api);
    s.cosine_family = s.k.has_value();
    s.degenerate_limits = s.cosine_family && p < 1.5;
    return s;
}

double cosine_family_integral(double A, double B, double p, int k) {
    if (k < 1) throw InvalidArgument("cosine_family_integral: k must be >= 1");
    if (!(p > 1.0)) throw InvalidArgument("cosine_family_integral: exponent must exceed 1");
    const double alpha = std::abs(A);
    if (!(B >= alpha)) {
        throw InvalidArgument("cosine_family_integral: requires B >= |A| (B = " +
                              std::to_string(B) + ", |A| = " + std::to_string(alpha) + ")");
    }
    if (B == 0.0) return kInf;
    return k * half_angle_integral(alpha, B - alpha, 1.0 - p);
}

double compute_A0(double p, int k, double I0) {
    if (!(p > 1.0) || !(p < 1.5)) {
        throw ExponentOutOfRange("A0 exists only for 1 < p < 3/2 (integral of (cos x + 1)^(1-p) "
                                 "diverges otherwise), got p = " + std::to_string(p));
    }
    if (!(I0 > 0.0)) throw InvalidArgument("compute_A0: I0 must be positive");
    const double numerator = cosine_family_integral(1.0, 1.0, p, k);
    return std::pow(numerator / I0, 1.0 / (p - 1.0));
}

double solve_BA(double A, double p, int k, double I0) {
    if (!(I0 > 0.0)) throw InvalidArgument("solve_BA: I0 must be positive");
    if (!(p > 1.0)) throw InvalidArgument("solve_BA: exponent must exceed 1");
    const double alpha = std::abs(A);
    auto g = [&](double B) { return cosine_family_integral(A, B, p, k) - I0; };
    constexpr double kResidualTol = 1e-10;
    const double ftol = 1e-14 * I0;

    double lo = 0.0, glo = 0.0;
    if (p < 1.5 && alpha > 0.0) {
        // Integral is finite at B = |A|; use the endpoint itself.
        lo = alpha;
        glo = g(lo);
        if (std::abs(glo) <= ftol) return alpha;
        if (glo < 0.0) {
            throw NoRoot("no B >= |A| matches I0: |A| = " + std::to_string(alpha) +
                         " exceeds A0 = " + std::to_string(compute_A0(p, k, I0)));
        }
    } else {
        double eps = std::max(alpha, 1.0);
        for (;;) {
            lo = alpha + eps;
            if (lo == alpha) throw NoRoot("solve_BA: lower bracket collapsed onto |A|");
            glo = g(lo);
            if (glo > 0.0) break;
            eps *= 0.5;
        }
    }

    double hi = std::max(2.0 * lo, lo + 1.0);
    double ghi = g(hi);
    while (ghi > 0.0) {
        lo = hi;
        glo = ghi;
        hi *= 2.0;
        ghi = g(hi);
    }
    if (ghi == 0.0) return hi;

    const auto r = detail::brent(g, lo, hi, glo, ghi, ftol);
    if (!(std::abs(r.fx) <= kResidualTol * I0)) {
        std::ostringstream msg;
        msg << "solve_BA: " << (r.collapsed ? "root not resolvable in double precision" : "root refinement stalled")
            << " (B = " << r.x << ", residual " << r.fx << ")";
        throw NoRoot(msg.str());
    }
    return r.x;
}

LimitPrediction predict_limit(const Field& u0, double p, double tol_api) {
    if (!(p > 1.0)) throw InvalidArgument("predict_limit: exponent must exceed 1");
    const double I0 = conserved_integral(u0, p);
    const double a = u0.grid().length();
    const auto k = pi_multiple(a, tol_api);
    if (!k) {
        return UniqueLimit{ConstantState{std::pow(I0 / a, -1.0 / (p - 1.0))}, I0};
    }
    FamilyLimit f;
    f.I0 = I0;
    f.p = p;
    f.k = *k;
    if (p < 1.5) f.A0 = compute_A0(p, *k, I0);
    return f;
}

SteadyMatch match_steady_state(const Field& f, double fit_tol, double tol_api) {
    const Grid& g = f.grid();
    const double a = g.length();
    const auto k = pi_multiple(a, tol_api);
    SteadyMatch m;
    m.B_fit = mean(f);
    const auto u = f.values();
    if (k) {
        std::vector<double> prod(u.size());
        for (int j = 0; j < g.size(); ++j) prod[j] = u[j] * g.mode_value(*k, j);
        m.A_fit = 2.0 / a * g.integrate(prod);
    }
    double res = 0.0;
    for (int j = 0; j < g.size(); ++j) {
        const double model = k ? m.A_fit * g.mode_value(*k, j) + m.B_fit : m.B_fit;
        res = std::max(res, std::abs(u[j] - model));
    }
    m.residual = res;
    if (res > fit_tol) return m;

    const double absA = std::abs(m.A_fit);
    if (absA <= fit_tol) {
        m.state = ConstantState{m.B_fit};
    } else if (m.B_fit - absA <= fit_tol) {
        if (m.B_fit + fit_tol < absA) return m;
        m.state = DegenerateState{absA, m.A_fit > 0.0 ? 0.0 : kPi};
    } else {
        m.state = CosineState{m.A_fit, m.B_fit};
    }
    return m;
}

}  // namespace nflow
