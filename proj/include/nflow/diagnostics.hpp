#pragma once

#include <optional>

#include "nflow/spectral.hpp"

namespace nflow {

/// Snapshot of the monitored quantities of a trajectory at time t.
struct DiagnosticsRecord {
    long step = 0;
    double t = 0.0;
    double dt = 0.0;
    double energy = 0.0;     // E[u]
    double conserved = 0.0;  // I = integral of u^(1-p)
    double mean = 0.0;
    double min_u = 0.0;
    double max_u = 0.0;
    double residual_inf = 0.0;  // sup |u_xx + u - mean|
    std::optional<double> dissipation;  // -2 integral u^-p u_t^2
    double lyapunov = 0.0;  // integral u^(2-p), or integral ln u when p = 2
    std::optional<double> closure;  // integral cos x u^(1-p), only when a = k pi
};

/// E[u] = integral of u_x^2 - (u - mean)^2, evaluated from the cosine coefficients
/// with the grid's discrete mode norms.
double energy(const Field& f);

/// Same functional by nodal quadrature of u_x^2 - (u - mean)^2 (u_x from the
/// interpolant). Agrees with energy() whenever the top grid mode is absent.
double energy_quadrature(const Field& f);

double conserved_integral(const Field& f, double p);

double dissipation_rate(const Field& f, const Field& f_t, double p);

/// integral u^(2-p) for p != 2, integral ln u for p = 2.
double lyapunov(const Field& f, double p);

/// u_xx + u - mean(u)
Field residual(const Field& f);

/// Sharp constant C_a of the spectral inequality
///   E[u] <= C_a * integral (u_xx + u - mean)^2
/// for Neumann functions: 1 / min{ (k pi/a)^2 - 1 : (k pi/a)^2 > 1 }.
/// Eigenvalues within 1e-12 of 1 are excluded.
double ls_constant(double a);

/// Smallest k >= 1 whose eigenvalue enters the minimum in ls_constant().
int ls_extremal_mode(double a);

struct LsCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = true;
};

inline constexpr double kLsTolerance = 1e-10;

LsCheck ls_check(const Field& f);

double closure_integral(const Field& f, double p, double tol = kPiMultipleTol);

/// Builds a full record. When u_t is supplied the dissipation is filled in.
DiagnosticsRecord make_record(const Field& f, double p, double t,
                              const Field* u_t = nullptr);

}  // namespace nflow
