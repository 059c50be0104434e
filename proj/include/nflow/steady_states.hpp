#pragma once

#include <optional>
#include <string>
#include <variant>

#include "nflow/spectral.hpp"

namespace nflow {

struct ConstantState {
    double c = 0.0;
};

/// A cos x + B with 0 < |A| < B (a = k pi only).
struct CosineState {
    double A = 0.0;
    double B = 0.0;
};

/// A (cos(x - phase) + 1), phase in {0, pi}; touches zero.
struct DegenerateState {
    double A = 0.0;
    double phase = 0.0;
};

using SteadyState = std::variant<ConstantState, CosineState, DegenerateState>;

/// "constant", "cosine" or "degenerate".
std::string kind_name(const SteadyState& s);
/// Coefficients of the representation A cos x + B.
double cosine_amplitude(const SteadyState& s);
double cosine_offset(const SteadyState& s);
double phase_of(const SteadyState& s);
double evaluate(const SteadyState& s, double x);
Field sample(const SteadyState& s, GridPtr grid);

/// Description of the complete set of nonnegative steady states for (a, p).
struct SteadySet {
    double a = 0.0;
    double p = 0.0;
    std::optional<int> k;  // a = k pi
    /// Constants plus A cos x + B, |A| <= B, when a = k pi; constants only otherwise.
    bool cosine_family = false;
    /// Degenerate members (|A| = B) are admissible limits only for 1 < p < 3/2.
    bool degenerate_limits = false;
};

SteadySet classify(double a, double p, double tol_api = kPiMultipleTol);

/// integral over [0, k pi] of (A cos x + B)^(1-p), for B >= |A|.
/// Returns +infinity for B = |A| != 0 when p >= 3/2.
double cosine_family_integral(double A, double B, double p, int k);

/// Largest admissible amplitude for 1 < p < 3/2, a = k pi:
///   A0 = [ integral (cos x + 1)^(1-p) / I0 ]^(1/(p-1)).
/// Throws ExponentOutOfRange for p >= 3/2.
double compute_A0(double p, int k, double I0);

/// Unique B >= |A| with cosine_family_integral(A, B, p, k) = I0.
/// Throws NoRoot when p < 3/2 and |A| > A0(I0).
double solve_BA(double A, double p, int k, double I0);

struct UniqueLimit {
    SteadyState state;
    double I0 = 0.0;
};

struct FamilyLimit {
    double I0 = 0.0;
    double p = 0.0;
    int k = 1;
    std::optional<double> A0;  // present iff 1 < p < 3/2
    double B_of_A(double A) const { return solve_BA(A, p, k, I0); }
};

using LimitPrediction = std::variant<UniqueLimit, FamilyLimit>;

LimitPrediction predict_limit(const Field& u0, double p, double tol_api = kPiMultipleTol);

inline constexpr double kDefaultFitTol = 1e-6;

struct SteadyMatch {
    std::optional<SteadyState> state;  // empty means no match
    double residual = 0.0;             // sup |f - (A cos x + B)|
    double A_fit = 0.0;
    double B_fit = 0.0;
};

/// Projects f onto A cos x + B (A only when a = k pi) and tags the result.
SteadyMatch match_steady_state(const Field& f, double fit_tol = kDefaultFitTol,
                               double tol_api = kPiMultipleTol);

}  // namespace nflow
