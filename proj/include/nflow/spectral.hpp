#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace nflow {

inline constexpr double kPi = 3.14159265358979323846;

/// Tolerance on |a/pi - round(a/pi)| used to decide that a is a multiple of pi.
inline constexpr double kPiMultipleTol = 1e-9;

/// Returns k >= 1 when |a/pi - k| < tol, otherwise nothing.
std::optional<int> pi_multiple(double a, double tol = kPiMultipleTol);

/// Collocation grid for Neumann functions on [0, a].
///
/// Nodes are x_j = a j / (n-1), the Chebyshev-Lobatto angles theta_j = pi j/(n-1)
/// mapped by x = a theta / pi. On these nodes the basis cos(k pi x / a), k < n, is
/// interpolatory (a type-I discrete cosine transform) and the trapezoid weights are
/// the Clenshaw-Curtis weights of the angle variable: exact for every cos(k pi x/a)
/// with k < 2(n-1).
class Grid {
public:
    static std::shared_ptr<const Grid> make(double a, int n);

    ~Grid();
    Grid(const Grid&) = delete;
    Grid& operator=(const Grid&) = delete;

    double length() const noexcept { return a_; }
    int size() const noexcept { return n_; }
    std::span<const double> nodes() const noexcept { return nodes_; }
    std::span<const double> weights() const noexcept { return weights_; }

    /// k pi / a
    double wavenumber(int k) const noexcept;
    /// Largest eigenvalue of -d^2/dx^2 represented on the grid.
    double max_eigenvalue() const noexcept;
    /// Discrete squared norm of cos(k pi x/a) under the grid quadrature:
    /// a for k = 0 and k = n-1, a/2 otherwise.
    double mode_norm(int k) const noexcept;
    /// cos(k pi x_j / a), evaluated with exact argument reduction.
    double mode_value(int k, int j) const noexcept;

    double integrate(std::span<const double> values) const;

    void forward(std::span<const double> values, std::span<double> coeffs) const;
    void inverse(std::span<const double> coeffs, std::span<double> values) const;
    /// Nodal values of u_xx for the interpolant of `values`.
    void second_derivative(std::span<const double> values, std::span<double> out) const;

private:
    Grid(double a, int n);
    void transform(const double* in, double* out) const;

    double a_;
    int n_;
    std::vector<double> nodes_;
    std::vector<double> weights_;
    std::vector<double> cos_table_;  // cos(pi m / (n-1)), m < 2(n-1)
    void* plan_ = nullptr;           // fftw_plan, REDFT00 of size n
};

using GridPtr = std::shared_ptr<const Grid>;

inline GridPtr make_grid(double a, int n) { return Grid::make(a, n); }

/// A function sampled on the collocation grid together with its cosine coefficients
/// u(x) = sum_k c_k cos(k pi x / a). Immutable.
class Field {
public:
    static Field from_values(GridPtr grid, std::vector<double> values);
    static Field from_coeffs(GridPtr grid, std::vector<double> coeffs);
    static Field from_function(GridPtr grid, const std::function<double(double)>& f);
    static Field constant(GridPtr grid, double c);

    const Grid& grid() const noexcept { return *grid_; }
    const GridPtr& grid_ptr() const noexcept { return grid_; }
    std::span<const double> values() const noexcept { return values_; }
    std::span<const double> coeffs() const noexcept { return coeffs_; }
    int size() const noexcept { return static_cast<int>(values_.size()); }

    double min() const;
    double max() const;

private:
    Field(GridPtr grid, std::vector<double> values, std::vector<double> coeffs);

    GridPtr grid_;
    std::vector<double> values_;
    std::vector<double> coeffs_;
};

std::vector<double> to_coeffs(const Field& f);
Field from_coeffs(std::span<const double> coeffs, GridPtr grid);

Field second_derivative(const Field& f);

/// (1/a) * integral of f; equals the zeroth cosine coefficient.
double mean(const Field& f);

/// Quadrature of f itself.
double integrate(const Field& f);

/// Integral of u^q over [0, a]. Throws NonPositiveField when q < 0 and some value <= 0.
double integrate_power(const Field& f, double q);

/// Throws NonPositiveField naming the first node with value <= 0.
void require_positive(std::span<const double> values);

}  // namespace nflow
