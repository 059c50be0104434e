#include "nflow/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <string>

#include "nflow/errors.hpp"

namespace nflow {

namespace {

// FFTW planning is not thread-safe; execution on distinct arrays is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

void check_length(std::size_t got, int want, const char* what) {
    if (got != static_cast<std::size_t>(want)) {
        throw InvalidArgument(std::string(what) + ": length " + std::to_string(got) +
                              " does not match grid size " + std::to_string(want));
    }
}

}  // namespace

std::optional<int> pi_multiple(double a, double tol) {
    const double r = a / kPi;
    const double k = std::round(r);
    if (k >= 1.0 && std::abs(r - k) < tol) return static_cast<int>(k);
    return std::nullopt;
}

std::shared_ptr<const Grid> Grid::make(double a, int n) {
    if (!(a > 0.0) || !std::isfinite(a)) {
        throw InvalidArgument("grid length must be positive and finite, got " + std::to_string(a));
    }
    if (n < 8) throw InvalidArgument("grid needs at least 8 nodes, got " + std::to_string(n));
    return std::shared_ptr<const Grid>(new Grid(a, n));
}

Grid::Grid(double a, int n) : a_(a), n_(n), nodes_(n), weights_(n) {
    const int m = n - 1;
    const double h = a / m;
    for (int j = 0; j < n; ++j) {
        nodes_[j] = a * static_cast<double>(j) / m;
        weights_[j] = h;
    }
    nodes_[m] = a;
    weights_[0] = weights_[m] = 0.5 * h;

    cos_table_.resize(2 * m);
    for (int i = 0; i < 2 * m; ++i) {
        // Reduce to [0, pi/2] by symmetry so that table entries are symmetric and
        // cos(pi/2) is exactly zero.
        int r = i;
        double sign = 1.0;
        if (r > m) r = 2 * m - r;
        if (2 * r > m) {
            r = m - r;
            sign = -1.0;
        }
        cos_table_[i] = (2 * r == m) ? 0.0 : sign * std::cos(kPi * r / m);
    }

    std::vector<double> in(n), out(n);
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan_ = fftw_plan_r2r_1d(n, in.data(), out.data(), FFTW_REDFT00,
                             FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (plan_ == nullptr) throw Error("failed to create cosine transform plan");
}

Grid::~Grid() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(static_cast<fftw_plan>(plan_));
}

double Grid::wavenumber(int k) const noexcept { return k * kPi / a_; }

double Grid::max_eigenvalue() const noexcept {
    const double w = wavenumber(n_ - 1);
    return w * w;
}

double Grid::mode_norm(int k) const noexcept {
    return (k == 0 || k == n_ - 1) ? a_ : 0.5 * a_;
}

double Grid::mode_value(int k, int j) const noexcept {
    const long long m = n_ - 1;
    return cos_table_[static_cast<std::size_t>((static_cast<long long>(k) * j) % (2 * m))];
}

double Grid::integrate(std::span<const double> values) const {
    check_length(values.size(), n_, "integrate");
    double s = 0.0;
    for (int j = 0; j < n_; ++j) s += weights_[j] * values[j];
    return s;
}

void Grid::transform(const double* in, double* out) const {
    fftw_execute_r2r(static_cast<fftw_plan>(plan_), const_cast<double*>(in), out);
}

void Grid::forward(std::span<const double> values, std::span<double> coeffs) const {
    check_length(values.size(), n_, "forward transform");
    check_length(coeffs.size(), n_, "forward transform");
    std::vector<double> in(values.begin(), values.end());
    transform(in.data(), coeffs.data());
    const int m = n_ - 1;
    const double s = 1.0 / m;
    for (int k = 1; k < m; ++k) coeffs[k] *= s;
    coeffs[0] *= 0.5 * s;
    coeffs[m] *= 0.5 * s;
}

void Grid::inverse(std::span<const double> coeffs, std::span<double> values) const {
    check_length(coeffs.size(), n_, "inverse transform");
    check_length(values.size(), n_, "inverse transform");
    const int m = n_ - 1;
    std::vector<double> in(n_);
    for (int k = 1; k < m; ++k) in[k] = 0.5 * coeffs[k];
    in[0] = coeffs[0];
    in[m] = coeffs[m];
    transform(in.data(), values.data());
}

void Grid::second_derivative(std::span<const double> values, std::span<double> out) const {
    check_length(values.size(), n_, "second derivative");
    check_length(out.size(), n_, "second derivative");
    const int m = n_ - 1;
    thread_local std::vector<double> buf, c;
    buf.assign(values.begin(), values.end());
    c.resize(n_);
    transform(buf.data(), c.data());
    // Forward normalisation (1/m, halved at the ends) and the inverse's halving of
    // interior coefficients combine to 1/(2m) for every mode.
    const double s = 0.5 / m;
    const double base = kPi / a_;
    for (int k = 0; k <= m; ++k) {
        const double w = base * k;
        c[k] *= -w * w * s;
    }
    transform(c.data(), out.data());
}

Field::Field(GridPtr grid, std::vector<double> values, std::vector<double> coeffs)
    : grid_(std::move(grid)), values_(std::move(values)), coeffs_(std::move(coeffs)) {}

Field Field::from_values(GridPtr grid, std::vector<double> values) {
    if (!grid) throw InvalidArgument("field needs a grid");
    check_length(values.size(), grid->size(), "field values");
    std::vector<double> c(values.size());
    grid->forward(values, c);
    return Field(std::move(grid), std::move(values), std::move(c));
}

Field Field::from_coeffs(GridPtr grid, std::vector<double> coeffs) {
    if (!grid) throw InvalidArgument("field needs a grid");
    check_length(coeffs.size(), grid->size(), "field coefficients");
    std::vector<double> v(coeffs.size());
    grid->inverse(coeffs, v);
    return Field(std::move(grid), std::move(v), std::move(coeffs));
}

Field Field::from_function(GridPtr grid, const std::function<double(double)>& f) {
    if (!grid) throw InvalidArgument("field needs a grid");
    std::vector<double> v(grid->size());
    const auto x = grid->nodes();
    std::transform(x.begin(), x.end(), v.begin(), f);
    return from_values(std::move(grid), std::move(v));
}

Field Field::constant(GridPtr grid, double c) {
    if (!grid) throw InvalidArgument("field needs a grid");
    const int n = grid->size();
    std::vector<double> coeffs(n, 0.0);
    coeffs[0] = c;
    return Field(std::move(grid), std::vector<double>(n, c), std::move(coeffs));
}

double Field::min() const { return *std::min_element(values_.begin(), values_.end()); }
double Field::max() const { return *std::max_element(values_.begin(), values_.end()); }

std::vector<double> to_coeffs(const Field& f) {
    return {f.coeffs().begin(), f.coeffs().end()};
}

Field from_coeffs(std::span<const double> coeffs, GridPtr grid) {
    return Field::from_coeffs(std::move(grid), {coeffs.begin(), coeffs.end()});
}

Field second_derivative(const Field& f) {
    const Grid& g = f.grid();
    std::vector<double> c(f.coeffs().begin(), f.coeffs().end());
    for (int k = 0; k < g.size(); ++k) {
        const double w = g.wavenumber(k);
        c[k] *= -w * w;
    }
    return Field::from_coeffs(f.grid_ptr(), std::move(c));
}

double integrate(const Field& f) { return f.grid().integrate(f.values()); }

double mean(const Field& f) { return integrate(f) / f.grid().length(); }

void require_positive(std::span<const double> values) {
    for (std::size_t j = 0; j < values.size(); ++j) {
        if (!(values[j] > 0.0)) throw NonPositiveField(j, values[j]);
    }
}

double integrate_power(const Field& f, double q) {
    const auto v = f.values();
    const auto w = f.grid().weights();
    if (q < 0.0) {
        require_positive(v);
    } else if (q != std::floor(q)) {
        for (std::size_t j = 0; j < v.size(); ++j) {
            if (v[j] < 0.0) throw NonPositiveField(j, v[j]);
        }
    }
    double s = 0.0;
    for (std::size_t j = 0; j < v.size(); ++j) s += w[j] * std::pow(v[j], q);
    return s;
}

}  // namespace nflow
