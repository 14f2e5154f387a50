/// @file grid.hpp
/// @brief Uniform radial grid on [a, R], finite-difference operators and
///        r^k-weighted quadrature / norms.
///
/// All estimates of the radial flow live on an exterior interval [a, R] with
/// a > 0, so negative weight exponents (r^{m-2} with m = 1) are well defined.
/// Derivative stencils are second order: centered in the interior, one-sided
/// at the two boundary nodes.

#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace rcns {

// ============================================================================
// Field: node-aligned scalar data
// ============================================================================

/// Values sampled at the grid nodes. Construction rejects NaN/Inf so that a
/// Field held by an accepted state is always finite.
struct Field {
    std::vector<double> values;
    std::string label;

    Field() = default;
    Field(std::vector<double> vals, std::string lbl);

    static Field zeros(std::size_t n, std::string lbl);

    std::size_t size() const { return values.size(); }
    double operator[](std::size_t i) const { return values[i]; }
    double& operator[](std::size_t i) { return values[i]; }
};

// ============================================================================
// RadialGrid
// ============================================================================

/// Uniform collocated grid: r_i = a + i * dr, r_0 = a, r_{N-1} = R.
class RadialGrid {
public:
    RadialGrid(double a, double R, int N);

    double a() const { return a_; }
    double R() const { return R_; }
    int size() const { return N_; }
    double dr() const { return dr_; }
    double node(int i) const { return r_[i]; }
    const std::vector<double>& nodes() const { return r_; }

private:
    double a_;
    double R_;
    int N_;
    double dr_;
    std::vector<double> r_;
};

// ============================================================================
// Operators
// ============================================================================

/// First derivative, second order. Centered in the interior, one-sided
/// 3-point stencils at both ends. Exact for quadratics at interior nodes.
Field ddr(const RadialGrid& g, const Field& f);

/// Second derivative, 3-point stencil. The boundary nodes reuse the stencil
/// of their inward neighbor (exact for quadratics).
Field d2dr2(const RadialGrid& g, const Field& f);

/// Trapezoidal quadrature of r^k * f over [a, R]. k may be negative since
/// r >= a > 0.
double weighted_integral(const RadialGrid& g, const Field& f, double k);

/// (integral of r^k |f|^p dr)^(1/p) for finite p; max |f| for p = infinity
/// (pass p = infinity(), the weight exponent is ignored there).
double weighted_norm(const RadialGrid& g, const Field& f, double k, double p);

/// Linear interpolation of a nodal field at radius r, r clamped to [a, R].
double interp_linear(const RadialGrid& g, const Field& f, double r);
double interp_linear(const RadialGrid& g, const std::vector<double>& f, double r);

} // namespace rcns
