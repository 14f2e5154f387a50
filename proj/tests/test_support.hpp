/// @file test_support.hpp
/// @brief Independent oracles shared by the test suites: adaptive Simpson
///        quadrature, analytic profile derivatives, random rotations.
///
/// Everything here is deliberately independent of the implementation paths it
/// checks (no grid operators, no trapezoid rule).

#pragma once

#include "rcns/grid.hpp"
#include "rcns/model.hpp"
#include "rcns/reconstruct.hpp"

#include <cmath>
#include <functional>
#include <random>

namespace rcns::test {

// ----------------------------------------------------------------------------
// Adaptive Simpson quadrature
// ----------------------------------------------------------------------------

inline double simpson_slice(const std::function<double(double)>& f, double a, double b,
                            double fa, double fm, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline double adaptive_simpson_rec(const std::function<double(double)>& f, double a,
                                   double b, double fa, double fm, double fb, double whole,
                                   double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = simpson_slice(f, a, m, fa, flm, fm);
    const double right = simpson_slice(f, m, b, fm, frm, fb);
    if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

/// Adaptive Simpson integral of f over [a, b] to absolute tolerance tol.
/// Pre-splits into panels so compactly supported integrands cannot hide
/// between the initial probe points.
inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-11) {
    constexpr int panels = 16;
    double total = 0.0;
    for (int k = 0; k < panels; ++k) {
        const double pa = a + (b - a) * k / panels;
        const double pb = a + (b - a) * (k + 1) / panels;
        const double fa = f(pa), fb = f(pb), fm = f(0.5 * (pa + pb));
        const double whole = simpson_slice(f, pa, pb, fa, fm, fb);
        total += adaptive_simpson_rec(f, pa, pb, fa, fm, fb, whole, tol / panels, 44);
    }
    return total;
}

// ----------------------------------------------------------------------------
// Analytic profiles
// ----------------------------------------------------------------------------

/// rho0 = 1 / (1 + r^(2 sigma)) and its log-derivative.
inline double power_law_rho(double r, double sigma) {
    return 1.0 / (1.0 + std::pow(r, 2.0 * sigma));
}

inline double power_law_psi(double r, double sigma) {
    const double p = std::pow(r, 2.0 * sigma);
    return -2.0 * sigma * p / (r * (1.0 + p));
}

/// The compactly supported velocity bump and its exact derivative.
inline double bump(double r, double amp, double lo, double hi) {
    const double s = (2.0 * r - (lo + hi)) / (hi - lo);
    if (std::abs(s) >= 1.0) return 0.0;
    return amp * std::exp(-1.0 / (1.0 - s * s));
}

inline double bump_deriv(double r, double amp, double lo, double hi) {
    const double s = (2.0 * r - (lo + hi)) / (hi - lo);
    if (std::abs(s) >= 1.0) return 0.0;
    const double one_ms2 = 1.0 - s * s;
    const double ds_dr = 2.0 / (hi - lo);
    return amp * std::exp(-1.0 / one_ms2) * (-2.0 * s / (one_ms2 * one_ms2)) * ds_dr;
}

// ----------------------------------------------------------------------------
// Random rotations (Gram-Schmidt of a Gaussian matrix)
// ----------------------------------------------------------------------------

inline Mat random_rotation(std::mt19937& rng, int d) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Mat H{};
    for (int attempt = 0; attempt < 100; ++attempt) {
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) H[i][j] = gauss(rng);
        bool ok = true;
        for (int c = 0; c < d && ok; ++c) {
            for (int prev = 0; prev < c; ++prev) {
                double dot = 0.0;
                for (int i = 0; i < d; ++i) dot += H[i][c] * H[i][prev];
                for (int i = 0; i < d; ++i) H[i][c] -= dot * H[i][prev];
            }
            double norm = 0.0;
            for (int i = 0; i < d; ++i) norm += H[i][c] * H[i][c];
            norm = std::sqrt(norm);
            if (norm < 1e-6) {
                ok = false;
                break;
            }
            for (int i = 0; i < d; ++i) H[i][c] /= norm;
        }
        if (ok) return H;
    }
    throw std::runtime_error("random_rotation: degenerate draw");
}

inline Vec random_point(std::mt19937& rng, int d, double r_lo, double r_hi) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> uni(r_lo, r_hi);
    Vec x{0.0, 0.0, 0.0};
    double norm = 0.0;
    while (norm < 1e-12) {
        norm = 0.0;
        for (int i = 0; i < d; ++i) {
            x[i] = gauss(rng);
            norm += x[i] * x[i];
        }
        norm = std::sqrt(norm);
    }
    const double r = uni(rng);
    for (int i = 0; i < d; ++i) x[i] *= r / norm;
    return x;
}

} // namespace rcns::test
