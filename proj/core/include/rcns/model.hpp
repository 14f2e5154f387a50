/// @file model.hpp
/// @brief Physical constants, constitutive laws, the (phi, psi, v) variable
///        transformations and the viscous shallow-water presets.
///
/// The fluid obeys the pressure law P = A rho^gamma with a density-linear
/// shear viscosity mu(rho) = alpha rho and zero bulk viscosity. Everything
/// here is a pure function over plain data.

#pragma once

#include "rcns/grid.hpp"

#include <functional>
#include <string>
#include <vector>

namespace rcns {

/// Density floor for derived quantities that divide by rho. Solutions in the
/// supported regime are strictly positive; reaching the guard indicates a
/// numerical failure, never physics, and is surfaced as an error.
inline constexpr double kRhoPositivityGuard = 1e-14;

// ============================================================================
// ModelParams
// ============================================================================

struct ModelParams {
    double A = 1.0;      ///< entropy constant, P = A rho^gamma
    double gamma = 2.0;  ///< adiabatic exponent, > 1
    double alpha = 1.0;  ///< shear viscosity constant, mu = alpha rho
    double beta = 0.0;   ///< bulk viscosity constant (must be 0)
    int d = 3;           ///< spatial dimension, 2 or 3
    int m = 2;           ///< geometric weight exponent, m = d - 1

    /// gamma > 3/2 is required for the global-in-time regime; smaller gamma
    /// (but > 1) is accepted with a warning.
    bool global_regime() const { return gamma > 1.5; }

    /// Returns human-readable violations; empty means valid.
    std::vector<std::string> validate() const;

    /// Throws std::invalid_argument listing every violated invariant.
    void require_valid() const;
};

/// Viscous term variants of the 2-D shallow water system. Each maps to one
/// ModelParams preset of the general system; DivHD and DivHGrad produce the
/// same radial equations and hence the same preset.
enum class ShallowVariant {
    DivHD,     ///< div(h D(W))
    Div2HD,    ///< div(2h D(W))
    DivHGrad,  ///< div(h grad W)
};

ModelParams variant_params(ShallowVariant variant);

const char* to_string(ShallowVariant variant);

// ============================================================================
// Constitutive laws and transformations
// ============================================================================

/// P = A rho^gamma. Negative rho is a domain error.
double pressure(const ModelParams& p, double rho);

/// phi = A gamma / (gamma - 1) * rho^(gamma - 1), rho > 0.
double phi_of_rho(const ModelParams& p, double rho);

/// Inverse of phi_of_rho, phi > 0.
double rho_of_phi(const ModelParams& p, double phi);

/// c = sqrt(A gamma rho^(gamma - 1)).
double sound_speed(const ModelParams& p, double rho);

/// Derivative operator slot: maps a nodal field to its radial derivative.
using DerivOp = std::function<Field(const Field&)>;

/// Effective velocity v = u + 2 alpha rho_r / rho, nodewise. rho below the
/// positivity guard raises a diagnostic error naming the node.
Field effective_velocity(const ModelParams& p, const Field& rho, const Field& u,
                         const DerivOp& ddr_op);

} // namespace rcns
