/// @file initdata.hpp
/// @brief Admissible initial data: power-law / exponential density profiles
///        with a compactly supported C^2 velocity bump, or user tables.

#pragma once

#include "rcns/grid.hpp"
#include "rcns/model.hpp"
#include "rcns/solver.hpp"

#include <string>
#include <vector>

namespace rcns {

enum class InitKind { PowerLaw, Exponential, Custom };

struct InitSpec {
    InitKind kind = InitKind::PowerLaw;
    double sigma = 2.0;        ///< rho0 = 1 / (1 + r^(2 sigma)) for PowerLaw
    double u_amplitude = 0.5;
    double u_support_lo = 2.0; ///< bump support [lo, hi], strictly inside (a, R)
    double u_support_hi = 5.0;
    std::string rho_file;      ///< two-column CSV (r, value), Custom only
    std::string u_file;        ///< optional; empty means u0 = bump
    bool require_global_regime = false; ///< enforce sigma > d/2 for PowerLaw
};

/// Builds the t = 0 state: density profile, velocity bump
/// u0 = amplitude * exp(-1/(1-s^2)) with s the affine map of the support onto
/// [-1, 1], and the derived phi, psi, v fields. u0(a) = 0 exactly.
FluidState build(const InitSpec& spec, const RadialGrid& g, const ModelParams& p);

/// The bump profile itself (zero outside [lo, hi]).
double velocity_bump(double r, double amplitude, double lo, double hi);

/// Linear interpolation of a two-column (r, value) CSV table onto the grid.
Field load_profile_csv(const std::string& path, const RadialGrid& g,
                       const std::string& label);

} // namespace rcns
