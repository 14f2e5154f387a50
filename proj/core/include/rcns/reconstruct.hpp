/// @file reconstruct.hpp
/// @brief Lift radial solutions to Cartesian fields:
///        rho(x) = rho(|x|), U(x) = u(|x|) x/|x|, with the exact gradient
///        tensors of the radial ansatz, and the rotation-equivariance check
///        H^T U(Hx) = U(x).

#pragma once

#include "rcns/grid.hpp"
#include "rcns/solver.hpp"

#include <array>
#include <iosfwd>
#include <vector>

namespace rcns {

using Vec = std::array<double, 3>;   ///< d = 2 uses the first two components
using Mat = std::array<Vec, 3>;      ///< row-major d x d block

struct GradientTensors {
    Vec grad_rho{};               ///< d rho / d x_i
    Mat grad_U{};                 ///< d U^j / d x_i, indexed [i][j]
    std::array<Mat, 3> hess_U{};  ///< d^2 U^k / d x_i d x_j, indexed [k][i][j]

    double div_U(int d) const;
};

struct CartesianSample {
    int d = 3;
    std::vector<Vec> points;
    std::vector<double> rho_values;
    std::vector<Vec> U_vectors;
    std::vector<GradientTensors> gradients; ///< empty unless requested
};

/// Samples the radial state at the given points (|x| in [a, R]; points with
/// |x| < a are rejected). Radial profiles are interpolated linearly.
CartesianSample to_cartesian(const FluidState& s, const RadialGrid& g,
                             const std::vector<Vec>& points, int d);

/// Same sampling plus the gradient tensors assembled from u, u_r, u_rr and
/// rho_r of the radial state.
CartesianSample cartesian_gradient(const FluidState& s, const RadialGrid& g,
                                   const std::vector<Vec>& points, int d);

/// max over points of |H^T U(Hx) - U(x)| and |rho(Hx) - rho(x)|. H must be
/// orthogonal within 1e-12.
double rotation_equivariance_error(const FluidState& s, const RadialGrid& g, const Mat& H,
                                   const std::vector<Vec>& points, int d);

/// Writes a Cartesian snapshot: columns x1..xd, rho, U1..Ud.
void write_cartesian_csv(const CartesianSample& sample, std::ostream& sink);

} // namespace rcns
