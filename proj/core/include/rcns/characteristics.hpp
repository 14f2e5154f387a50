/// @file characteristics.hpp
/// @brief Independent evaluation of the effective-velocity damped transport
///        equation along characteristics.
///
/// The effective velocity v = u + 2 alpha rho_r / rho obeys
///     v_t + u v_r + (A gamma / 2 alpha) rho^(gamma-1) (v - u) = 0,
/// so along dy/dt = u(t, y) it has the closed form
///     v(t) = ( v0 + int_0^t k u e^{int_0^s k} ds ) e^{-int_0^t k ds},
///     k(s) = (A gamma / 2 alpha) rho(s, y(s))^(gamma-1).
/// Evaluating this from a stored solution history gives an oracle that is
/// independent of the grid solver's spatial discretization of v.

#pragma once

#include "rcns/grid.hpp"
#include "rcns/model.hpp"
#include "rcns/solver.hpp"

#include <vector>

namespace rcns {

// ============================================================================
// SolutionHistory
// ============================================================================

/// Snapshots of (t, rho, u) dense enough for time interpolation (one per step
/// when recorded by HistoryRecorder). Interpolation is piecewise linear in
/// time and space, matching the first-order accuracy of the stored data.
class SolutionHistory {
public:
    SolutionHistory(RadialGrid grid, ModelParams params);

    void append(double t, std::vector<double> rho, std::vector<double> u);

    const RadialGrid& grid() const { return grid_; }
    const ModelParams& params() const { return params_; }
    const std::vector<double>& times() const { return times_; }
    double t_begin() const { return times_.front(); }
    double t_end() const { return times_.back(); }

    double u_at(double t, double r) const;
    double rho_at(double t, double r) const;

    /// v0 at radius r, from the first snapshot (grid derivative of rho).
    double v0_at(double r) const;

private:
    int bracket(double t) const;

    RadialGrid grid_;
    ModelParams params_;
    std::vector<double> times_;
    std::vector<std::vector<double>> rho_;
    std::vector<std::vector<double>> u_;
    std::vector<double> v0_;
};

/// Observer that appends every accepted step (and the initial state) to a
/// SolutionHistory.
class HistoryRecorder : public StepObserver {
public:
    explicit HistoryRecorder(SolutionHistory& h) : history_(h) {}
    void on_step(const FluidState& before, const FluidState& after, double dt,
                 double outflux) override;

private:
    SolutionHistory& history_;
};

// ============================================================================
// Characteristic paths
// ============================================================================

struct CharacteristicPath {
    double r0 = 0.0;
    std::vector<double> times;
    std::vector<double> positions;
    bool exited = false; ///< the path left [a, R] and was truncated
};

/// RK4 integration of dy/dt = u(t, y) from y(0) = r0 up to t_final, sampled
/// at the history times.
CharacteristicPath trace_characteristic(const SolutionHistory& h, double r0, double t_final);

/// exp(-int_0^t (A gamma / 2 alpha) rho^(gamma-1) ds) along the path,
/// accumulated with the trapezoidal rule. Always in (0, 1].
double damping_factor(const SolutionHistory& h, const CharacteristicPath& path, double t);

/// Closed-form v at every path time (same length as path.times).
std::vector<double> v_along_path(const SolutionHistory& h, const CharacteristicPath& path);

/// Closed-form v transported from r0 to time t.
double v_closed_form(const SolutionHistory& h, double r0, double t);

/// Default launch radii: count points equispaced in
/// [a + 0.05 (R-a), a + 0.6 (R-a)], clear of both boundaries.
std::vector<double> default_launch_radii(const RadialGrid& g, int count = 16);

} // namespace rcns
