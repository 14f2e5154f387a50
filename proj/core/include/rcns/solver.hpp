/// @file solver.hpp
/// @brief Time evolution of the radial system in two interchangeable forms.
///
/// Conservative form evolves (rho, u):
///     (r^m rho)_t + (r^m rho u)_r = 0
///     u_t + u u_r + P_r / rho
///         = [2 alpha (rho (u_r + m u / r))_r - 2 alpha m rho_r u / r] / rho
///
/// Reformulated form evolves (phi, u, psi) with phi = A gamma/(gamma-1)
/// rho^(gamma-1) and psi = (ln rho)_r, where the viscous coefficient is the
/// constant 2 alpha:
///     phi_t + u phi_r + (gamma-1) phi (u_r + m u / r) = 0
///     u_t + u u_r + phi_r - 2 alpha u_rr = 2 alpha psi u_r + 2 alpha m (u/r)_r
///     psi_t + (psi u)_r + u_rr + m (u/r)_r = 0
///
/// Both use first-order IMEX stepping: explicit upwind convection and
/// pressure gradient, implicit (tridiagonal) diffusion. The reformulated step
/// solves its linearized triple by Picard iteration, transport coefficients
/// frozen at the previous velocity iterate, until the r^(m/2)-weighted L2
/// increment of u falls below tolerance.

#pragma once

#include "rcns/grid.hpp"
#include "rcns/model.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace rcns {

// ============================================================================
// State and configuration
// ============================================================================

/// Discrete fields at one time level. rho > 0 at every node and u(a) = 0 on
/// any accepted state. In reformulated mode psi is an evolved field; in
/// conservative mode it is the derived (ln rho)_r.
struct FluidState {
    double t = 0.0;
    Field rho;
    Field u;
    Field phi;
    Field psi;
    Field v;
};

enum class Formulation { Conservative, Reformulated };

enum class FarFieldBC { DirichletZeroU_ExtrapolateRho };

struct SolverConfig {
    Formulation formulation = Formulation::Conservative;
    double cfl = 0.4;             ///< Courant number in (0, 1]
    double dt_max = 0.05;         ///< hard cap on the time step
    double picard_tol = 1e-10;    ///< weighted-L2 increment tolerance on u
    int picard_max_iter = 50;
    FarFieldBC far_bc = FarFieldBC::DirichletZeroU_ExtrapolateRho;

    void require_valid() const;
};

/// Raised when a step cannot be accepted (positivity loss, solver breakdown,
/// Picard non-convergence). Never masked by floors or clipping.
class StepFailure : public std::runtime_error {
public:
    StepFailure(std::string what, double time, int node = -1)
        : std::runtime_error(std::move(what)), t(time), node_index(node) {}
    double t;
    int node_index; ///< -1 when no single node is implicated
};

/// One accepted step.
struct StepResult {
    FluidState state;
    double outflux = 0.0; ///< r^m rho u leaving through r = R over the step
    std::vector<double> picard_increments; ///< empty in conservative mode
};

// ============================================================================
// Operations
// ============================================================================

/// dt = cfl * dr / max_i (|u_i| + c(rho_i)), capped by dt_max. A vanishing
/// wave speed yields dt_max.
double cfl_dt(const FluidState& s, const ModelParams& p, const RadialGrid& g,
              const SolverConfig& cfg);

StepResult step_conservative(const FluidState& s, const ModelParams& p,
                             const RadialGrid& g, const SolverConfig& cfg, double dt);

StepResult step_reformulated(const FluidState& s, const ModelParams& p,
                             const RadialGrid& g, const SolverConfig& cfg, double dt);

/// Recomputes the derived members of a state from its primary fields
/// (rho, u in conservative mode; phi, u, psi in reformulated mode).
void refresh_derived(FluidState& s, const ModelParams& p, const RadialGrid& g,
                     Formulation form);

/// Observer interface for evolve. on_step fires after every accepted step;
/// on_record fires at the configured cadence (including t = 0 and t_final).
class StepObserver {
public:
    virtual ~StepObserver() = default;
    virtual void on_step(const FluidState& before, const FluidState& after, double dt,
                         double outflux) {
        (void)before; (void)after; (void)dt; (void)outflux;
    }
    virtual void on_record(const FluidState& s) { (void)s; }
};

struct EvolveOptions {
    double record_interval = 0.0; ///< record every this much time; 0 disables
    int record_every_steps = 10;  ///< used when record_interval == 0
    long max_steps = 50'000'000;
};

/// Steps the state to t_final, invoking the observers. Step failures
/// propagate with their time stamp attached.
FluidState evolve(FluidState state, const ModelParams& p, const RadialGrid& g,
                  const SolverConfig& cfg, double t_final, const EvolveOptions& opts,
                  const std::vector<StepObserver*>& observers);

// ============================================================================
// Initial-data validation
// ============================================================================

/// One weighted norm of the admissibility set, with its finiteness flag.
struct NormEntry {
    std::string name;
    double value = 0.0;
    bool finite = true;
};

/// Report-only check of the initial data against the admissibility norms:
/// total mass, the r^(m/2)-weighted H2 data of rho^(gamma-1) and u, the
/// L^q / L^inf / weighted-L2 data of psi_0 = (ln rho_0)_r.
struct InitDataReport {
    std::vector<NormEntry> norms;
    double tail_exponent = 0.0;  ///< log-log slope of r^m rho_0 at R
    bool tail_flag = false;      ///< mass integrand fails to decay faster than 1/r
    double tail_value = 0.0;     ///< rho_0(R) R^m
    bool tail_value_warning = false; ///< tail_value >= tail_tol
    std::optional<bool> sigma_ok;    ///< sigma > d/2, when sigma is known
    bool all_finite = true;

    std::string to_text() const;
};

/// q in (3, 6]. sigma (power-law decay exponent) is optional and only adds
/// the sigma > d/2 line to the report. The gradient bound |(ln rho_0)_r|_inf
/// is necessarily checked only up to the truncation radius.
InitDataReport validate_initial_data(const FluidState& s0, const ModelParams& p,
                                     const RadialGrid& g, double q,
                                     double tail_tol = 1e-8,
                                     std::optional<double> sigma = std::nullopt);

} // namespace rcns
