/// @file diagnostics.hpp
/// @brief Numerical evaluation of the a priori functionals monitored on every
///        run: mass, energy, BD entropy, their dissipation rates, sup bounds,
///        the transport Gronwall bound, and the redundancy residual between
///        the evolved psi and (ln phi)_r / (gamma - 1).

#pragma once

#include "rcns/grid.hpp"
#include "rcns/model.hpp"
#include "rcns/solver.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace rcns {

// ============================================================================
// Records
// ============================================================================

/// Report-only regularity norms (weighted H2 data of rho^(gamma-1) and u,
/// weighted psi norms, and backward-difference velocity rates, the u_tr one
/// scaled by t^(1/2)). Monitored for finiteness and trend, never asserted.
struct RegularityNorms {
    double rho_gamma_w_l2 = 0.0;
    double rho_gamma_r_w_l2 = 0.0;
    double rho_gamma_rr_w_l2 = 0.0;
    double u_w_l2 = 0.0;
    double u_r_w_l2 = 0.0;
    double u_rr_w_l2 = 0.0;
    double psi_wq_lq = 0.0;
    double psi_over_r_w_l2 = 0.0;
    double psi_r_w_l2 = 0.0;
    double u_t_w_l2 = 0.0;          ///< |r^(m/2) u_t|_2, backward difference
    double u_tr_w_l2_tweighted = 0.0; ///< t^(1/2) |r^(m/2) u_tr|_2
};

struct DiagnosticsRecord {
    double t = 0.0;
    double mass = 0.0;                    ///< int r^m rho dr
    double energy = 0.0;                  ///< int r^m (rho u^2/2 + A/(g-1) rho^g) dr
    double energy_dissipation_rate = 0.0; ///< int (2a r^m rho u_r^2 + 2am r^(m-2) rho u^2) dr
    double bd_entropy = 0.0;              ///< int r^m (rho v^2/2 + A/(g-1) rho^g) dr
    double bd_dissipation_rate = 0.0;     ///< 2 A a g int r^m rho^(g-2) rho_r^2 dr
    double sup_rho = 0.0;
    double sup_v = 0.0;
    double sup_psi = 0.0;
    double gronwall_rhs = 0.0;       ///< |v0|_inf + (Ag/2a) int_0^t |rho^(g-1) u|_inf ds
    double boundary_flux_cum = 0.0;  ///< accumulated r^m rho u outflux at R
    double psi_consistency = 0.0;    ///< || psi - (ln phi)_r / (g-1) ||_inf

    // not part of the CSV schema
    double energy_dissipation_integral = 0.0; ///< int_0^t D ds at step resolution
    double bd_dissipation_integral = 0.0;
    double rho_iota_u_integral = 0.0;         ///< int_0^t |rho^iota u|_inf ds, iota = 3/4
    RegularityNorms regularity;
};

/// Time accumulators owned by one run. Updated every accepted step so the
/// integrals carry step (not record) resolution.
struct DiagnosticsAccumulators {
    double boundary_flux_cum = 0.0;
    double gronwall_integral = 0.0;  ///< int |rho^(g-1) u|_inf ds
    double iota_integral = 0.0;      ///< int |rho^iota u|_inf ds
    double energy_dissipation_integral = 0.0;
    double bd_dissipation_integral = 0.0;
    double v0_sup = 0.0;
    std::optional<FluidState> prev_record_state; ///< for backward-difference rates
    double prev_record_t = 0.0;
};

/// Exponent of the |rho^iota u|_inf accumulator (midpoint of the admissible
/// range (1/2, 1)).
inline constexpr double kIotaExponent = 0.75;

// ============================================================================
// Operations
// ============================================================================

DiagnosticsRecord capture(const FluidState& s, const ModelParams& p, const RadialGrid& g,
                          const DiagnosticsAccumulators& acc, double psi_q = 4.0);

/// (int r^m rho |u|^qt dr)^(1/qt), qt in [2, 64].
double weighted_velocity_moment(const FluidState& s, const ModelParams& p,
                                const RadialGrid& g, double q_tilde);

/// Per-interval residuals of the discrete energy identity
///   E(t_{n+1}) - E(t_n) + int_{t_n}^{t_{n+1}} D ds = 0
/// (boundary work vanishes under the no-slip ends). The dissipation integral
/// uses the step-resolution accumulator carried in the records.
struct IdentityResiduals {
    std::vector<double> per_interval;
    double max_abs = 0.0;
    double sum_abs = 0.0;
};

IdentityResiduals energy_identity_residual(const std::vector<DiagnosticsRecord>& series);
IdentityResiduals bd_identity_residual(const std::vector<DiagnosticsRecord>& series);

/// sup_v(t) <= gronwall_rhs(t) + tol at every record; tol defaults to
/// 1e-2 |v0|_inf.
struct VBoundReport {
    bool pass = true;
    double worst_margin = 0.0; ///< max over records of sup_v - rhs - tol
    double t_worst = 0.0;
    std::string to_text() const;
};

VBoundReport v_bound_check(const std::vector<DiagnosticsRecord>& series,
                           std::optional<double> scheme_tol = std::nullopt);

/// CSV emission, fixed column order, 17 significant digits. Any lines
/// beginning with '#' before the header are provenance comments.
void emit_series(const std::vector<DiagnosticsRecord>& series, std::ostream& sink,
                 const std::string& provenance = "");

std::vector<DiagnosticsRecord> parse_series(std::istream& source);

// ============================================================================
// Collector observer
// ============================================================================

class DiagnosticsCollector : public StepObserver {
public:
    DiagnosticsCollector(const ModelParams& p, const RadialGrid& g, double psi_q = 4.0);

    void on_step(const FluidState& before, const FluidState& after, double dt,
                 double outflux) override;
    void on_record(const FluidState& s) override;

    const std::vector<DiagnosticsRecord>& series() const { return series_; }
    const DiagnosticsAccumulators& accumulators() const { return acc_; }

private:
    const ModelParams& p_;
    const RadialGrid& g_;
    double psi_q_;
    DiagnosticsAccumulators acc_;
    std::vector<DiagnosticsRecord> series_;
    bool have_rates_ = false;
    double g_prev_ = 0.0;    ///< |rho^(g-1) u|_inf at the previous step
    double iota_prev_ = 0.0; ///< |rho^iota u|_inf at the previous step
    double D_prev_ = 0.0;    ///< energy dissipation rate at the previous step
    double Dbd_prev_ = 0.0;  ///< BD dissipation rate at the previous step
};

} // namespace rcns
