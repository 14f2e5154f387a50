#include "rcns/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace rcns {

namespace {

// ----------------------------------------------------------------------------
// Tridiagonal solve (Thomas algorithm). Diagonal dominance of the IMEX
// operators makes pivoting unnecessary; a vanishing pivot is surfaced.
// ----------------------------------------------------------------------------
void solve_tridiagonal(std::vector<double>& sub, std::vector<double>& diag,
                       std::vector<double>& sup, std::vector<double>& rhs, double t_now) {
    const int n = static_cast<int>(diag.size());
    for (int i = 1; i < n; ++i) {
        if (std::abs(diag[i - 1]) < 1e-300)
            throw StepFailure("viscous solve breakdown: zero pivot at node " +
                                  std::to_string(i - 1),
                              t_now, i - 1);
        const double w = sub[i] / diag[i - 1];
        diag[i] -= w * sup[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    if (std::abs(diag[n - 1]) < 1e-300)
        throw StepFailure("viscous solve breakdown: zero pivot at node " + std::to_string(n - 1),
                          t_now, n - 1);
    rhs[n - 1] /= diag[n - 1];
    for (int i = n - 2; i >= 0; --i) rhs[i] = (rhs[i] - sup[i] * rhs[i + 1]) / diag[i];
}

// First-order upwind derivative of f at node i, biased by the sign of the
// advecting speed. Falls back to the available side at the boundary nodes.
double upwind_deriv(const std::vector<double>& f, int i, int n, double h, double speed) {
    if (speed > 0.0) {
        if (i > 0) return (f[i] - f[i - 1]) / h;
        return (f[i + 1] - f[i]) / h;
    }
    if (speed < 0.0) {
        if (i < n - 1) return (f[i + 1] - f[i]) / h;
        return (f[i] - f[i - 1]) / h;
    }
    return 0.0;
}

double weighted_l2(const RadialGrid& g, const std::vector<double>& f, int m) {
    double sum = 0.0;
    const int n = g.size();
    for (int i = 0; i < n; ++i) {
        const double w = (i == 0 || i == n - 1) ? 0.5 : 1.0;
        sum += w * std::pow(g.node(i), m) * f[i] * f[i];
    }
    return std::sqrt(sum * g.dr());
}

void check_positive_density(const std::vector<double>& rho, double t_now) {
    for (std::size_t i = 0; i < rho.size(); ++i) {
        if (!(rho[i] > 0.0) || !std::isfinite(rho[i])) {
            throw StepFailure("density lost positivity at node " + std::to_string(i) +
                                  " (CFL violation or truncation too aggressive)",
                              t_now, static_cast<int>(i));
        }
    }
}

} // namespace

void SolverConfig::require_valid() const {
    if (!(cfl > 0.0 && cfl <= 1.0))
        throw std::invalid_argument("SolverConfig: cfl must lie in (0, 1]");
    if (!(picard_tol > 0.0))
        throw std::invalid_argument("SolverConfig: picard_tol must be positive");
    if (picard_max_iter < 1)
        throw std::invalid_argument("SolverConfig: picard_max_iter must be >= 1");
    if (!(dt_max > 0.0))
        throw std::invalid_argument("SolverConfig: dt_max must be positive");
}

double cfl_dt(const FluidState& s, const ModelParams& p, const RadialGrid& g,
              const SolverConfig& cfg) {
    double speed = 0.0;
    for (int i = 0; i < g.size(); ++i)
        speed = std::max(speed, std::abs(s.u[i]) + sound_speed(p, s.rho[i]));
    if (speed <= 0.0) return cfg.dt_max;
    return std::min(cfg.cfl * g.dr() / speed, cfg.dt_max);
}

void refresh_derived(FluidState& s, const ModelParams& p, const RadialGrid& g,
                     Formulation form) {
    const int n = g.size();
    auto ddr_op = [&g](const Field& f) { return ddr(g, f); };
    if (form == Formulation::Conservative) {
        std::vector<double> phi(n), lnrho(n);
        for (int i = 0; i < n; ++i) {
            phi[i] = phi_of_rho(p, s.rho[i]);
            lnrho[i] = std::log(s.rho[i]);
        }
        s.phi = Field(std::move(phi), "phi");
        s.psi = ddr(g, Field(std::move(lnrho), "ln rho"));
        s.psi.label = "psi";
    } else {
        std::vector<double> rho(n);
        for (int i = 0; i < n; ++i) rho[i] = rho_of_phi(p, s.phi[i]);
        s.rho = Field(std::move(rho), "rho");
    }
    s.v = effective_velocity(p, s.rho, s.u, ddr_op);
}

// ============================================================================
// Conservative step
// ============================================================================

StepResult step_conservative(const FluidState& s, const ModelParams& p,
                             const RadialGrid& g, const SolverConfig& cfg, double dt) {
    const int n = g.size();
    const double h = g.dr();
    const int m = p.m;
    const double t_next = s.t + dt;

    const auto& rho = s.rho.values;
    const auto& u = s.u.values;

    // --- density: (r^m rho)_t + (r^m rho u)_r = 0, first-order upwind flux.
    std::vector<double> rm(n), f(n);
    for (int i = 0; i < n; ++i) {
        rm[i] = std::pow(g.node(i), m);
        f[i] = rm[i] * rho[i];
    }
    std::vector<double> flux(n - 1);
    for (int i = 0; i < n - 1; ++i) {
        const double um = 0.5 * (u[i] + u[i + 1]);
        flux[i] = (um >= 0.0) ? f[i] * um : f[i + 1] * um;
    }
    // Wall flux vanishes with u(a) = 0; the outer flux is logged, not hidden.
    const double flux_R = f[n - 1] * u[n - 1];
    std::vector<double> f_new(n);
    f_new[0] = f[0] - 2.0 * (dt / h) * flux[0];
    for (int i = 1; i < n - 1; ++i) f_new[i] = f[i] - (dt / h) * (flux[i] - flux[i - 1]);
    f_new[n - 1] = f[n - 1] - 2.0 * (dt / h) * (flux_R - flux[n - 2]);

    std::vector<double> rho_new(n);
    for (int i = 0; i < n; ++i) rho_new[i] = f_new[i] / rm[i];
    check_positive_density(rho_new, t_next);

    // --- momentum in velocity form, viscous operator implicit with rho
    //     frozen at level n:
    //   u_t + u u_r + P_r/rho
    //     = (2a/rho) (rho (u_r + m u/r))_r - (2a m rho_r/(r rho)) u
    std::vector<double> P(n), drho(n);
    for (int i = 0; i < n; ++i) P[i] = pressure(p, rho[i]);
    {
        Field drho_f = ddr(g, s.rho);
        drho = std::move(drho_f.values);
    }

    std::vector<double> sub(n, 0.0), diag(n, 0.0), sup(n, 0.0), rhs(n, 0.0);
    const double a2 = 2.0 * p.alpha;
    for (int i = 1; i < n - 1; ++i) {
        const double r_ph = 0.5 * (g.node(i) + g.node(i + 1));
        const double r_mh = 0.5 * (g.node(i) + g.node(i - 1));
        const double rho_ph = 0.5 * (rho[i] + rho[i + 1]);
        const double rho_mh = 0.5 * (rho[i] + rho[i - 1]);

        // flux-form diffusion (rho (u_r + m u / r))_r on the compact stencil
        const double cp = rho_ph * (1.0 / h + m / (2.0 * r_ph));
        const double cp0 = rho_ph * (-1.0 / h + m / (2.0 * r_ph));
        const double cm = rho_mh * (1.0 / h + m / (2.0 * r_mh));
        const double cm0 = rho_mh * (-1.0 / h + m / (2.0 * r_mh));

        const double scale = a2 / (rho[i] * h);
        const double visc_sup = scale * cp;
        const double visc_sub = -scale * cm0;
        const double visc_diag = scale * (cp0 - cm);
        const double zero_order = -a2 * m * drho[i] / (g.node(i) * rho[i]);

        sub[i] = -visc_sub;
        sup[i] = -visc_sup;
        diag[i] = 1.0 / dt - visc_diag - zero_order;

        const double conv = u[i] * upwind_deriv(u, i, n, h, u[i]);
        const double pgrad = (P[i + 1] - P[i - 1]) / (2.0 * h * rho[i]);
        rhs[i] = u[i] / dt - conv - pgrad;
    }
    // no-slip at the wall and at the truncation radius
    diag[0] = 1.0;
    diag[n - 1] = 1.0;
    rhs[0] = 0.0;
    rhs[n - 1] = 0.0;

    solve_tridiagonal(sub, diag, sup, rhs, t_next);

    StepResult out;
    out.outflux = dt * flux_R;
    out.state.t = t_next;
    out.state.rho = Field(std::move(rho_new), "rho");
    out.state.u = Field(std::move(rhs), "u");
    refresh_derived(out.state, p, g, Formulation::Conservative);
    return out;
}

// ============================================================================
// Reformulated step with inner Picard loop
// ============================================================================

StepResult step_reformulated(const FluidState& s, const ModelParams& p,
                             const RadialGrid& g, const SolverConfig& cfg, double dt) {
    const int n = g.size();
    const double h = g.dr();
    const int m = p.m;
    const double gm1 = p.gamma - 1.0;
    const double a2 = 2.0 * p.alpha;
    const double t_next = s.t + dt;

    const auto& phi_n = s.phi.values;
    const auto& u_n = s.u.values;
    const auto& psi_n = s.psi.values;

    std::vector<double> V = u_n; // velocity iterate
    std::vector<double> phi_k(n), psi_k(n), u_k(n);
    std::vector<double> increments;

    bool converged = false;
    double last_increment = std::numeric_limits<double>::infinity();

    for (int iter = 0; iter < cfg.picard_max_iter; ++iter) {
        Field Vf(V, "V");
        Field dV = ddr(g, Vf);
        Field d2V = d2dr2(g, Vf);

        // phi transport with frozen V (explicit upwind)
        for (int i = 0; i < n; ++i) {
            const double adv = V[i] * upwind_deriv(phi_n, i, n, h, V[i]);
            const double src = gm1 * phi_n[i] * (dV[i] + m * V[i] / g.node(i));
            phi_k[i] = phi_n[i] - dt * (adv + src);
            if (!(phi_k[i] > 0.0) || !std::isfinite(phi_k[i]))
                throw StepFailure("phi lost positivity at node " + std::to_string(i), t_next,
                                  i);
        }

        // psi transport with frozen V: psi_t + (psi V)_r + V_rr + m (V/r)_r = 0
        for (int i = 0; i < n; ++i) {
            const double r = g.node(i);
            const double adv = V[i] * upwind_deriv(psi_n, i, n, h, V[i]);
            const double geo = dV[i] / r - V[i] / (r * r);
            psi_k[i] = psi_n[i] - dt * (adv + psi_n[i] * dV[i] + d2V[i] + m * geo);
        }

        // velocity with implicit u_rr:
        //   u/dt - 2a u_rr = u^n/dt - V V_r - phi_r + 2a psi V_r + 2a m (V/r)_r
        Field dphi = ddr(g, Field(phi_k, "phi"));
        std::vector<double> sub(n, 0.0), diag(n, 0.0), sup(n, 0.0), rhs(n, 0.0);
        for (int i = 1; i < n - 1; ++i) {
            const double r = g.node(i);
            sub[i] = -a2 / (h * h);
            sup[i] = -a2 / (h * h);
            diag[i] = 1.0 / dt + 2.0 * a2 / (h * h);
            const double conv = V[i] * upwind_deriv(V, i, n, h, V[i]);
            const double geo = dV[i] / r - V[i] / (r * r);
            rhs[i] = u_n[i] / dt - conv - dphi[i] + a2 * psi_k[i] * dV[i] + a2 * m * geo;
        }
        diag[0] = 1.0;
        diag[n - 1] = 1.0;
        rhs[0] = 0.0;
        rhs[n - 1] = 0.0;
        solve_tridiagonal(sub, diag, sup, rhs, t_next);
        u_k = std::move(rhs);

        std::vector<double> delta(n);
        for (int i = 0; i < n; ++i) delta[i] = u_k[i] - V[i];
        last_increment = weighted_l2(g, delta, m);
        increments.push_back(last_increment);
        V = u_k;
        if (last_increment < cfg.picard_tol) {
            converged = true;
            break;
        }
    }

    if (!converged) {
        std::ostringstream os;
        os << "Picard loop failed to converge in " << cfg.picard_max_iter
           << " iterations, final increment " << last_increment;
        throw StepFailure(os.str(), t_next);
    }

    StepResult out;
    out.picard_increments = std::move(increments);
    out.state.t = t_next;
    out.state.phi = Field(std::move(phi_k), "phi");
    out.state.psi = Field(std::move(psi_k), "psi");
    out.state.u = Field(std::move(u_k), "u");
    refresh_derived(out.state, p, g, Formulation::Reformulated);
    check_positive_density(out.state.rho.values, t_next);
    // outflux is zero under the Dirichlet far boundary; keep the ledger honest
    out.outflux = dt * std::pow(g.R(), m) * out.state.rho.values.back() * out.state.u.values.back();
    return out;
}

// ============================================================================
// Evolution loop
// ============================================================================

FluidState evolve(FluidState state, const ModelParams& p, const RadialGrid& g,
                  const SolverConfig& cfg, double t_final, const EvolveOptions& opts,
                  const std::vector<StepObserver*>& observers) {
    cfg.require_valid();
    p.require_valid();
    if (t_final < state.t)
        throw std::invalid_argument("evolve: t_final precedes the state time");

    for (auto* ob : observers) ob->on_record(state);
    if (t_final == state.t) return state;

    const double t0 = state.t;
    double next_record = opts.record_interval > 0.0 ? t0 + opts.record_interval
                                                    : std::numeric_limits<double>::infinity();
    long step_count = 0;
    const double eps = 1e-12 * std::max(1.0, std::abs(t_final));

    while (state.t < t_final - eps) {
        if (++step_count > opts.max_steps)
            throw StepFailure("step budget exhausted", state.t);
        double dt = std::min(cfl_dt(state, p, g, cfg), t_final - state.t);
        // land exactly on record times so no record interval is skipped
        if (opts.record_interval > 0.0 && next_record < t_final - eps)
            dt = std::min(dt, std::max(next_record - state.t, eps));
        StepResult r = (cfg.formulation == Formulation::Conservative)
                           ? step_conservative(state, p, g, cfg, dt)
                           : step_reformulated(state, p, g, cfg, dt);
        for (auto* ob : observers) ob->on_step(state, r.state, dt, r.outflux);
        state = std::move(r.state);

        const bool at_final = state.t >= t_final - eps;
        bool record = at_final;
        if (opts.record_interval > 0.0) {
            if (!at_final && state.t >= next_record - eps) {
                record = true;
                while (next_record <= state.t + eps) next_record += opts.record_interval;
            }
        } else if (!at_final && opts.record_every_steps > 0 &&
                   step_count % opts.record_every_steps == 0) {
            record = true;
        }
        if (record)
            for (auto* ob : observers) ob->on_record(state);
    }
    return state;
}

// ============================================================================
// Initial-data validation
// ============================================================================

namespace {

NormEntry entry(const std::string& name, double value) {
    return NormEntry{name, value, std::isfinite(value)};
}

} // namespace

InitDataReport validate_initial_data(const FluidState& s0, const ModelParams& p,
                                     const RadialGrid& g, double q, double tail_tol,
                                     std::optional<double> sigma) {
    if (!(q > 3.0 && q <= 6.0))
        throw std::invalid_argument("validate_initial_data: q must lie in (3, 6]");
    const int n = g.size();
    const int m = p.m;

    std::vector<double> rhog(n), lnrho(n);
    for (int i = 0; i < n; ++i) {
        rhog[i] = std::pow(s0.rho[i], p.gamma - 1.0);
        lnrho[i] = std::log(s0.rho[i]);
    }
    Field rhog_f(rhog, "rho^(gamma-1)");
    Field psi0 = ddr(g, Field(lnrho, "ln rho"));
    Field dpsi0 = ddr(g, psi0);
    std::vector<double> psi_over_r(n);
    for (int i = 0; i < n; ++i) psi_over_r[i] = psi0[i] / g.node(i);

    InitDataReport rep;
    auto push = [&rep](NormEntry e) {
        rep.all_finite = rep.all_finite && e.finite;
        rep.norms.push_back(std::move(e));
    };

    push(entry("total mass  int r^m rho0 dr", weighted_integral(g, s0.rho, m)));
    push(entry("|r^(m/2) rho0^(g-1)|_2", weighted_norm(g, rhog_f, m, 2.0)));
    push(entry("|r^(m/2) d_r rho0^(g-1)|_2", weighted_norm(g, ddr(g, rhog_f), m, 2.0)));
    push(entry("|r^(m/2) d_rr rho0^(g-1)|_2", weighted_norm(g, d2dr2(g, rhog_f), m, 2.0)));
    push(entry("|r^(m/2) u0|_2", weighted_norm(g, s0.u, m, 2.0)));
    push(entry("|r^(m/2) d_r u0|_2", weighted_norm(g, ddr(g, s0.u), m, 2.0)));
    push(entry("|r^(m/2) d_rr u0|_2", weighted_norm(g, d2dr2(g, s0.u), m, 2.0)));
    push(entry("|r^(m/q) psi0|_q", weighted_norm(g, psi0, m, q)));
    push(entry("|psi0|_inf", weighted_norm(g, psi0, 0.0,
                                           std::numeric_limits<double>::infinity())));
    push(entry("|r^(m/2) psi0/r|_2",
               weighted_norm(g, Field(psi_over_r, "psi0/r"), m, 2.0)));
    push(entry("|r^(m/2) d_r psi0|_2", weighted_norm(g, dpsi0, m, 2.0)));

    // Tail diagnosis: local power-law exponent of the mass integrand r^m rho0
    // near R. Exponent >= -1 means the untruncated mass integral diverges.
    {
        const int w = std::max(2, n / 20);
        const double gR = std::pow(g.node(n - 1), m) * s0.rho[n - 1];
        const double gW = std::pow(g.node(n - 1 - w), m) * s0.rho[n - 1 - w];
        if (gR > 0.0 && gW > 0.0) {
            rep.tail_exponent = (std::log(gR) - std::log(gW)) /
                                (std::log(g.node(n - 1)) - std::log(g.node(n - 1 - w)));
        } else {
            rep.tail_exponent = -std::numeric_limits<double>::infinity();
        }
        rep.tail_flag = rep.tail_exponent >= -1.0;
        rep.tail_value = std::pow(g.R(), m) * s0.rho[n - 1];
        rep.tail_value_warning = rep.tail_value >= tail_tol;
    }
    if (sigma) rep.sigma_ok = (*sigma > 0.5 * p.d);
    return rep;
}

std::string InitDataReport::to_text() const {
    std::ostringstream os;
    os << "initial data validation\n";
    for (const auto& e : norms) {
        os << "  " << e.name << " = " << e.value << (e.finite ? "" : "  [NON-FINITE]") << "\n";
    }
    os << "  tail exponent of r^m rho0 at R = " << tail_exponent
       << (tail_flag ? "  [TAIL FLAG: mass integrand does not decay faster than 1/r]" : "")
       << "\n";
    os << "  rho0(R) R^m = " << tail_value
       << (tail_value_warning ? "  [warning: exceeds tail tolerance]" : "") << "\n";
    if (sigma_ok)
        os << "  sigma > d/2: " << (*sigma_ok ? "pass" : "FAIL") << "\n";
    os << "  all norms finite: " << (all_finite ? "yes" : "NO") << "\n";
    os << "  note: |(ln rho0)_r|_inf is checked up to the truncation radius only\n";
    return os.str();
}

} // namespace rcns
