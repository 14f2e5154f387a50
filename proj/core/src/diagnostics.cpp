#include "rcns/diagnostics.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace rcns {

namespace {

const char* kCsvHeader =
    "t,mass,energy,energy_dissipation_rate,bd_entropy,bd_dissipation_rate,"
    "sup_rho,sup_v,sup_psi,gronwall_rhs,boundary_flux_cum,psi_consistency";

double sup_abs(const Field& f) {
    double m = 0.0;
    for (double x : f.values) m = std::max(m, std::abs(x));
    return m;
}

// int r^m (rho u^2 / 2 + A/(gamma-1) rho^gamma) dr with u replaced by w
double entropy_like(const ModelParams& p, const RadialGrid& g, const Field& rho,
                    const Field& w) {
    const int n = g.size();
    std::vector<double> integrand(n);
    for (int i = 0; i < n; ++i) {
        integrand[i] = 0.5 * rho[i] * w[i] * w[i] +
                       p.A / (p.gamma - 1.0) * std::pow(rho[i], p.gamma);
    }
    return weighted_integral(g, Field(std::move(integrand), "e"), p.m);
}

double energy_dissipation(const ModelParams& p, const RadialGrid& g, const FluidState& s) {
    const int n = g.size();
    Field du = ddr(g, s.u);
    std::vector<double> d1(n), d2(n);
    for (int i = 0; i < n; ++i) {
        d1[i] = 2.0 * p.alpha * s.rho[i] * du[i] * du[i];
        d2[i] = 2.0 * p.alpha * p.m * s.rho[i] * s.u[i] * s.u[i];
    }
    return weighted_integral(g, Field(std::move(d1), "d1"), p.m) +
           weighted_integral(g, Field(std::move(d2), "d2"), p.m - 2);
}

double bd_dissipation(const ModelParams& p, const RadialGrid& g, const FluidState& s) {
    const int n = g.size();
    Field drho = ddr(g, s.rho);
    std::vector<double> d(n);
    for (int i = 0; i < n; ++i)
        d[i] = std::pow(s.rho[i], p.gamma - 2.0) * drho[i] * drho[i];
    return 2.0 * p.A * p.alpha * p.gamma * weighted_integral(g, Field(std::move(d), "d"), p.m);
}

double sup_weighted_velocity(const ModelParams& p, const FluidState& s, double expo) {
    double m = 0.0;
    for (std::size_t i = 0; i < s.u.size(); ++i)
        m = std::max(m, std::pow(s.rho[i], expo) * std::abs(s.u[i]));
    return m;
}

double psi_consistency_residual(const ModelParams& p, const RadialGrid& g,
                                const FluidState& s) {
    if (p.A == 0.0) return 0.0; // phi vanishes identically without pressure
    const int n = g.size();
    std::vector<double> lnphi(n);
    for (int i = 0; i < n; ++i) lnphi[i] = std::log(s.phi[i]);
    Field dlnphi = ddr(g, Field(std::move(lnphi), "ln phi"));
    double worst = 0.0;
    for (int i = 0; i < n; ++i)
        worst = std::max(worst, std::abs(s.psi[i] - dlnphi[i] / (p.gamma - 1.0)));
    return worst;
}

} // namespace

DiagnosticsRecord capture(const FluidState& s, const ModelParams& p, const RadialGrid& g,
                          const DiagnosticsAccumulators& acc, double psi_q) {
    DiagnosticsRecord r;
    r.t = s.t;
    r.mass = weighted_integral(g, s.rho, p.m);
    r.energy = entropy_like(p, g, s.rho, s.u);
    r.energy_dissipation_rate = energy_dissipation(p, g, s);
    r.bd_entropy = entropy_like(p, g, s.rho, s.v);
    r.bd_dissipation_rate = bd_dissipation(p, g, s);
    r.sup_rho = sup_abs(s.rho);
    r.sup_v = sup_abs(s.v);
    r.sup_psi = sup_abs(s.psi);
    r.gronwall_rhs =
        acc.v0_sup + p.A * p.gamma / (2.0 * p.alpha) * acc.gronwall_integral;
    r.boundary_flux_cum = acc.boundary_flux_cum;
    r.psi_consistency = psi_consistency_residual(p, g, s);
    r.energy_dissipation_integral = acc.energy_dissipation_integral;
    r.bd_dissipation_integral = acc.bd_dissipation_integral;
    r.rho_iota_u_integral = acc.iota_integral;

    // report-only regularity norms
    const int n = g.size();
    std::vector<double> rhog(n);
    for (int i = 0; i < n; ++i) rhog[i] = std::pow(s.rho[i], p.gamma - 1.0);
    Field rhog_f(std::move(rhog), "rho^(g-1)");
    std::vector<double> psi_over_r(n);
    for (int i = 0; i < n; ++i) psi_over_r[i] = s.psi[i] / g.node(i);

    auto& rn = r.regularity;
    rn.rho_gamma_w_l2 = weighted_norm(g, rhog_f, p.m, 2.0);
    rn.rho_gamma_r_w_l2 = weighted_norm(g, ddr(g, rhog_f), p.m, 2.0);
    rn.rho_gamma_rr_w_l2 = weighted_norm(g, d2dr2(g, rhog_f), p.m, 2.0);
    rn.u_w_l2 = weighted_norm(g, s.u, p.m, 2.0);
    rn.u_r_w_l2 = weighted_norm(g, ddr(g, s.u), p.m, 2.0);
    rn.u_rr_w_l2 = weighted_norm(g, d2dr2(g, s.u), p.m, 2.0);
    rn.psi_wq_lq = weighted_norm(g, s.psi, p.m, psi_q);
    rn.psi_over_r_w_l2 = weighted_norm(g, Field(std::move(psi_over_r), "psi/r"), p.m, 2.0);
    rn.psi_r_w_l2 = weighted_norm(g, ddr(g, s.psi), p.m, 2.0);
    if (acc.prev_record_state && s.t > acc.prev_record_t) {
        const double dt = s.t - acc.prev_record_t;
        std::vector<double> ut(n);
        for (int i = 0; i < n; ++i) ut[i] = (s.u[i] - acc.prev_record_state->u[i]) / dt;
        Field ut_f(std::move(ut), "u_t");
        rn.u_t_w_l2 = weighted_norm(g, ut_f, p.m, 2.0);
        rn.u_tr_w_l2_tweighted = std::sqrt(s.t) * weighted_norm(g, ddr(g, ut_f), p.m, 2.0);
    }
    return r;
}

double weighted_velocity_moment(const FluidState& s, const ModelParams& p,
                                const RadialGrid& g, double q_tilde) {
    if (!(q_tilde >= 2.0 && q_tilde <= 64.0))
        throw std::invalid_argument("weighted_velocity_moment: q_tilde must lie in [2, 64]");
    const int n = g.size();
    std::vector<double> integrand(n);
    for (int i = 0; i < n; ++i)
        integrand[i] = s.rho[i] * std::pow(std::abs(s.u[i]), q_tilde);
    return std::pow(weighted_integral(g, Field(std::move(integrand), "mom"), p.m),
                    1.0 / q_tilde);
}

namespace {

IdentityResiduals identity_residuals(const std::vector<DiagnosticsRecord>& series,
                                     double DiagnosticsRecord::*value,
                                     double DiagnosticsRecord::*dissipation_integral) {
    if (series.size() < 2)
        throw std::invalid_argument("identity residuals need at least two records");
    IdentityResiduals out;
    out.per_interval.reserve(series.size() - 1);
    for (std::size_t i = 0; i + 1 < series.size(); ++i) {
        const auto& A = series[i];
        const auto& B = series[i + 1];
        const double res =
            (B.*value - A.*value) + (B.*dissipation_integral - A.*dissipation_integral);
        out.per_interval.push_back(res);
        out.max_abs = std::max(out.max_abs, std::abs(res));
        out.sum_abs += std::abs(res);
    }
    return out;
}

} // namespace

IdentityResiduals energy_identity_residual(const std::vector<DiagnosticsRecord>& series) {
    return identity_residuals(series, &DiagnosticsRecord::energy,
                              &DiagnosticsRecord::energy_dissipation_integral);
}

IdentityResiduals bd_identity_residual(const std::vector<DiagnosticsRecord>& series) {
    return identity_residuals(series, &DiagnosticsRecord::bd_entropy,
                              &DiagnosticsRecord::bd_dissipation_integral);
}

VBoundReport v_bound_check(const std::vector<DiagnosticsRecord>& series,
                           std::optional<double> scheme_tol) {
    if (series.empty()) throw std::invalid_argument("v_bound_check: empty series");
    const double v0_sup = series.front().sup_v;
    const double tol = scheme_tol.value_or(1e-2 * v0_sup);
    VBoundReport rep;
    rep.worst_margin = -std::numeric_limits<double>::infinity();
    for (const auto& r : series) {
        const double margin = r.sup_v - r.gronwall_rhs - tol;
        if (margin > rep.worst_margin) {
            rep.worst_margin = margin;
            rep.t_worst = r.t;
        }
        if (margin > 0.0) rep.pass = false;
    }
    return rep;
}

std::string VBoundReport::to_text() const {
    std::ostringstream os;
    os << "transport bound sup|v| <= gronwall rhs + tol: " << (pass ? "pass" : "FAIL")
       << " (worst margin " << worst_margin << " at t = " << t_worst << ")";
    return os.str();
}

void emit_series(const std::vector<DiagnosticsRecord>& series, std::ostream& sink,
                 const std::string& provenance) {
    if (!provenance.empty()) {
        std::istringstream lines(provenance);
        std::string line;
        while (std::getline(lines, line)) sink << "# " << line << "\n";
    }
    sink << kCsvHeader << "\n";
    char buf[32];
    auto put = [&](double x, char sep) {
        std::snprintf(buf, sizeof buf, "%.17g", x);
        sink << buf << sep;
    };
    for (const auto& r : series) {
        put(r.t, ',');
        put(r.mass, ',');
        put(r.energy, ',');
        put(r.energy_dissipation_rate, ',');
        put(r.bd_entropy, ',');
        put(r.bd_dissipation_rate, ',');
        put(r.sup_rho, ',');
        put(r.sup_v, ',');
        put(r.sup_psi, ',');
        put(r.gronwall_rhs, ',');
        put(r.boundary_flux_cum, ',');
        put(r.psi_consistency, '\n');
    }
    if (!sink) throw std::runtime_error("emit_series: sink write failure");
}

std::vector<DiagnosticsRecord> parse_series(std::istream& source) {
    std::vector<DiagnosticsRecord> out;
    std::string line;
    bool header_seen = false;
    while (std::getline(source, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            if (line != kCsvHeader)
                throw std::runtime_error("parse_series: unexpected header: " + line);
            header_seen = true;
            continue;
        }
        DiagnosticsRecord r;
        double* fields[12] = {&r.t,       &r.mass,    &r.energy,
                              &r.energy_dissipation_rate, &r.bd_entropy,
                              &r.bd_dissipation_rate,     &r.sup_rho,
                              &r.sup_v,   &r.sup_psi, &r.gronwall_rhs,
                              &r.boundary_flux_cum,       &r.psi_consistency};
        std::istringstream ls(line);
        std::string cell;
        for (int i = 0; i < 12; ++i) {
            if (!std::getline(ls, cell, ','))
                throw std::runtime_error("parse_series: short row: " + line);
            *fields[i] = std::strtod(cell.c_str(), nullptr);
        }
        out.push_back(r);
    }
    return out;
}

// ============================================================================
// Collector
// ============================================================================

DiagnosticsCollector::DiagnosticsCollector(const ModelParams& p, const RadialGrid& g,
                                           double psi_q)
    : p_(p), g_(g), psi_q_(psi_q) {}

void DiagnosticsCollector::on_step(const FluidState& before, const FluidState& after,
                                   double dt, double outflux) {
    if (!have_rates_) {
        g_prev_ = sup_weighted_velocity(p_, before, p_.gamma - 1.0);
        iota_prev_ = sup_weighted_velocity(p_, before, kIotaExponent);
        D_prev_ = energy_dissipation(p_, g_, before);
        Dbd_prev_ = bd_dissipation(p_, g_, before);
        have_rates_ = true;
    }
    const double g_new = sup_weighted_velocity(p_, after, p_.gamma - 1.0);
    const double iota_new = sup_weighted_velocity(p_, after, kIotaExponent);
    const double D_new = energy_dissipation(p_, g_, after);
    const double Dbd_new = bd_dissipation(p_, g_, after);

    acc_.boundary_flux_cum += outflux;
    acc_.gronwall_integral += 0.5 * (g_prev_ + g_new) * dt;
    acc_.iota_integral += 0.5 * (iota_prev_ + iota_new) * dt;
    acc_.energy_dissipation_integral += 0.5 * (D_prev_ + D_new) * dt;
    acc_.bd_dissipation_integral += 0.5 * (Dbd_prev_ + Dbd_new) * dt;

    g_prev_ = g_new;
    iota_prev_ = iota_new;
    D_prev_ = D_new;
    Dbd_prev_ = Dbd_new;
}

void DiagnosticsCollector::on_record(const FluidState& s) {
    if (series_.empty()) {
        double m = 0.0;
        for (double x : s.v.values) m = std::max(m, std::abs(x));
        acc_.v0_sup = m;
    }
    series_.push_back(capture(s, p_, g_, acc_, psi_q_));
    acc_.prev_record_state = s;
    acc_.prev_record_t = s.t;
}

} // namespace rcns
