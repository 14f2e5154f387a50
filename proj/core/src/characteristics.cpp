#include "rcns/characteristics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rcns {

SolutionHistory::SolutionHistory(RadialGrid grid, ModelParams params)
    : grid_(std::move(grid)), params_(std::move(params)) {}

void SolutionHistory::append(double t, std::vector<double> rho, std::vector<double> u) {
    if (static_cast<int>(rho.size()) != grid_.size() ||
        static_cast<int>(u.size()) != grid_.size())
        throw std::invalid_argument("SolutionHistory::append: field length mismatch");
    if (!times_.empty() && t <= times_.back())
        throw std::invalid_argument("SolutionHistory::append: times must increase");
    if (times_.empty()) {
        Field rho_f(rho, "rho0");
        Field drho = ddr(grid_, rho_f);
        v0_.resize(grid_.size());
        for (int i = 0; i < grid_.size(); ++i)
            v0_[i] = u[i] + 2.0 * params_.alpha * drho[i] / rho[i];
    }
    times_.push_back(t);
    rho_.push_back(std::move(rho));
    u_.push_back(std::move(u));
}

int SolutionHistory::bracket(double t) const {
    if (times_.empty()) throw std::logic_error("SolutionHistory: empty");
    auto it = std::upper_bound(times_.begin(), times_.end(), t);
    int j = static_cast<int>(it - times_.begin()) - 1;
    return std::clamp(j, 0, static_cast<int>(times_.size()) - 2);
}

double SolutionHistory::u_at(double t, double r) const {
    if (times_.size() == 1) return interp_linear(grid_, u_[0], r);
    const int j = bracket(t);
    const double w = std::clamp((t - times_[j]) / (times_[j + 1] - times_[j]), 0.0, 1.0);
    return (1.0 - w) * interp_linear(grid_, u_[j], r) + w * interp_linear(grid_, u_[j + 1], r);
}

double SolutionHistory::rho_at(double t, double r) const {
    if (times_.size() == 1) return interp_linear(grid_, rho_[0], r);
    const int j = bracket(t);
    const double w = std::clamp((t - times_[j]) / (times_[j + 1] - times_[j]), 0.0, 1.0);
    return (1.0 - w) * interp_linear(grid_, rho_[j], r) +
           w * interp_linear(grid_, rho_[j + 1], r);
}

double SolutionHistory::v0_at(double r) const {
    if (v0_.empty()) throw std::logic_error("SolutionHistory: empty");
    return interp_linear(grid_, v0_, r);
}

void HistoryRecorder::on_step(const FluidState& before, const FluidState& after, double,
                              double) {
    if (history_.times().empty())
        history_.append(before.t, before.rho.values, before.u.values);
    history_.append(after.t, after.rho.values, after.u.values);
}

// ============================================================================
// Tracing
// ============================================================================

CharacteristicPath trace_characteristic(const SolutionHistory& h, double r0, double t_final) {
    const auto& times = h.times();
    if (times.empty()) throw std::invalid_argument("trace_characteristic: empty history");
    if (r0 < h.grid().a() || r0 > h.grid().R())
        throw std::invalid_argument("trace_characteristic: launch radius outside [a, R]");
    if (t_final > h.t_end() + 1e-12 * std::max(1.0, h.t_end()))
        throw std::invalid_argument("trace_characteristic: t_final beyond stored history");

    CharacteristicPath path;
    path.r0 = r0;
    path.times.push_back(times.front());
    path.positions.push_back(r0);

    const double a = h.grid().a();
    const double R = h.grid().R();
    const double snap_tol = 1e-9 * (R - a);

    double y = r0;
    for (std::size_t j = 0; j + 1 < times.size() && times[j] < t_final; ++j) {
        const double t0 = times[j];
        const double dt = std::min(times[j + 1], t_final) - t0;
        if (dt <= 0.0) break;
        const double k1 = h.u_at(t0, y);
        const double k2 = h.u_at(t0 + 0.5 * dt, y + 0.5 * dt * k1);
        const double k3 = h.u_at(t0 + 0.5 * dt, y + 0.5 * dt * k2);
        const double k4 = h.u_at(t0 + dt, y + dt * k3);
        y += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (y < a || y > R) {
            if (y > a - snap_tol && y < R + snap_tol) {
                y = std::clamp(y, a, R); // roundoff graze, not an exit
            } else {
                path.exited = true;
                break;
            }
        }
        path.times.push_back(t0 + dt);
        path.positions.push_back(y);
    }
    return path;
}

namespace {

// (A gamma / 2 alpha) rho^(gamma-1) sampled along the path
std::vector<double> damping_rate_along(const SolutionHistory& h,
                                       const CharacteristicPath& path) {
    const auto& p = h.params();
    const double c = p.A * p.gamma / (2.0 * p.alpha);
    std::vector<double> k(path.times.size());
    for (std::size_t j = 0; j < path.times.size(); ++j)
        k[j] = c * std::pow(h.rho_at(path.times[j], path.positions[j]), p.gamma - 1.0);
    return k;
}

} // namespace

double damping_factor(const SolutionHistory& h, const CharacteristicPath& path, double t) {
    if (path.times.empty() || t > path.times.back() + 1e-12 * std::max(1.0, t))
        throw std::invalid_argument("damping_factor: path does not cover [0, t]");
    const auto k = damping_rate_along(h, path);
    double integral = 0.0;
    for (std::size_t j = 0; j + 1 < path.times.size() && path.times[j] < t; ++j) {
        const double t1 = std::min(path.times[j + 1], t);
        integral += 0.5 * (k[j] + k[j + 1]) * (t1 - path.times[j]);
    }
    return std::exp(-integral);
}

std::vector<double> v_along_path(const SolutionHistory& h, const CharacteristicPath& path) {
    const auto k = damping_rate_along(h, path);
    const double v0 = h.v0_at(path.r0);

    std::vector<double> v(path.times.size());
    double kint = 0.0;  // int_0^t k ds
    double source = 0.0; // int_0^t k u e^{int_0^s k} ds
    double f_prev = k[0] * h.u_at(path.times[0], path.positions[0]); // e^0 = 1
    v[0] = v0;
    for (std::size_t j = 1; j < path.times.size(); ++j) {
        const double dt = path.times[j] - path.times[j - 1];
        kint += 0.5 * (k[j - 1] + k[j]) * dt;
        const double f = k[j] * h.u_at(path.times[j], path.positions[j]) * std::exp(kint);
        source += 0.5 * (f_prev + f) * dt;
        f_prev = f;
        v[j] = (v0 + source) * std::exp(-kint);
    }
    return v;
}

double v_closed_form(const SolutionHistory& h, double r0, double t) {
    CharacteristicPath path = trace_characteristic(h, r0, t);
    return v_along_path(h, path).back();
}

std::vector<double> default_launch_radii(const RadialGrid& g, int count) {
    const double lo = g.a() + 0.05 * (g.R() - g.a());
    const double hi = g.a() + 0.6 * (g.R() - g.a());
    std::vector<double> radii(count);
    for (int i = 0; i < count; ++i)
        radii[i] = lo + (hi - lo) * (count == 1 ? 0.0 : static_cast<double>(i) / (count - 1));
    return radii;
}

} // namespace rcns
